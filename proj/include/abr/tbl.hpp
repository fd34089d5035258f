#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "abr/storage.hpp"

namespace abr {

/// Loads pipe-delimited rows into a new table of `db` (which must not be
/// sealed). One trailing '|' per line, a trailing '\r' and a final empty
/// line are accepted. Throws FieldCountMismatch(line), ConversionError(line,
/// column) or IoError; on error no table is added.
std::uint32_t load_tbl(Database& db, const TableSchema& schema, std::istream& in);
std::uint32_t load_tbl(Database& db, const TableSchema& schema, const std::filesystem::path& path);

/// Writes `table` in the same format, with the trailing '|'. Floats use the
/// shortest decimal text that reads back to the same value.
void emit_tbl(const Database& db, std::string_view table, std::ostream& out);
void emit_tbl(const Database& db, std::string_view table, const std::filesystem::path& path);

/// Schema sidecar: {"name": ..., "columns": [{"name": ..., "type": "INT32"}, ...]}.
nlohmann::json schema_to_json(const TableSchema& schema);
TableSchema schema_from_json(const nlohmann::json& j);
TableSchema read_schema_file(const std::filesystem::path& path);
void write_schema_file(const TableSchema& schema, const std::filesystem::path& path);

}  // namespace abr
