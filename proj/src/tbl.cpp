#include "abr/tbl.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include <fmt/core.h>

#include "abr/date.hpp"
#include "abr/error.hpp"

namespace abr {
namespace {

void split_fields(std::string_view line, std::vector<std::string_view>& out) {
    out.clear();
    std::size_t start = 0;
    while (true) {
        const auto bar = line.find('|', start);
        if (bar == std::string_view::npos) {
            // A trailing delimiter leaves an empty remainder; drop it.
            if (start < line.size() || out.empty()) out.push_back(line.substr(start));
            return;
        }
        out.push_back(line.substr(start, bar - start));
        start = bar + 1;
    }
}

[[noreturn]] void conversion(std::size_t line, const std::string& column, std::string_view field, ColumnType type) {
    throw Error(ErrorCode::ConversionError, fmt::format("'{}' is not a valid {}", field, to_string(type)), line,
                column);
}

void write_double(std::ostream& out, double v) {
    char buf[400];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
    out.write(buf, res.ptr - buf);
}

}  // namespace

std::uint32_t load_tbl(Database& db, const TableSchema& schema, std::istream& in) {
    auto builder = db.begin_table(schema);
    const auto& cols = schema.columns;
    std::string line;
    std::vector<std::string_view> fields;
    std::size_t line_no = 0;
    bool pending_empty = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (pending_empty) {
            throw Error(ErrorCode::FieldCountMismatch,
                        fmt::format("expected {} fields, found an empty line", cols.size()), line_no - 1);
        }
        if (line.empty()) {
            pending_empty = true;  // fine if it turns out to be the last line
            continue;
        }
        split_fields(line, fields);
        if (fields.size() != cols.size()) {
            throw Error(ErrorCode::FieldCountMismatch,
                        fmt::format("expected {} fields, found {}", cols.size(), fields.size()), line_no);
        }
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto f = fields[c];
            const auto* first = f.data();
            const auto* last = f.data() + f.size();
            switch (cols[c].type) {
                case ColumnType::Int32: {
                    std::int32_t v;
                    const auto r = std::from_chars(first, last, v);
                    if (f.empty() || r.ec != std::errc{} || r.ptr != last) conversion(line_no, cols[c].name, f, cols[c].type);
                    builder.append_int32(c, v);
                    break;
                }
                case ColumnType::Float64: {
                    double v;
                    const auto r = std::from_chars(first, last, v);
                    if (f.empty() || r.ec != std::errc{} || r.ptr != last || !std::isfinite(v)) {
                        conversion(line_no, cols[c].name, f, cols[c].type);
                    }
                    builder.append_float64(c, v);
                    break;
                }
                case ColumnType::Date32: {
                    Date d;
                    try {
                        d = parse_date(f);
                    } catch (const Error&) {
                        conversion(line_no, cols[c].name, f, cols[c].type);
                    }
                    builder.append_date(c, d);
                    break;
                }
                case ColumnType::String:
                    if (f.find('\0') != std::string_view::npos) conversion(line_no, cols[c].name, f, cols[c].type);
                    builder.append_string(c, f);
                    break;
            }
        }
    }
    if (in.bad()) throw Error(ErrorCode::IoError, "read failed");
    const auto rows = static_cast<std::uint32_t>(builder.row_count());
    builder.finish();
    return rows;
}

std::uint32_t load_tbl(Database& db, const TableSchema& schema, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
    return load_tbl(db, schema, in);
}

void emit_tbl(const Database& db, std::string_view table, std::ostream& out) {
    const auto& schema = db.schema(table);
    const auto rows = db.row_count(table);
    for (std::uint32_t r = 0; r < rows; ++r) {
        for (const auto& c : schema.columns) {
            const Value v = db.value_at(table, c.name, r);
            switch (c.type) {
                case ColumnType::Int32: out << std::get<std::int32_t>(v); break;
                case ColumnType::Float64: write_double(out, std::get<double>(v)); break;
                case ColumnType::Date32: out << format_date(std::get<Date>(v)); break;
                case ColumnType::String: out << std::get<std::string>(v); break;
            }
            out << '|';
        }
        out << '\n';
    }
}

void emit_tbl(const Database& db, std::string_view table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
    emit_tbl(db, table, out);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("write to '{}' failed", path.string()));
}

nlohmann::json schema_to_json(const TableSchema& schema) {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& c : schema.columns) cols.push_back({{"name", c.name}, {"type", to_string(c.type)}});
    return {{"name", schema.name}, {"columns", std::move(cols)}};
}

TableSchema schema_from_json(const nlohmann::json& j) {
    auto bad = [](const std::string& m) { return Error(ErrorCode::InvalidDescriptor, m); };
    if (!j.is_object() || !j.contains("name") || !j["name"].is_string()) throw bad("schema needs a string 'name'");
    if (!j.contains("columns") || !j["columns"].is_array() || j["columns"].empty()) {
        throw bad("schema needs a non-empty 'columns' array");
    }
    TableSchema s{j["name"].get<std::string>(), {}};
    for (const auto& c : j["columns"]) {
        if (!c.is_object() || !c.contains("name") || !c["name"].is_string() || !c.contains("type") || !c["type"].is_string()) {
            throw bad("each column needs string 'name' and 'type'");
        }
        s.columns.push_back({c["name"].get<std::string>(), parse_column_type(c["type"].get<std::string>())});
    }
    return s;
}

TableSchema read_schema_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidDescriptor, fmt::format("'{}': {}", path.string(), e.what()));
    }
    return schema_from_json(j);
}

void write_schema_file(const TableSchema& schema, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
    out << schema_to_json(schema).dump(2) << '\n';
}

}  // namespace abr
