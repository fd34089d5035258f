#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "abr/types.hpp"

namespace abr {

struct ColumnDef {
    std::string name;
    ColumnType type;
    friend bool operator==(const ColumnDef&, const ColumnDef&) = default;
};

struct TableSchema {
    std::string name;
    std::vector<ColumnDef> columns;

    /// Index of `column`, or npos.
    std::size_t find(std::string_view column) const;
    friend bool operator==(const TableSchema&, const TableSchema&) = default;
};

/// Location of one column inside the arena.
///
/// Fixed-width columns occupy `row_count * element_width(type)` bytes at
/// `arena_offset`. STRING columns store `row_count + 1` uint32 start offsets
/// at `arena_offset`, followed by `byte_length` payload bytes at
/// `bytes_offset`; string i is bytes [start[i], start[i+1]) of that payload.
struct ColumnMeta {
    std::string name;
    ColumnType type;
    std::size_t arena_offset = 0;
    std::uint32_t row_count = 0;
    std::size_t bytes_offset = 0;
    std::size_t byte_length = 0;
};

/// Read-only access to a STRING column.
class StringColumnView {
public:
    StringColumnView() = default;
    StringColumnView(const std::uint32_t* starts, const char* bytes, std::uint32_t rows)
        : starts_(starts), bytes_(bytes), rows_(rows) {}

    std::uint32_t size() const { return rows_; }
    std::string_view operator[](std::uint32_t row) const {
        return {bytes_ + starts_[row], starts_[row + 1] - starts_[row]};
    }
    std::span<const std::uint32_t> starts() const { return {starts_, std::size_t{rows_} + 1}; }

private:
    const std::uint32_t* starts_ = nullptr;
    const char* bytes_ = nullptr;
    std::uint32_t rows_ = 0;
};

class Database;
struct DatabaseState;

/// Accumulates rows for one table; `finish()` lays the columns out in the
/// arena and publishes the table in the catalog. A builder destroyed without
/// `finish()` abandons the table.
class TableBuilder {
public:
    TableBuilder(TableBuilder&& other) noexcept;
    TableBuilder& operator=(TableBuilder&&) = delete;
    TableBuilder(const TableBuilder&) = delete;
    ~TableBuilder();

    const TableSchema& schema() const { return schema_; }

    /// Appends one row; `row` must match the schema in arity and types.
    void append_row(std::span<const Value> row);

    // Typed per-column appends, for bulk loaders. Columns must end up with
    // equal lengths by the time finish() runs.
    void append_int32(std::size_t column, std::int32_t value);
    void append_float64(std::size_t column, double value);
    void append_date(std::size_t column, Date value);
    void append_string(std::size_t column, std::string_view value);

    void reserve(std::size_t rows);
    std::size_t row_count() const;

    void finish();

private:
    friend class Database;
    struct Staging;
    TableBuilder(DatabaseState* db, TableSchema schema);

    void check_type(std::size_t column, ColumnType expected) const;

    DatabaseState* db_;
    TableSchema schema_;
    std::vector<Staging> staging_;
    bool done_ = false;
};

/// A catalog of immutable tables packed end-to-end in one contiguous byte
/// arena. Mutable only until `seal()`.
class Database {
public:
    Database();
    Database(Database&&) noexcept;
    Database& operator=(Database&&) noexcept;
    Database(const Database&) = delete;
    Database& operator=(const Database&) = delete;
    ~Database();

    /// Unsealed deep copy of this database's tables with a fresh identity,
    /// for building a successor catalog. The source is left untouched.
    Database derive() const;

    TableBuilder begin_table(TableSchema schema);
    void seal();
    bool sealed() const;

    std::size_t table_count() const;
    /// Table names in creation order.
    std::vector<std::string> table_names() const;
    bool has_table(std::string_view table) const;
    const TableSchema& schema(std::string_view table) const;
    std::vector<TableSchema> schemas() const;
    std::uint32_t row_count(std::string_view table) const;
    /// Position of `table` in creation order.
    std::size_t catalog_position(std::string_view table) const;

    const ColumnMeta& column(std::string_view table, std::string_view column) const;
    std::span<const ColumnMeta> columns(std::string_view table) const;

    std::span<const std::int32_t> int32_view(std::string_view table, std::string_view column) const;
    std::span<const double> float64_view(std::string_view table, std::string_view column) const;
    std::span<const std::int32_t> date_view(std::string_view table, std::string_view column) const;
    StringColumnView string_column(std::string_view table, std::string_view column) const;

    /// Bytes [start[row], start[row+1]) of a STRING column.
    std::string_view string_at(std::string_view table, std::string_view column,
                               std::size_t row) const;

    /// Boxed read of a single cell, any type.
    Value value_at(std::string_view table, std::string_view column, std::size_t row) const;

    std::span<const std::byte> arena() const;
    /// FNV-1a over the arena bytes.
    std::uint64_t arena_digest() const;
    /// Distinct for every database object ever created in this process;
    /// kernels use it to refuse running against a database they were not
    /// compiled for.
    std::uint64_t instance_id() const;

private:
    const ColumnMeta& typed_column(std::string_view table, std::string_view column,
                                   ColumnType type) const;

    std::unique_ptr<DatabaseState> state_;
};

}  // namespace abr
