#include "abr/storage.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <limits>
#include <set>

#include "abr/error.hpp"

namespace abr {

std::size_t TableSchema::find(std::string_view column) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == column) return i;
    }
    return std::string::npos;
}

namespace {

std::uint64_t next_instance_id() {
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

struct TableEntry {
    TableSchema schema;
    std::vector<ColumnMeta> columns;
    std::uint32_t rows = 0;
};

}  // namespace

struct DatabaseState {
    std::vector<std::byte> arena;
    std::vector<TableEntry> tables;
    std::set<std::string, std::less<>> pending;
    int open_builders = 0;
    bool sealed = false;
    std::uint64_t id = next_instance_id();

    const TableEntry& table(std::string_view name) const {
        for (const auto& t : tables) {
            if (t.schema.name == name) return t;
        }
        throw Error(ErrorCode::UnknownTable, "no table named '" + std::string(name) + "'");
    }

    // Appends `bytes` zero bytes after padding to `align`; returns the offset
    // of the new region. Capacity grows geometrically.
    std::size_t allocate(std::size_t bytes, std::size_t align) {
        const std::size_t offset = (arena.size() + align - 1) / align * align;
        const std::size_t needed = offset + bytes;
        if (needed > arena.capacity()) {
            arena.reserve(std::max(needed, arena.capacity() * 2));
        }
        arena.resize(needed);
        return offset;
    }
};

struct TableBuilder::Staging {
    ColumnType type;
    std::vector<std::int32_t> ints;
    std::vector<double> floats;
    std::string bytes;
    std::vector<std::uint32_t> starts{0};

    std::size_t size() const {
        switch (type) {
            case ColumnType::Float64: return floats.size();
            case ColumnType::String: return starts.size() - 1;
            default: return ints.size();
        }
    }
};

TableBuilder::TableBuilder(DatabaseState* db, TableSchema schema)
    : db_(db), schema_(std::move(schema)) {
    staging_.reserve(schema_.columns.size());
    for (const auto& c : schema_.columns) staging_.push_back(Staging{c.type, {}, {}, {}, {0}});
    ++db_->open_builders;
    db_->pending.insert(schema_.name);
}

TableBuilder::TableBuilder(TableBuilder&& other) noexcept
    : db_(other.db_),
      schema_(std::move(other.schema_)),
      staging_(std::move(other.staging_)),
      done_(other.done_) {
    other.done_ = true;
    other.db_ = nullptr;
}

TableBuilder::~TableBuilder() {
    if (db_ != nullptr && !done_) {
        --db_->open_builders;
        auto it = db_->pending.find(schema_.name);
        if (it != db_->pending.end()) db_->pending.erase(it);
    }
}

void TableBuilder::check_type(std::size_t column, ColumnType expected) const {
    if (done_) throw Error(ErrorCode::DatabaseSealed, "table builder already finished");
    if (column >= staging_.size()) {
        throw Error(ErrorCode::UnknownColumn, "column index " + std::to_string(column) +
                                                  " out of range for table '" + schema_.name + "'");
    }
    if (staging_[column].type != expected) {
        throw Error(ErrorCode::TypeMismatch, "column '" + schema_.columns[column].name + "' is " +
                                                 std::string(to_string(staging_[column].type)) +
                                                 ", not " + std::string(to_string(expected)));
    }
}

void TableBuilder::append_int32(std::size_t column, std::int32_t value) {
    check_type(column, ColumnType::Int32);
    staging_[column].ints.push_back(value);
}

void TableBuilder::append_float64(std::size_t column, double value) {
    check_type(column, ColumnType::Float64);
    staging_[column].floats.push_back(value);
}

void TableBuilder::append_date(std::size_t column, Date value) {
    check_type(column, ColumnType::Date32);
    staging_[column].ints.push_back(value.days);
}

void TableBuilder::append_string(std::size_t column, std::string_view value) {
    check_type(column, ColumnType::String);
    if (value.find('\0') != std::string_view::npos) {
        throw Error(ErrorCode::ConversionError,
                    "strings may not contain NUL bytes (column '" + schema_.columns[column].name +
                        "')");
    }
    auto& s = staging_[column];
    if (s.bytes.size() + value.size() > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::Overflow, "string column exceeds 4 GiB");
    }
    s.bytes.append(value);
    s.starts.push_back(static_cast<std::uint32_t>(s.bytes.size()));
}

void TableBuilder::append_row(std::span<const Value> row) {
    if (row.size() != staging_.size()) {
        throw Error(ErrorCode::FieldCountMismatch,
                    "row has " + std::to_string(row.size()) + " values, table '" + schema_.name +
                        "' has " + std::to_string(staging_.size()) + " columns");
    }
    for (std::size_t i = 0; i < row.size(); ++i) check_type(i, type_of(row[i]));
    for (std::size_t i = 0; i < row.size(); ++i) {
        std::visit(
            [&](const auto& v) {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::int32_t>) append_int32(i, v);
                else if constexpr (std::is_same_v<T, double>) append_float64(i, v);
                else if constexpr (std::is_same_v<T, Date>) append_date(i, v);
                else append_string(i, v);
            },
            row[i]);
    }
}

void TableBuilder::reserve(std::size_t rows) {
    for (auto& s : staging_) {
        switch (s.type) {
            case ColumnType::Float64: s.floats.reserve(rows); break;
            case ColumnType::String: s.starts.reserve(rows + 1); break;
            default: s.ints.reserve(rows); break;
        }
    }
}

std::size_t TableBuilder::row_count() const {
    return staging_.empty() ? 0 : staging_.front().size();
}

void TableBuilder::finish() {
    if (done_) throw Error(ErrorCode::DatabaseSealed, "table builder already finished");
    const std::size_t rows = row_count();
    for (std::size_t i = 0; i < staging_.size(); ++i) {
        if (staging_[i].size() != rows) {
            throw Error(ErrorCode::ColumnLengthMismatch,
                        "column '" + schema_.columns[i].name + "' has " +
                            std::to_string(staging_[i].size()) + " values, expected " +
                            std::to_string(rows));
        }
    }
    if (rows > std::numeric_limits<std::uint32_t>::max()) {
        throw Error(ErrorCode::Overflow, "table exceeds 2^32-1 rows");
    }

    TableEntry entry;
    entry.schema = schema_;
    entry.rows = static_cast<std::uint32_t>(rows);
    auto& arena = db_->arena;
    for (std::size_t i = 0; i < staging_.size(); ++i) {
        const auto& s = staging_[i];
        ColumnMeta meta{schema_.columns[i].name, s.type, 0, entry.rows, 0, 0};
        const std::size_t width = element_width(s.type);
        switch (s.type) {
            case ColumnType::Float64:
                meta.arena_offset = db_->allocate(rows * width, width);
                if (rows > 0) std::memcpy(arena.data() + meta.arena_offset, s.floats.data(), rows * width);
                break;
            case ColumnType::String: {
                meta.arena_offset = db_->allocate((rows + 1) * width, width);
                std::memcpy(arena.data() + meta.arena_offset, s.starts.data(), (rows + 1) * width);
                meta.byte_length = s.bytes.size();
                meta.bytes_offset = db_->allocate(s.bytes.size(), 1);
                if (!s.bytes.empty())
                    std::memcpy(arena.data() + meta.bytes_offset, s.bytes.data(), s.bytes.size());
                break;
            }
            default:
                meta.arena_offset = db_->allocate(rows * width, width);
                if (rows > 0) std::memcpy(arena.data() + meta.arena_offset, s.ints.data(), rows * width);
                break;
        }
        entry.columns.push_back(std::move(meta));
    }
    db_->tables.push_back(std::move(entry));
    db_->pending.erase(db_->pending.find(schema_.name));
    --db_->open_builders;
    done_ = true;
    staging_.clear();
}

Database::Database() : state_(std::make_unique<DatabaseState>()) {}
Database::Database(Database&&) noexcept = default;
Database& Database::operator=(Database&&) noexcept = default;
Database::~Database() = default;

Database Database::derive() const {
    if (state_->open_builders > 0) {
        throw Error(ErrorCode::OpenBuilder, "cannot derive while a table builder is open");
    }
    Database copy;
    copy.state_->arena = state_->arena;
    copy.state_->tables = state_->tables;
    return copy;
}

TableBuilder Database::begin_table(TableSchema schema) {
    if (state_->sealed) {
        throw Error(ErrorCode::DatabaseSealed, "cannot add table '" + schema.name + "' to a sealed database");
    }
    if (has_table(schema.name) || state_->pending.contains(schema.name)) {
        throw Error(ErrorCode::DuplicateTable, "table '" + schema.name + "' already exists");
    }
    std::set<std::string_view> names;
    for (const auto& c : schema.columns) {
        if (!names.insert(c.name).second) {
            throw Error(ErrorCode::InvalidDescriptor,
                        "duplicate column '" + c.name + "' in table '" + schema.name + "'");
        }
    }
    return TableBuilder(state_.get(), std::move(schema));
}

void Database::seal() {
    if (state_->sealed) return;
    if (state_->open_builders > 0) {
        throw Error(ErrorCode::OpenBuilder, "cannot seal while a table builder is open");
    }
    state_->arena.shrink_to_fit();
    state_->sealed = true;
}

bool Database::sealed() const { return state_->sealed; }

std::size_t Database::table_count() const { return state_->tables.size(); }

std::vector<std::string> Database::table_names() const {
    std::vector<std::string> names;
    for (const auto& t : state_->tables) names.push_back(t.schema.name);
    return names;
}

bool Database::has_table(std::string_view table) const {
    return std::any_of(state_->tables.begin(), state_->tables.end(),
                       [&](const TableEntry& t) { return t.schema.name == table; });
}

const TableSchema& Database::schema(std::string_view table) const {
    return state_->table(table).schema;
}

std::vector<TableSchema> Database::schemas() const {
    std::vector<TableSchema> out;
    for (const auto& t : state_->tables) out.push_back(t.schema);
    return out;
}

std::uint32_t Database::row_count(std::string_view table) const { return state_->table(table).rows; }

std::size_t Database::catalog_position(std::string_view table) const {
    for (std::size_t i = 0; i < state_->tables.size(); ++i) {
        if (state_->tables[i].schema.name == table) return i;
    }
    throw Error(ErrorCode::UnknownTable, "no table named '" + std::string(table) + "'");
}

const ColumnMeta& Database::column(std::string_view table, std::string_view column) const {
    const auto& t = state_->table(table);
    for (const auto& c : t.columns) {
        if (c.name == column) return c;
    }
    throw Error(ErrorCode::UnknownColumn,
                "table '" + std::string(table) + "' has no column '" + std::string(column) + "'");
}

std::span<const ColumnMeta> Database::columns(std::string_view table) const {
    return state_->table(table).columns;
}

const ColumnMeta& Database::typed_column(std::string_view table, std::string_view column,
                                         ColumnType type) const {
    if (!state_->sealed) throw Error(ErrorCode::NotSealed, "database must be sealed before reading");
    const auto& meta = this->column(table, column);
    if (meta.type != type) {
        throw Error(ErrorCode::TypeMismatch, "column '" + std::string(column) + "' is " +
                                                 std::string(to_string(meta.type)) + ", not " +
                                                 std::string(to_string(type)));
    }
    return meta;
}

std::span<const std::int32_t> Database::int32_view(std::string_view table,
                                                   std::string_view column) const {
    const auto& m = typed_column(table, column, ColumnType::Int32);
    return {reinterpret_cast<const std::int32_t*>(state_->arena.data() + m.arena_offset), m.row_count};
}

std::span<const double> Database::float64_view(std::string_view table, std::string_view column) const {
    const auto& m = typed_column(table, column, ColumnType::Float64);
    return {reinterpret_cast<const double*>(state_->arena.data() + m.arena_offset), m.row_count};
}

std::span<const std::int32_t> Database::date_view(std::string_view table,
                                                  std::string_view column) const {
    const auto& m = typed_column(table, column, ColumnType::Date32);
    return {reinterpret_cast<const std::int32_t*>(state_->arena.data() + m.arena_offset), m.row_count};
}

StringColumnView Database::string_column(std::string_view table, std::string_view column) const {
    const auto& m = typed_column(table, column, ColumnType::String);
    return {reinterpret_cast<const std::uint32_t*>(state_->arena.data() + m.arena_offset),
            reinterpret_cast<const char*>(state_->arena.data() + m.bytes_offset), m.row_count};
}

std::string_view Database::string_at(std::string_view table, std::string_view column,
                                     std::size_t row) const {
    auto view = string_column(table, column);
    if (row >= view.size()) {
        throw Error(ErrorCode::RowOutOfRange, "row " + std::to_string(row) + " >= row count " +
                                                  std::to_string(view.size()));
    }
    return view[static_cast<std::uint32_t>(row)];
}

Value Database::value_at(std::string_view table, std::string_view column, std::size_t row) const {
    const auto& meta = this->column(table, column);
    if (row >= meta.row_count) {
        throw Error(ErrorCode::RowOutOfRange, "row " + std::to_string(row) + " >= row count " +
                                                  std::to_string(meta.row_count));
    }
    switch (meta.type) {
        case ColumnType::Int32: return int32_view(table, column)[row];
        case ColumnType::Float64: return float64_view(table, column)[row];
        case ColumnType::Date32: return Date{date_view(table, column)[row]};
        case ColumnType::String: return std::string(string_at(table, column, row));
    }
    return {};
}

std::span<const std::byte> Database::arena() const { return state_->arena; }

std::uint64_t Database::arena_digest() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::byte b : state_->arena) {
        h ^= static_cast<std::uint64_t>(b);
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t Database::instance_id() const { return state_->id; }

}  // namespace abr
