#include "abr/result.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "abr/date.hpp"
#include "abr/error.hpp"

namespace abr {

std::size_t ResultColumn::size() const {
    return std::visit([](const auto& v) { return v.size(); }, values);
}

ResultTable::ResultTable(std::span<const ColumnDef> schema) {
    for (const auto& def : schema) {
        ResultColumn c{def.name, def.type, {}};
        if (def.type == ColumnType::Float64) c.values = std::vector<double>{};
        else if (def.type == ColumnType::String) c.values = std::vector<std::string>{};
        columns_.push_back(std::move(c));
    }
}

std::vector<ColumnDef> ResultTable::schema() const {
    std::vector<ColumnDef> out;
    for (const auto& c : columns_) out.push_back({c.name, c.type});
    return out;
}

std::size_t ResultTable::row_count() const { return columns_.empty() ? 0 : columns_.front().size(); }

std::size_t ResultTable::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        if (columns_[i].name == name) return i;
    }
    throw Error(ErrorCode::UnknownColumn, "result has no column '" + std::string(name) + "'");
}

Value ResultTable::value(std::size_t row, std::size_t column) const {
    const auto& c = columns_[column];
    switch (c.type) {
        case ColumnType::Int32: return ints(column)[row];
        case ColumnType::Date32: return Date{ints(column)[row]};
        case ColumnType::Float64: return floats(column)[row];
        case ColumnType::String: return strings(column)[row];
    }
    return {};
}

void ResultTable::append_row(std::span<const Value> row) {
    if (row.size() != columns_.size()) {
        throw Error(ErrorCode::FieldCountMismatch, "row arity does not match result schema");
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (type_of(row[i]) != columns_[i].type) {
            throw Error(ErrorCode::TypeMismatch, "value type does not match column '" + columns_[i].name + "'");
        }
    }
    for (std::size_t i = 0; i < row.size(); ++i) {
        switch (columns_[i].type) {
            case ColumnType::Int32: ints(i).push_back(std::get<std::int32_t>(row[i])); break;
            case ColumnType::Date32: ints(i).push_back(std::get<Date>(row[i]).days); break;
            case ColumnType::Float64: floats(i).push_back(std::get<double>(row[i])); break;
            case ColumnType::String: strings(i).push_back(std::get<std::string>(row[i])); break;
        }
    }
}

ResultTable gather(const ResultTable& table, std::span<const std::size_t> rows) {
    const auto schema = table.schema();
    ResultTable out(schema);
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        std::visit(
            [&](const auto& src) {
                auto& dst = std::get<std::decay_t<decltype(src)>>(out.column(c).values);
                dst.reserve(rows.size());
                for (std::size_t r : rows) dst.push_back(src[r]);
            },
            table.column(c).values);
    }
    return out;
}

void ingest_result(Database& db, const std::string& name, const ResultTable& result) {
    const auto schema = result.schema();
    auto builder = db.begin_table(TableSchema{name, schema});
    builder.reserve(result.row_count());
    for (std::size_t c = 0; c < result.column_count(); ++c) {
        switch (result.column(c).type) {
            case ColumnType::Int32:
                for (auto v : result.ints(c)) builder.append_int32(c, v);
                break;
            case ColumnType::Date32:
                for (auto v : result.ints(c)) builder.append_date(c, Date{v});
                break;
            case ColumnType::Float64:
                for (auto v : result.floats(c)) builder.append_float64(c, v);
                break;
            case ColumnType::String:
                for (const auto& v : result.strings(c)) builder.append_string(c, v);
                break;
        }
    }
    builder.finish();
}

Database materialize(const Database& base, const std::string& name, const ResultTable& result) {
    if (base.has_table(name)) throw Error(ErrorCode::DuplicateTable, "table '" + name + "' already exists");
    Database next = base.derive();
    ingest_result(next, name, result);
    next.seal();
    return next;
}

namespace {

std::string cell_text(const ResultTable& t, std::size_t row, std::size_t col) {
    const auto& c = t.column(col);
    switch (c.type) {
        case ColumnType::Int32: return std::to_string(t.ints(col)[row]);
        case ColumnType::Date32: return format_date(Date{t.ints(col)[row]});
        case ColumnType::Float64: return fmt::format("{}", t.floats(col)[row]);
        case ColumnType::String: return t.strings(col)[row];
    }
    return {};
}

}  // namespace

std::string format_table(const ResultTable& table, std::size_t max_rows) {
    const std::size_t rows = std::min(table.row_count(), max_rows);
    std::vector<std::size_t> widths;
    for (std::size_t c = 0; c < table.column_count(); ++c) widths.push_back(table.column(c).name.size());
    std::vector<std::vector<std::string>> cells(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < table.column_count(); ++c) {
            cells[r].push_back(cell_text(table, r, c));
            widths[c] = std::max(widths[c], cells[r].back().size());
        }
    }
    std::string out;
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        out += fmt::format("{}{:<{}}", c ? " | " : "", table.column(c).name, widths[c]);
    }
    out += "\n";
    for (std::size_t c = 0; c < table.column_count(); ++c) {
        out += (c ? "-+-" : "") + std::string(widths[c], '-');
    }
    out += "\n";
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            const bool right = table.column(c).type != ColumnType::String;
            out += c ? " | " : "";
            out += right ? fmt::format("{:>{}}", row[c], widths[c]) : fmt::format("{:<{}}", row[c], widths[c]);
        }
        out += "\n";
    }
    out += fmt::format("({} row{}{})\n", table.row_count(), table.row_count() == 1 ? "" : "s",
                       rows < table.row_count() ? fmt::format(", first {} shown", rows) : "");
    return out;
}

bool nearly_equal(double a, double b, double relative_tolerance) {
    if (a == b) return true;
    return std::fabs(a - b) <= relative_tolerance * std::max(std::fabs(a), std::fabs(b));
}

namespace {

// Orders rows for multiset comparison: exact columns first, floats last, so
// that tolerance-level float noise cannot reorder rows that differ elsewhere.
std::vector<std::size_t> canonical_order(const ResultTable& t) {
    std::vector<std::size_t> cols;
    for (std::size_t c = 0; c < t.column_count(); ++c) {
        if (t.column(c).type != ColumnType::Float64) cols.push_back(c);
    }
    for (std::size_t c = 0; c < t.column_count(); ++c) {
        if (t.column(c).type == ColumnType::Float64) cols.push_back(c);
    }
    std::vector<std::size_t> order(t.row_count());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        for (std::size_t c : cols) {
            const auto& col = t.column(c);
            int cmp = 0;
            std::visit(
                [&](const auto& v) {
                    if (v[a] < v[b]) cmp = -1;
                    else if (v[b] < v[a]) cmp = 1;
                },
                col.values);
            if (cmp != 0) return cmp < 0;
        }
        return a < b;
    });
    return order;
}

}  // namespace

MatchReport compare_results(const ResultTable& a, const ResultTable& b, const MatchOptions& options) {
    if (a.schema() != b.schema()) return {false, "schemas differ"};
    if (a.row_count() != b.row_count()) {
        return {false, fmt::format("row counts differ: {} vs {}", a.row_count(), b.row_count())};
    }
    std::vector<std::size_t> oa(a.row_count()), ob(b.row_count());
    if (options.ordered) {
        std::iota(oa.begin(), oa.end(), 0);
        std::iota(ob.begin(), ob.end(), 0);
    } else {
        oa = canonical_order(a);
        ob = canonical_order(b);
    }
    for (std::size_t i = 0; i < oa.size(); ++i) {
        for (std::size_t c = 0; c < a.column_count(); ++c) {
            bool same = true;
            if (a.column(c).type == ColumnType::Float64) {
                same = nearly_equal(a.floats(c)[oa[i]], b.floats(c)[ob[i]], options.relative_tolerance);
            } else if (a.column(c).type == ColumnType::String) {
                same = a.strings(c)[oa[i]] == b.strings(c)[ob[i]];
            } else {
                same = a.ints(c)[oa[i]] == b.ints(c)[ob[i]];
            }
            if (!same) {
                return {false, fmt::format("row {} column '{}' differs: {} vs {}", i, a.column(c).name,
                                           cell_text(a, oa[i], c), cell_text(b, ob[i], c))};
            }
        }
    }
    return {};
}

}  // namespace abr
