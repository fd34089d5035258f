#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "abr/storage.hpp"
#include "abr/types.hpp"

namespace abr {

/// INT32 and DATE32 columns both use the int32 vector.
using ColumnValues = std::variant<std::vector<std::int32_t>, std::vector<double>, std::vector<std::string>>;

struct ResultColumn {
    std::string name;
    ColumnType type;
    ColumnValues values;

    std::size_t size() const;
    friend bool operator==(const ResultColumn&, const ResultColumn&) = default;
};

/// Columnar query output.
class ResultTable {
public:
    ResultTable() = default;
    explicit ResultTable(std::span<const ColumnDef> schema);

    std::vector<ColumnDef> schema() const;
    std::size_t row_count() const;
    std::size_t column_count() const { return columns_.size(); }

    const ResultColumn& column(std::size_t i) const { return columns_[i]; }
    ResultColumn& column(std::size_t i) { return columns_[i]; }
    /// Throws UnknownColumn.
    std::size_t column_index(std::string_view name) const;

    std::vector<std::int32_t>& ints(std::size_t i) { return std::get<0>(columns_[i].values); }
    std::vector<double>& floats(std::size_t i) { return std::get<1>(columns_[i].values); }
    std::vector<std::string>& strings(std::size_t i) { return std::get<2>(columns_[i].values); }
    const std::vector<std::int32_t>& ints(std::size_t i) const { return std::get<0>(columns_[i].values); }
    const std::vector<double>& floats(std::size_t i) const { return std::get<1>(columns_[i].values); }
    const std::vector<std::string>& strings(std::size_t i) const { return std::get<2>(columns_[i].values); }

    Value value(std::size_t row, std::size_t column) const;
    void append_row(std::span<const Value> row);

    friend bool operator==(const ResultTable&, const ResultTable&) = default;

private:
    std::vector<ResultColumn> columns_;
};

/// Rows `rows` of `table`, in that order.
ResultTable gather(const ResultTable& table, std::span<const std::size_t> rows);

/// Adds `result` as table `name` to an unsealed database.
void ingest_result(Database& db, const std::string& name, const ResultTable& result);

/// Successor database: a copy of `base` plus `result` as table `name`,
/// sealed. `base` is not modified.
Database materialize(const Database& base, const std::string& name, const ResultTable& result);

/// Aligned text rendering with a header row.
std::string format_table(const ResultTable& table, std::size_t max_rows = 100);

struct MatchOptions {
    double relative_tolerance = 1e-9;
    /// Compare as sequences; otherwise as multisets.
    bool ordered = false;
};

struct MatchReport {
    bool matches = true;
    std::string detail;
};

/// Schema and contents agreement. Integer, date and string cells must be
/// equal; FLOAT64 cells may differ by the relative tolerance.
MatchReport compare_results(const ResultTable& a, const ResultTable& b, const MatchOptions& options = {});

bool nearly_equal(double a, double b, double relative_tolerance);

}  // namespace abr
