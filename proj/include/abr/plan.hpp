#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "abr/query.hpp"
#include "abr/storage.hpp"

namespace abr {

/// The fixed physical plan shapes the compiler has templates for.
enum class PlanClass { Filter, Join, GroupBy, JoinGroupByTopK };

std::string_view to_string(PlanClass plan_class);

/// Equi-join condition as written; `left` may belong to either source.
struct JoinKey {
    ScalarExpr left;
    ScalarExpr right;
};

/// Single-column predicate against constants. `value` and `high` are
/// literals with dates already converted.
struct Filter {
    CompareOp op;
    ScalarExpr column;
    ScalarExpr value;
    std::optional<ScalarExpr> high;
};

struct Aggregate {
    AggFunc func;
    std::optional<ScalarExpr> expr;
    std::string alias;
    ColumnType type;  // COUNT -> INT32, SUM/AVG -> FLOAT64
};

enum class OutputKind { Row, GroupKey, Aggregate };

/// One column of the query result. `index` points into group_keys or
/// aggregates for those kinds; `expr` is used for per-row outputs.
struct OutputColumn {
    ScalarExpr expr;
    std::string name;
    ColumnType type;
    OutputKind kind = OutputKind::Row;
    std::size_t index = 0;
};

struct OrderBy {
    std::string key;
    std::size_t output;  // index into projections
    SortDirection direction;
};

/// Validated, classified query. All column references are bound to a source
/// index (0 or 1, the order of `sources`) and typed.
struct LogicalPlan {
    PlanClass plan_class = PlanClass::Filter;
    std::vector<std::string> sources;
    std::optional<JoinKey> join_key;
    std::vector<Filter> filters;
    std::vector<ScalarExpr> group_keys;
    std::vector<Aggregate> aggregates;
    std::vector<OutputColumn> projections;
    std::optional<OrderBy> order_by;
    std::optional<std::int64_t> limit;

    bool grouped() const { return !group_keys.empty(); }
    /// True when the query produces one row per group (or a single global
    /// row) instead of one row per qualifying input row.
    bool aggregated() const { return grouped() || !aggregates.empty(); }
    bool joined() const { return sources.size() == 2; }
};

LogicalPlan to_plan(const QueryBuilder& builder, std::span<const TableSchema> catalog);
LogicalPlan to_plan(const QueryBuilder& builder, const Database& db);

/// Canonical one-line rendering; equal plans give equal digests.
std::string plan_digest(const LogicalPlan& plan);

/// Renders a literal the way digests and error messages show it.
std::string render_literal(const Literal& value);
std::string render_expr(const ScalarExpr& expr);

}  // namespace abr
