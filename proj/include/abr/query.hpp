#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "abr/types.hpp"

namespace abr {

enum class ArithOp { Add, Sub, Mul };
enum class CompareOp { Eq, Lt, Gt, Le, Ge, Between };
enum class AggFunc { Count, Sum, Avg };
enum class SortDirection { Asc, Desc };

std::string_view to_string(ArithOp op);
std::string_view to_string(CompareOp op);
std::string_view to_string(AggFunc func);
std::string_view to_string(SortDirection dir);

/// A date literal as written in a query; converted to `Date` at plan time.
struct DateText {
    std::string text;
    friend bool operator==(const DateText&, const DateText&) = default;
};

using Literal = std::variant<std::int32_t, double, std::string, Date, DateText>;

/// Immutable scalar expression tree: a column reference, a literal, or a
/// binary arithmetic node. Copies share structure.
///
/// Column references carry their source index and every node its result
/// type once the expression has gone through planning; before that,
/// `source()` is -1 and `type()` is meaningless.
class ScalarExpr {
public:
    enum class Kind { Column, Literal, Binary };

    static ScalarExpr column(std::string name);
    static ScalarExpr column(std::string table, std::string name);
    static ScalarExpr literal(Literal value);
    static ScalarExpr binary(ArithOp op, ScalarExpr lhs, ScalarExpr rhs);

    // Resolved forms, produced by planning.
    static ScalarExpr bound_column(std::string table, std::string name, int source, ColumnType type);
    static ScalarExpr typed_literal(Literal value, ColumnType type);
    static ScalarExpr typed_binary(ArithOp op, ScalarExpr lhs, ScalarExpr rhs, ColumnType type);

    Kind kind() const;
    bool is_column() const { return kind() == Kind::Column; }

    const std::optional<std::string>& table() const;
    const std::string& column_name() const;
    int source() const;

    const Literal& literal_value() const;

    ArithOp op() const;
    const ScalarExpr& lhs() const;
    const ScalarExpr& rhs() const;

    ColumnType type() const;

    friend bool operator==(const ScalarExpr& a, const ScalarExpr& b);

private:
    struct Node;
    explicit ScalarExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

ScalarExpr operator+(ScalarExpr lhs, ScalarExpr rhs);
ScalarExpr operator-(ScalarExpr lhs, ScalarExpr rhs);
ScalarExpr operator*(ScalarExpr lhs, ScalarExpr rhs);

namespace sql {

ScalarExpr col(std::string name);
ScalarExpr col(std::string table, std::string name);
ScalarExpr lit(std::int32_t value);
ScalarExpr lit(double value);
ScalarExpr lit(std::string value);
ScalarExpr lit(const char* value);
ScalarExpr date(std::string text);

}  // namespace sql

/// Left-hand side of a predicate or a group key: a bare string names a column.
struct ColumnArg {
    ScalarExpr expr;
    ColumnArg(const char* name) : expr(ScalarExpr::column(name)) {}
    ColumnArg(std::string name) : expr(ScalarExpr::column(std::move(name))) {}
    ColumnArg(ScalarExpr e) : expr(std::move(e)) {}
};

/// Right-hand side of a predicate: a bare string is a STRING literal; use
/// `sql::col` to reference a column.
struct Operand {
    ScalarExpr expr;
    Operand(int value) : expr(sql::lit(static_cast<std::int32_t>(value))) {}
    Operand(double value) : expr(sql::lit(value)) {}
    Operand(const char* value) : expr(sql::lit(value)) {}
    Operand(std::string value) : expr(sql::lit(std::move(value))) {}
    Operand(ScalarExpr e) : expr(std::move(e)) {}
};

struct Predicate {
    CompareOp op;
    ScalarExpr lhs;
    ScalarExpr rhs;
    std::optional<ScalarExpr> high;  // BETWEEN upper bound (inclusive)
    friend bool operator==(const Predicate&, const Predicate&) = default;
};

namespace sql {

Predicate eq(ColumnArg lhs, Operand rhs);
Predicate lt(ColumnArg lhs, Operand rhs);
Predicate gt(ColumnArg lhs, Operand rhs);
Predicate le(ColumnArg lhs, Operand rhs);
Predicate ge(ColumnArg lhs, Operand rhs);
Predicate between(ColumnArg lhs, Operand low, Operand high);

}  // namespace sql

struct AggSpec {
    AggFunc func;
    std::optional<ScalarExpr> expr;  // absent for COUNT(*)
    std::string alias;

    AggSpec as(std::string name) const;
    friend bool operator==(const AggSpec&, const AggSpec&) = default;
};

namespace sql {

AggSpec count();
AggSpec sum(ColumnArg expr);
AggSpec avg(ColumnArg expr);

}  // namespace sql

struct Projection {
    ScalarExpr expr;
    std::string alias;  // empty: column name for column refs, "exprN" otherwise
    friend bool operator==(const Projection&, const Projection&) = default;
};

struct OrderSpec {
    std::string key;  // output name
    SortDirection direction = SortDirection::Asc;
    friend bool operator==(const OrderSpec&, const OrderSpec&) = default;
};

/// Raw clauses collected by the builder, in call order per clause.
/// Aggregate fields appear both in `aggregates` and as a projection whose
/// expression is an unqualified column ref naming the aggregate's alias.
struct QueryClauses {
    std::vector<std::string> sources;
    std::vector<Projection> projections;
    std::vector<AggSpec> aggregates;
    std::vector<Predicate> predicates;
    std::vector<ScalarExpr> group_keys;
    std::optional<OrderSpec> order_by;
    std::optional<std::int64_t> limit;
    friend bool operator==(const QueryClauses&, const QueryClauses&) = default;
};

/// Method-chaining query front end. Calls may come in any order; nothing is
/// validated until `to_plan`.
class QueryBuilder {
public:
    QueryBuilder& field(ColumnArg expr);
    QueryBuilder& field(ColumnArg expr, std::string alias);
    QueryBuilder& field(AggSpec aggregate);
    QueryBuilder& field(AggSpec aggregate, std::string alias);
    QueryBuilder& from(std::string table);
    QueryBuilder& where(Predicate predicate);
    QueryBuilder& group_by(ColumnArg key);
    template <class... Rest>
    QueryBuilder& group_by(ColumnArg key, ColumnArg next, Rest&&... rest) {
        group_by(std::move(key));
        return group_by(std::move(next), std::forward<Rest>(rest)...);
    }
    QueryBuilder& order_by(std::string key, SortDirection direction = SortDirection::Asc);
    QueryBuilder& limit(std::int64_t n);

    const QueryClauses& clauses() const { return clauses_; }
    QueryClauses& clauses() { return clauses_; }

    friend bool operator==(const QueryBuilder&, const QueryBuilder&) = default;

private:
    QueryClauses clauses_;
};

namespace sql {

QueryBuilder select();

}  // namespace sql

}  // namespace abr
