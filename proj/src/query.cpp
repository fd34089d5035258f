#include "abr/query.hpp"

#include <bit>

namespace abr {

std::string_view to_string(ArithOp op) {
    switch (op) {
        case ArithOp::Add: return "ADD";
        case ArithOp::Sub: return "SUB";
        case ArithOp::Mul: return "MUL";
    }
    return "?";
}

std::string_view to_string(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "EQ";
        case CompareOp::Lt: return "LT";
        case CompareOp::Gt: return "GT";
        case CompareOp::Le: return "LE";
        case CompareOp::Ge: return "GE";
        case CompareOp::Between: return "BETWEEN";
    }
    return "?";
}

std::string_view to_string(AggFunc func) {
    switch (func) {
        case AggFunc::Count: return "COUNT";
        case AggFunc::Sum: return "SUM";
        case AggFunc::Avg: return "AVG";
    }
    return "?";
}

std::string_view to_string(SortDirection dir) { return dir == SortDirection::Asc ? "ASC" : "DESC"; }

struct ColumnNode {
    std::optional<std::string> table;
    std::string name;
    int source = -1;
};

struct BinaryNode {
    ArithOp op;
    ScalarExpr lhs;
    ScalarExpr rhs;
};

struct ScalarExpr::Node {
    std::variant<ColumnNode, Literal, BinaryNode> v;
    ColumnType type = ColumnType::Int32;
};

ScalarExpr ScalarExpr::column(std::string name) {
    return ScalarExpr(std::make_shared<const Node>(Node{ColumnNode{std::nullopt, std::move(name), -1}}));
}

ScalarExpr ScalarExpr::column(std::string table, std::string name) {
    return ScalarExpr(std::make_shared<const Node>(Node{ColumnNode{std::move(table), std::move(name), -1}}));
}

ScalarExpr ScalarExpr::literal(Literal value) {
    return ScalarExpr(std::make_shared<const Node>(Node{std::move(value)}));
}

ScalarExpr ScalarExpr::binary(ArithOp op, ScalarExpr lhs, ScalarExpr rhs) {
    return ScalarExpr(std::make_shared<const Node>(Node{BinaryNode{op, std::move(lhs), std::move(rhs)}}));
}

ScalarExpr ScalarExpr::bound_column(std::string table, std::string name, int source, ColumnType type) {
    return ScalarExpr(std::make_shared<const Node>(
        Node{ColumnNode{std::move(table), std::move(name), source}, type}));
}

ScalarExpr ScalarExpr::typed_literal(Literal value, ColumnType type) {
    return ScalarExpr(std::make_shared<const Node>(Node{std::move(value), type}));
}

ScalarExpr ScalarExpr::typed_binary(ArithOp op, ScalarExpr lhs, ScalarExpr rhs, ColumnType type) {
    return ScalarExpr(std::make_shared<const Node>(
        Node{BinaryNode{op, std::move(lhs), std::move(rhs)}, type}));
}

ScalarExpr::Kind ScalarExpr::kind() const { return static_cast<Kind>(node_->v.index()); }

const std::optional<std::string>& ScalarExpr::table() const { return std::get<ColumnNode>(node_->v).table; }
const std::string& ScalarExpr::column_name() const { return std::get<ColumnNode>(node_->v).name; }
int ScalarExpr::source() const { return std::get<ColumnNode>(node_->v).source; }
const Literal& ScalarExpr::literal_value() const { return std::get<Literal>(node_->v); }
ArithOp ScalarExpr::op() const { return std::get<BinaryNode>(node_->v).op; }
const ScalarExpr& ScalarExpr::lhs() const { return std::get<BinaryNode>(node_->v).lhs; }
const ScalarExpr& ScalarExpr::rhs() const { return std::get<BinaryNode>(node_->v).rhs; }
ColumnType ScalarExpr::type() const { return node_->type; }

bool operator==(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.type() != b.type()) return false;
    switch (a.kind()) {
        case ScalarExpr::Kind::Column:
            return a.table() == b.table() && a.column_name() == b.column_name() &&
                   a.source() == b.source();
        case ScalarExpr::Kind::Literal: {
            // Bitwise for doubles so that digests and equality agree.
            const auto& la = a.literal_value();
            const auto& lb = b.literal_value();
            if (la.index() != lb.index()) return false;
            if (const auto* da = std::get_if<double>(&la)) {
                return std::bit_cast<std::uint64_t>(*da) == std::bit_cast<std::uint64_t>(std::get<double>(lb));
            }
            return la == lb;
        }
        case ScalarExpr::Kind::Binary:
            return a.op() == b.op() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
    return false;
}

ScalarExpr operator+(ScalarExpr lhs, ScalarExpr rhs) {
    return ScalarExpr::binary(ArithOp::Add, std::move(lhs), std::move(rhs));
}
ScalarExpr operator-(ScalarExpr lhs, ScalarExpr rhs) {
    return ScalarExpr::binary(ArithOp::Sub, std::move(lhs), std::move(rhs));
}
ScalarExpr operator*(ScalarExpr lhs, ScalarExpr rhs) {
    return ScalarExpr::binary(ArithOp::Mul, std::move(lhs), std::move(rhs));
}

AggSpec AggSpec::as(std::string name) const {
    AggSpec copy = *this;
    copy.alias = std::move(name);
    return copy;
}

namespace sql {

ScalarExpr col(std::string name) { return ScalarExpr::column(std::move(name)); }
ScalarExpr col(std::string table, std::string name) {
    return ScalarExpr::column(std::move(table), std::move(name));
}
ScalarExpr lit(std::int32_t value) { return ScalarExpr::literal(value); }
ScalarExpr lit(double value) { return ScalarExpr::literal(value); }
ScalarExpr lit(std::string value) { return ScalarExpr::literal(std::move(value)); }
ScalarExpr lit(const char* value) { return ScalarExpr::literal(std::string(value)); }
ScalarExpr date(std::string text) { return ScalarExpr::literal(DateText{std::move(text)}); }

Predicate eq(ColumnArg lhs, Operand rhs) { return {CompareOp::Eq, std::move(lhs.expr), std::move(rhs.expr), {}}; }
Predicate lt(ColumnArg lhs, Operand rhs) { return {CompareOp::Lt, std::move(lhs.expr), std::move(rhs.expr), {}}; }
Predicate gt(ColumnArg lhs, Operand rhs) { return {CompareOp::Gt, std::move(lhs.expr), std::move(rhs.expr), {}}; }
Predicate le(ColumnArg lhs, Operand rhs) { return {CompareOp::Le, std::move(lhs.expr), std::move(rhs.expr), {}}; }
Predicate ge(ColumnArg lhs, Operand rhs) { return {CompareOp::Ge, std::move(lhs.expr), std::move(rhs.expr), {}}; }
Predicate between(ColumnArg lhs, Operand low, Operand high) {
    return {CompareOp::Between, std::move(lhs.expr), std::move(low.expr), std::move(high.expr)};
}

AggSpec count() { return {AggFunc::Count, std::nullopt, "count"}; }
AggSpec sum(ColumnArg expr) { return {AggFunc::Sum, std::move(expr.expr), "sum"}; }
AggSpec avg(ColumnArg expr) { return {AggFunc::Avg, std::move(expr.expr), "avg"}; }

QueryBuilder select() { return {}; }

}  // namespace sql

QueryBuilder& QueryBuilder::field(ColumnArg expr) {
    clauses_.projections.push_back({std::move(expr.expr), ""});
    return *this;
}

QueryBuilder& QueryBuilder::field(ColumnArg expr, std::string alias) {
    clauses_.projections.push_back({std::move(expr.expr), std::move(alias)});
    return *this;
}

QueryBuilder& QueryBuilder::field(AggSpec aggregate) {
    clauses_.projections.push_back({ScalarExpr::column(aggregate.alias), aggregate.alias});
    clauses_.aggregates.push_back(std::move(aggregate));
    return *this;
}

QueryBuilder& QueryBuilder::field(AggSpec aggregate, std::string alias) {
    aggregate.alias = std::move(alias);
    return field(std::move(aggregate));
}

QueryBuilder& QueryBuilder::from(std::string table) {
    clauses_.sources.push_back(std::move(table));
    return *this;
}

QueryBuilder& QueryBuilder::where(Predicate predicate) {
    clauses_.predicates.push_back(std::move(predicate));
    return *this;
}

QueryBuilder& QueryBuilder::group_by(ColumnArg key) {
    clauses_.group_keys.push_back(std::move(key.expr));
    return *this;
}

QueryBuilder& QueryBuilder::order_by(std::string key, SortDirection direction) {
    clauses_.order_by = OrderSpec{std::move(key), direction};
    return *this;
}

QueryBuilder& QueryBuilder::limit(std::int64_t n) {
    clauses_.limit = n;
    return *this;
}

}  // namespace abr
