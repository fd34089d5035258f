#include "abr/plan.hpp"

#include <charconv>
#include <set>

#include <fmt/core.h>

#include "abr/date.hpp"
#include "abr/error.hpp"

namespace abr {

std::string_view to_string(PlanClass plan_class) {
    switch (plan_class) {
        case PlanClass::Filter: return "FILTER";
        case PlanClass::Join: return "JOIN";
        case PlanClass::GroupBy: return "GROUPBY";
        case PlanClass::JoinGroupByTopK: return "JOIN_GROUPBY_TOPK";
    }
    return "?";
}

namespace {

[[noreturn]] void unsupported(const std::string& why) { throw Error(ErrorCode::UnsupportedShape, why); }

class Binder {
public:
    Binder(const std::vector<const TableSchema*>& sources) : sources_(sources) {}

    ScalarExpr bind(const ScalarExpr& e) const {
        switch (e.kind()) {
            case ScalarExpr::Kind::Column: return bind_column(e);
            case ScalarExpr::Kind::Literal: return bind_literal(e.literal_value());
            case ScalarExpr::Kind::Binary: {
                auto l = bind(e.lhs());
                auto r = bind(e.rhs());
                if (!is_numeric(l.type()) || !is_numeric(r.type())) {
                    throw Error(ErrorCode::TypeMismatch,
                                fmt::format("{} needs numeric operands, got {} and {}", to_string(e.op()),
                                            to_string(l.type()), to_string(r.type())));
                }
                const auto t = l.type() == ColumnType::Float64 || r.type() == ColumnType::Float64
                                   ? ColumnType::Float64
                                   : ColumnType::Int32;
                return ScalarExpr::typed_binary(e.op(), std::move(l), std::move(r), t);
            }
        }
        return e;
    }

    ScalarExpr bind_column(const ScalarExpr& e) const {
        const auto& name = e.column_name();
        if (e.table()) {
            for (std::size_t s = 0; s < sources_.size(); ++s) {
                if (sources_[s]->name != *e.table()) continue;
                const auto idx = sources_[s]->find(name);
                if (idx == std::string::npos) {
                    throw Error(ErrorCode::UnknownColumn,
                                fmt::format("table '{}' has no column '{}'", *e.table(), name));
                }
                return ScalarExpr::bound_column(*e.table(), name, static_cast<int>(s),
                                                sources_[s]->columns[idx].type);
            }
            throw Error(ErrorCode::UnknownTable, fmt::format("table '{}' is not in FROM", *e.table()));
        }
        std::optional<ScalarExpr> found;
        for (std::size_t s = 0; s < sources_.size(); ++s) {
            const auto idx = sources_[s]->find(name);
            if (idx == std::string::npos) continue;
            if (found) throw Error(ErrorCode::UnknownColumn, fmt::format("column '{}' is ambiguous", name));
            found = ScalarExpr::bound_column(sources_[s]->name, name, static_cast<int>(s),
                                             sources_[s]->columns[idx].type);
        }
        if (!found) throw Error(ErrorCode::UnknownColumn, fmt::format("no column '{}' in FROM tables", name));
        return *found;
    }

    static ScalarExpr bind_literal(const Literal& value) {
        return std::visit(
            [](const auto& v) -> ScalarExpr {
                using T = std::decay_t<decltype(v)>;
                if constexpr (std::is_same_v<T, std::int32_t>) return ScalarExpr::typed_literal(v, ColumnType::Int32);
                else if constexpr (std::is_same_v<T, double>) return ScalarExpr::typed_literal(v, ColumnType::Float64);
                else if constexpr (std::is_same_v<T, std::string>) return ScalarExpr::typed_literal(v, ColumnType::String);
                else if constexpr (std::is_same_v<T, Date>) return ScalarExpr::typed_literal(v, ColumnType::Date32);
                else return ScalarExpr::typed_literal(parse_date(v.text), ColumnType::Date32);
            },
            value);
    }

private:
    const std::vector<const TableSchema*>& sources_;
};

bool comparable(ColumnType a, ColumnType b) { return a == b || (is_numeric(a) && is_numeric(b)); }

bool same_column(const ScalarExpr& a, const ScalarExpr& b) {
    return a.source() == b.source() && a.column_name() == b.column_name();
}

}  // namespace

LogicalPlan to_plan(const QueryBuilder& builder, const Database& db) {
    const auto schemas = db.schemas();
    return to_plan(builder, schemas);
}

LogicalPlan to_plan(const QueryBuilder& builder, std::span<const TableSchema> catalog) {
    const auto& q = builder.clauses();
    LogicalPlan plan;

    if (q.sources.empty()) unsupported("query has no FROM table");
    if (q.sources.size() > 2) unsupported("at most two FROM tables are supported");
    if (q.sources.size() == 2 && q.sources[0] == q.sources[1]) unsupported("self-joins are not supported");
    std::vector<const TableSchema*> sources;
    for (const auto& name : q.sources) {
        const TableSchema* found = nullptr;
        for (const auto& s : catalog) {
            if (s.name == name) found = &s;
        }
        if (found == nullptr) throw Error(ErrorCode::UnknownTable, fmt::format("no table named '{}'", name));
        sources.push_back(found);
    }
    plan.sources = q.sources;
    if (q.projections.empty()) throw Error(ErrorCode::EmptyProjection, "query selects no fields");

    Binder binder(sources);

    for (const auto& p : q.predicates) {
        if (!p.lhs.is_column()) unsupported("predicate left-hand side must be a column");
        auto lhs = binder.bind(p.lhs);
        if (p.rhs.is_column()) {
            if (p.op != CompareOp::Eq) unsupported("non-equi join conditions are not supported");
            auto rhs = binder.bind(p.rhs);
            if (lhs.source() == rhs.source()) unsupported("column-to-column filters within one table are not supported");
            if (plan.join_key) unsupported("at most one join condition is supported");
            if (lhs.type() != rhs.type()) {
                throw Error(ErrorCode::TypeMismatch, fmt::format("join key types differ: {} vs {}",
                                                                 to_string(lhs.type()), to_string(rhs.type())));
            }
            if (lhs.type() == ColumnType::String) unsupported("STRING join keys are not supported");
            plan.join_key = JoinKey{std::move(lhs), std::move(rhs)};
            continue;
        }
        if (p.rhs.kind() != ScalarExpr::Kind::Literal) unsupported("predicate right-hand side must be a literal or column");
        auto value = binder.bind(p.rhs);
        if (!comparable(lhs.type(), value.type())) {
            throw Error(ErrorCode::TypeMismatch, fmt::format("cannot compare {} column '{}' with {} literal",
                                                             to_string(lhs.type()), lhs.column_name(),
                                                             to_string(value.type())));
        }
        std::optional<ScalarExpr> high;
        if (p.op == CompareOp::Between) {
            if (!p.high || p.high->kind() != ScalarExpr::Kind::Literal) unsupported("BETWEEN needs two literal bounds");
            high = binder.bind(*p.high);
            if (!comparable(lhs.type(), high->type())) {
                throw Error(ErrorCode::TypeMismatch, fmt::format("cannot compare {} column '{}' with {} literal",
                                                                 to_string(lhs.type()), lhs.column_name(),
                                                                 to_string(high->type())));
            }
        }
        plan.filters.push_back(Filter{p.op, std::move(lhs), std::move(value), std::move(high)});
    }
    if (sources.size() == 2 && !plan.join_key) unsupported("two FROM tables need an equi-join condition");

    for (const auto& k : q.group_keys) {
        if (!k.is_column()) unsupported("group keys must be columns");
        auto key = binder.bind(k);
        if (key.type() == ColumnType::String) unsupported("STRING group keys are not supported");
        plan.group_keys.push_back(std::move(key));
    }

    std::set<std::string> agg_names;
    for (const auto& a : q.aggregates) {
        Aggregate agg{a.func, std::nullopt, a.alias,
                      a.func == AggFunc::Count ? ColumnType::Int32 : ColumnType::Float64};
        if (a.func != AggFunc::Count) {
            if (!a.expr) unsupported(fmt::format("{} needs an argument", to_string(a.func)));
            auto e = binder.bind(*a.expr);
            if (!is_numeric(e.type())) {
                throw Error(ErrorCode::TypeMismatch,
                            fmt::format("{}({}) needs a numeric argument", to_string(a.func), render_expr(e)));
            }
            agg.expr = std::move(e);
        } else if (a.expr) {
            agg.expr = binder.bind(*a.expr);
        }
        if (!agg_names.insert(a.alias).second) unsupported(fmt::format("duplicate aggregate name '{}'", a.alias));
        plan.aggregates.push_back(std::move(agg));
    }

    std::set<std::string> out_names;
    std::size_t anonymous = 0;
    for (const auto& p : q.projections) {
        OutputColumn out{p.expr, {}, ColumnType::Int32};
        if (plan.aggregated()) {
            std::optional<std::size_t> agg_index;
            if (p.expr.is_column() && !p.expr.table()) {
                for (std::size_t i = 0; i < plan.aggregates.size(); ++i) {
                    if (plan.aggregates[i].alias == p.expr.column_name()) agg_index = i;
                }
            }
            if (agg_index) {
                out.kind = OutputKind::Aggregate;
                out.index = *agg_index;
                out.type = plan.aggregates[*agg_index].type;
                out.expr = p.expr;
                out.name = p.alias.empty() ? p.expr.column_name() : p.alias;
            } else {
                if (!p.expr.is_column()) unsupported("grouped output must be a group key or an aggregate");
                auto e = binder.bind(p.expr);
                std::optional<std::size_t> key_index;
                for (std::size_t i = 0; i < plan.group_keys.size(); ++i) {
                    if (same_column(plan.group_keys[i], e)) key_index = i;
                }
                if (!key_index) {
                    unsupported(fmt::format("output '{}' is neither a group key nor an aggregate", e.column_name()));
                }
                out.kind = OutputKind::GroupKey;
                out.index = *key_index;
                out.type = e.type();
                out.name = p.alias.empty() ? e.column_name() : p.alias;
                out.expr = std::move(e);
            }
        } else {
            out.expr = binder.bind(p.expr);
            out.type = out.expr.type();
            if (!p.alias.empty()) out.name = p.alias;
            else if (out.expr.is_column()) out.name = out.expr.column_name();
            else out.name = fmt::format("expr{}", anonymous++);
        }
        if (!out_names.insert(out.name).second) unsupported(fmt::format("duplicate output name '{}'", out.name));
        plan.projections.push_back(std::move(out));
    }

    if (q.limit) {
        if (*q.limit < 1) unsupported("LIMIT must be positive");
        if (!q.order_by) unsupported("LIMIT requires ORDER BY");
        plan.limit = q.limit;
    }
    if (q.order_by) {
        std::optional<std::size_t> idx;
        for (std::size_t i = 0; i < plan.projections.size(); ++i) {
            if (plan.projections[i].name == q.order_by->key) idx = i;
        }
        if (!idx) throw Error(ErrorCode::UnknownColumn, fmt::format("ORDER BY key '{}' is not an output", q.order_by->key));
        if (!plan.grouped() && !plan.limit) unsupported("ORDER BY without LIMIT is only supported on grouped output");
        plan.order_by = OrderBy{q.order_by->key, *idx, q.order_by->direction};
    }

    const bool grouped = plan.grouped();
    if (sources.size() == 1) plan.plan_class = grouped ? PlanClass::GroupBy : PlanClass::Filter;
    else plan.plan_class = grouped ? PlanClass::JoinGroupByTopK : PlanClass::Join;
    return plan;
}

std::string render_literal(const Literal& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::int32_t>) return fmt::format("i:{}", v);
            else if constexpr (std::is_same_v<T, double>) {
                char buf[64];
                auto res = std::to_chars(buf, buf + sizeof buf, v);
                return "f:" + std::string(buf, res.ptr);
            } else if constexpr (std::is_same_v<T, Date>) return "d:" + format_date(v);
            else if constexpr (std::is_same_v<T, DateText>) return "d'" + v.text + "'";
            else {
                std::string out = "s\"";
                for (char c : v) {
                    if (c == '"' || c == '\\') out.push_back('\\');
                    out.push_back(c);
                }
                return out + "\"";
            }
        },
        value);
}

std::string render_expr(const ScalarExpr& expr) {
    switch (expr.kind()) {
        case ScalarExpr::Kind::Column:
            return expr.table() ? *expr.table() + "." + expr.column_name() : expr.column_name();
        case ScalarExpr::Kind::Literal: return render_literal(expr.literal_value());
        case ScalarExpr::Kind::Binary: {
            const char* sym = expr.op() == ArithOp::Add ? "+" : expr.op() == ArithOp::Sub ? "-" : "*";
            return "(" + render_expr(expr.lhs()) + sym + render_expr(expr.rhs()) + ")";
        }
    }
    return "?";
}

std::string plan_digest(const LogicalPlan& plan) {
    std::string out = fmt::format("class={};sources=[", to_string(plan.plan_class));
    for (std::size_t i = 0; i < plan.sources.size(); ++i) out += (i ? "," : "") + plan.sources[i];
    out += "];join=";
    if (plan.join_key) out += render_expr(plan.join_key->left) + "=" + render_expr(plan.join_key->right);
    out += ";filters=[";
    for (std::size_t i = 0; i < plan.filters.size(); ++i) {
        const auto& f = plan.filters[i];
        out += fmt::format("{}{}({},{}", i ? "," : "", to_string(f.op), render_expr(f.column), render_expr(f.value));
        if (f.high) out += "," + render_expr(*f.high);
        out += ")";
    }
    out += "];groupKeys=[";
    for (std::size_t i = 0; i < plan.group_keys.size(); ++i) out += (i ? "," : "") + render_expr(plan.group_keys[i]);
    out += "];aggregates=[";
    for (std::size_t i = 0; i < plan.aggregates.size(); ++i) {
        const auto& a = plan.aggregates[i];
        out += fmt::format("{}{}({}) AS {}", i ? "," : "", to_string(a.func),
                           a.expr ? render_expr(*a.expr) : "*", a.alias);
    }
    out += "];projections=[";
    for (std::size_t i = 0; i < plan.projections.size(); ++i) {
        const auto& p = plan.projections[i];
        out += fmt::format("{}{} AS {}:{}", i ? "," : "", render_expr(p.expr), p.name, to_string(p.type));
    }
    out += "];orderBy=";
    if (plan.order_by) out += fmt::format("{} {}", plan.order_by->key, to_string(plan.order_by->direction));
    out += ";limit=";
    if (plan.limit) out += std::to_string(*plan.limit);
    return out;
}

}  // namespace abr
