#include "abr/plan_json.hpp"

#include <fmt/core.h>

#include "abr/date.hpp"
#include "abr/error.hpp"

namespace abr {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidDescriptor, what); }

const Json& field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) bad(fmt::format("missing field '{}'", name));
    return j.at(name);
}

std::string text(const Json& j, const char* what) {
    if (!j.is_string()) bad(fmt::format("'{}' must be a string", what));
    return j.get<std::string>();
}

template <class E, std::size_t N>
E parse_enum(const Json& j, const E (&all)[N], const char* what) {
    const auto s = text(j, what);
    for (E e : all) {
        if (to_string(e) == s) return e;
    }
    bad(fmt::format("unknown {} '{}'", what, s));
}

constexpr ArithOp kArith[] = {ArithOp::Add, ArithOp::Sub, ArithOp::Mul};
constexpr CompareOp kCompare[] = {CompareOp::Eq, CompareOp::Lt, CompareOp::Gt,
                                  CompareOp::Le, CompareOp::Ge, CompareOp::Between};
constexpr AggFunc kAgg[] = {AggFunc::Count, AggFunc::Sum, AggFunc::Avg};
constexpr SortDirection kDir[] = {SortDirection::Asc, SortDirection::Desc};

Json literal_to_json(const Literal& lit) {
    return std::visit(
        [&](const auto& v) -> Json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Date>) return {{"literal", format_date(v)}, {"type", "DATE32"}};
            else if constexpr (std::is_same_v<T, DateText>) return {{"literal", v.text}, {"type", "DATE32"}};
            else if constexpr (std::is_same_v<T, std::int32_t>) return {{"literal", v}, {"type", "INT32"}};
            else if constexpr (std::is_same_v<T, double>) return {{"literal", v}, {"type", "FLOAT64"}};
            else return {{"literal", v}, {"type", "STRING"}};
        },
        lit);
}

}  // namespace

Json expr_to_json(const ScalarExpr& expr) {
    switch (expr.kind()) {
        case ScalarExpr::Kind::Column: {
            Json j{{"column", expr.column_name()}};
            if (expr.table()) j["table"] = *expr.table();
            return j;
        }
        case ScalarExpr::Kind::Literal: return literal_to_json(expr.literal_value());
        case ScalarExpr::Kind::Binary:
            return {{"op", to_string(expr.op())}, {"left", expr_to_json(expr.lhs())}, {"right", expr_to_json(expr.rhs())}};
    }
    return {};
}

ScalarExpr expr_from_json(const Json& j) {
    if (!j.is_object()) bad("expression must be an object");
    if (j.contains("column")) {
        auto name = text(j["column"], "column");
        if (j.contains("table") && !j["table"].is_null()) return sql::col(text(j["table"], "table"), std::move(name));
        return sql::col(std::move(name));
    }
    if (j.contains("literal")) {
        const auto& v = j["literal"];
        std::string type;
        if (j.contains("type")) type = text(j["type"], "type");
        else if (v.is_number_integer()) type = "INT32";
        else if (v.is_number()) type = "FLOAT64";
        else type = "STRING";
        const auto t = parse_column_type(type);
        switch (t) {
            case ColumnType::Int32: {
                if (!v.is_number_integer()) bad("INT32 literal must be an integer");
                const auto n = v.get<std::int64_t>();
                if (n < INT32_MIN || n > INT32_MAX) bad("INT32 literal out of range");
                return sql::lit(static_cast<std::int32_t>(n));
            }
            case ColumnType::Float64:
                if (!v.is_number()) bad("FLOAT64 literal must be a number");
                return sql::lit(v.get<double>());
            case ColumnType::Date32: return sql::date(text(v, "literal"));
            case ColumnType::String: return sql::lit(text(v, "literal"));
        }
    }
    if (j.contains("op")) {
        return ScalarExpr::binary(parse_enum(j["op"], kArith, "operator"), expr_from_json(field(j, "left")),
                                  expr_from_json(field(j, "right")));
    }
    bad("expression needs 'column', 'literal' or 'op'");
}

Json plan_to_json(const LogicalPlan& plan) {
    Json j;
    j["planClass"] = to_string(plan.plan_class);
    j["sources"] = plan.sources;
    j["joinKey"] = plan.join_key ? Json{{"left", expr_to_json(plan.join_key->left)},
                                        {"right", expr_to_json(plan.join_key->right)}}
                                 : Json(nullptr);
    j["filters"] = Json::array();
    for (const auto& f : plan.filters) {
        Json jf{{"op", to_string(f.op)}, {"column", expr_to_json(f.column)}, {"value", expr_to_json(f.value)}};
        if (f.high) jf["high"] = expr_to_json(*f.high);
        j["filters"].push_back(std::move(jf));
    }
    j["groupKeys"] = Json::array();
    for (const auto& k : plan.group_keys) j["groupKeys"].push_back(expr_to_json(k));
    j["aggregates"] = Json::array();
    for (const auto& a : plan.aggregates) {
        j["aggregates"].push_back(
            {{"func", to_string(a.func)}, {"expr", a.expr ? expr_to_json(*a.expr) : Json(nullptr)}, {"alias", a.alias}});
    }
    j["projections"] = Json::array();
    for (const auto& p : plan.projections) {
        const Json e = p.kind == OutputKind::Aggregate ? Json{{"column", plan.aggregates[p.index].alias}}
                                                       : expr_to_json(p.expr);
        j["projections"].push_back({{"expr", e}, {"alias", p.name}});
    }
    j["orderBy"] = plan.order_by ? Json{{"key", plan.order_by->key}, {"direction", to_string(plan.order_by->direction)}}
                                 : Json(nullptr);
    j["limit"] = plan.limit ? Json(*plan.limit) : Json(nullptr);
    return j;
}

QueryBuilder query_from_json(const Json& d) {
    if (!d.is_object()) bad("plan descriptor must be an object");
    QueryBuilder q;
    auto& c = q.clauses();
    const auto& sources = field(d, "sources");
    if (!sources.is_array()) bad("'sources' must be an array");
    for (const auto& s : sources) c.sources.push_back(text(s, "source"));

    if (d.contains("joinKey") && !d["joinKey"].is_null()) {
        const auto& jk = d["joinKey"];
        c.predicates.push_back(
            {CompareOp::Eq, expr_from_json(field(jk, "left")), expr_from_json(field(jk, "right")), std::nullopt});
    }
    if (d.contains("filters")) {
        for (const auto& f : d["filters"]) {
            Predicate p{parse_enum(field(f, "op"), kCompare, "comparison"), expr_from_json(field(f, "column")),
                        expr_from_json(field(f, "value")), std::nullopt};
            if (p.op == CompareOp::Between) p.high = expr_from_json(field(f, "high"));
            c.predicates.push_back(std::move(p));
        }
    }
    if (d.contains("groupKeys")) {
        for (const auto& k : d["groupKeys"]) c.group_keys.push_back(expr_from_json(k));
    }
    if (d.contains("aggregates")) {
        for (const auto& a : d["aggregates"]) {
            AggSpec spec{parse_enum(field(a, "func"), kAgg, "aggregate"), std::nullopt, text(field(a, "alias"), "alias")};
            if (a.contains("expr") && !a["expr"].is_null()) spec.expr = expr_from_json(a["expr"]);
            c.aggregates.push_back(std::move(spec));
        }
    }
    const auto& projections = field(d, "projections");
    if (!projections.is_array()) bad("'projections' must be an array");
    for (const auto& p : projections) {
        std::string alias;
        if (p.contains("alias") && !p["alias"].is_null()) alias = text(p["alias"], "alias");
        c.projections.push_back({expr_from_json(field(p, "expr")), std::move(alias)});
    }
    if (d.contains("orderBy") && !d["orderBy"].is_null()) {
        const auto& o = d["orderBy"];
        c.order_by = OrderSpec{text(field(o, "key"), "key"),
                               o.contains("direction") ? parse_enum(o["direction"], kDir, "direction")
                                                       : SortDirection::Asc};
    }
    if (d.contains("limit") && !d["limit"].is_null()) {
        if (!d["limit"].is_number_integer()) bad("'limit' must be an integer");
        c.limit = d["limit"].get<std::int64_t>();
    }
    return q;
}

Json result_to_json(const ResultTable& table, const ResultTiming& timing) {
    Json columns = Json::array();
    for (std::size_t i = 0; i < table.column_count(); ++i) {
        const auto& col = table.column(i);
        Json values = Json::array();
        switch (col.type) {
            case ColumnType::Int32:
                for (auto v : table.ints(i)) values.push_back(v);
                break;
            case ColumnType::Date32:
                for (auto v : table.ints(i)) values.push_back(format_date(Date{v}));
                break;
            case ColumnType::Float64:
                for (auto v : table.floats(i)) values.push_back(v);
                break;
            case ColumnType::String:
                for (const auto& v : table.strings(i)) values.push_back(v);
                break;
        }
        columns.push_back({{"name", col.name}, {"type", to_string(col.type)}, {"values", std::move(values)}});
    }
    auto ms = [](std::chrono::nanoseconds ns) { return static_cast<double>(ns.count()) / 1e6; };
    return {{"columns", std::move(columns)},
            {"stats", {{"compileMs", ms(timing.compile)}, {"execMs", ms(timing.exec)}, {"rows", table.row_count()}}}};
}

ResultTable result_from_json(const Json& j) {
    const auto& columns = field(j, "columns");
    std::vector<ColumnDef> schema;
    for (const auto& c : columns) schema.push_back({text(field(c, "name"), "name"), parse_column_type(text(field(c, "type"), "type"))});
    ResultTable out(schema);
    for (std::size_t i = 0; i < schema.size(); ++i) {
        const auto& values = field(columns[i], "values");
        for (const auto& v : values) {
            switch (schema[i].type) {
                case ColumnType::Int32: out.ints(i).push_back(v.get<std::int32_t>()); break;
                case ColumnType::Date32: out.ints(i).push_back(parse_date(v.get<std::string>()).days); break;
                case ColumnType::Float64: out.floats(i).push_back(v.get<double>()); break;
                case ColumnType::String: out.strings(i).push_back(v.get<std::string>()); break;
            }
        }
        if (out.column(i).size() != out.column(0).size()) bad("result columns differ in length");
    }
    return out;
}

}  // namespace abr
