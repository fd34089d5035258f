#include "abr/queries.hpp"

#include "abr/error.hpp"

namespace abr {

using namespace sql;

namespace {

ScalarExpr discounted_price() { return col("l_extendedprice") * (lit(1) - col("l_discount")); }

QueryBuilder january_revenue() {
    return select()
        .field("l_orderkey")
        .field(sum(discounted_price()).as("revenue"))
        .field("o_orderdate")
        .field("o_shippriority")
        .from("orders")
        .from("lineitem")
        .where(eq("l_orderkey", col("o_orderkey")))
        .where(between("o_orderdate", date("1996-01-01"), date("1996-01-31")))
        .group_by("l_orderkey", "o_orderdate", "o_shippriority");
}

}  // namespace

std::vector<std::string> builtin_query_ids() { return {"q1", "q2", "q3", "q4", "q5", "q6", "q5f"}; }

QueryBuilder top_orders_on(std::string_view day) {
    return select()
        .field("l_orderkey")
        .field(sum(discounted_price()).as("revenue"))
        .field("o_orderdate")
        .field("o_shippriority")
        .from("orders")
        .from("lineitem")
        .where(eq("l_orderkey", col("o_orderkey")))
        .where(eq("o_orderdate", date(std::string(day))))
        .group_by("l_orderkey", "o_orderdate", "o_shippriority")
        .order_by("revenue")
        .limit(10);
}

QueryBuilder view_day_filter(std::string_view view, std::string_view day) {
    return select()
        .field("l_orderkey")
        .field("revenue")
        .field("o_orderdate")
        .field("o_shippriority")
        .from(std::string(view))
        .where(eq("o_orderdate", date(std::string(day))))
        .order_by("revenue")
        .limit(10);
}

QueryBuilder builtin_query(std::string_view id) {
    if (id == "q1") return select().field(count()).from("orders").where(lt("o_totalprice", 1500));
    if (id == "q2") {
        return select().field(sum("o_totalprice")).from("orders").from("lineitem").where(eq("l_orderkey", col("o_orderkey")));
    }
    if (id == "q3") return select().field("o_orderdate").field(count()).from("orders").group_by("o_orderdate");
    if (id == "q4") {
        return select()
            .field("l_orderkey")
            .field(sum("l_extendedprice").as("rev"))
            .field("o_orderdate")
            .field("o_shippriority")
            .from("orders")
            .from("lineitem")
            .where(eq("l_orderkey", col("o_orderkey")))
            .where(between("o_orderdate", date("1996-01-01"), date("1996-01-31")))
            .group_by("l_orderkey", "o_orderdate", "o_shippriority")
            .order_by("rev", SortDirection::Desc)
            .limit(10);
    }
    if (id == "q5") return top_orders_on("1996-01-06");
    if (id == "q6") return january_revenue();
    if (id == "q5f") return view_day_filter(kDefaultView, "1996-01-06");
    throw Error(ErrorCode::UnknownQuery, "unknown query '" + std::string(id) + "'");
}

}  // namespace abr
