#include <gtest/gtest.h>

#include "abr/error.hpp"
#include "abr/plan.hpp"
#include "abr/queries.hpp"
#include "abr/tpch.hpp"

using namespace abr;
using namespace abr::sql;

namespace {

std::vector<TableSchema> catalog() { return {orders_schema(), lineitem_schema()}; }

ErrorCode plan_error(const QueryBuilder& q) {
    try {
        to_plan(q, catalog());
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "planning succeeded";
    return ErrorCode::IoError;
}

}  // namespace

TEST(QueryBuilder, AccumulatesClauses) {
    auto q = select().field("o_orderkey").field("o_orderdate").from("orders").where(eq("o_orderdate", date("1996-01-01")));
    EXPECT_EQ(q.clauses().projections.size(), 2u);
    EXPECT_EQ(q.clauses().sources.size(), 1u);
    EXPECT_EQ(q.clauses().predicates.size(), 1u);
}

TEST(QueryBuilder, CallOrderDoesNotMatter) {
    auto a = select().field("o_orderdate").field(count()).from("orders").where(lt("o_totalprice", 10)).group_by("o_orderdate");
    auto b = select().from("orders").group_by("o_orderdate").where(lt("o_totalprice", 10)).field("o_orderdate").field(count());
    EXPECT_EQ(a, b);
    EXPECT_EQ(plan_digest(to_plan(a, catalog())), plan_digest(to_plan(b, catalog())));
}

TEST(QueryBuilder, EmptyProjection) { EXPECT_EQ(plan_error(select().from("orders")), ErrorCode::EmptyProjection); }

TEST(Plan, Q1IsFilterWithCount) {
    const auto p = to_plan(builtin_query("q1"), catalog());
    EXPECT_EQ(p.plan_class, PlanClass::Filter);
    ASSERT_EQ(p.filters.size(), 1u);
    EXPECT_EQ(p.filters[0].op, CompareOp::Lt);
    EXPECT_EQ(p.filters[0].column.column_name(), "o_totalprice");
    EXPECT_EQ(std::get<std::int32_t>(p.filters[0].value.literal_value()), 1500);
    ASSERT_EQ(p.aggregates.size(), 1u);
    EXPECT_EQ(p.aggregates[0].func, AggFunc::Count);
}

TEST(Plan, Q2IsJoin) {
    const auto p = to_plan(builtin_query("q2"), catalog());
    EXPECT_EQ(p.plan_class, PlanClass::Join);
    ASSERT_TRUE(p.join_key);
    EXPECT_EQ(p.join_key->left.column_name(), "l_orderkey");
    EXPECT_EQ(p.join_key->right.column_name(), "o_orderkey");
    EXPECT_TRUE(p.filters.empty());
}

TEST(Plan, BuiltinsLowerWithoutErrors) {
    const std::pair<const char*, PlanClass> expected[] = {
        {"q1", PlanClass::Filter},          {"q2", PlanClass::Join},
        {"q3", PlanClass::GroupBy},         {"q4", PlanClass::JoinGroupByTopK},
        {"q5", PlanClass::JoinGroupByTopK}, {"q6", PlanClass::JoinGroupByTopK},
    };
    for (const auto& [id, cls] : expected) EXPECT_EQ(to_plan(builtin_query(id), catalog()).plan_class, cls) << id;
}

TEST(Plan, DatesConvertedAtPlanTime) {
    const auto p = to_plan(builtin_query("q4"), catalog());
    ASSERT_EQ(p.filters.size(), 1u);
    EXPECT_EQ(p.filters[0].op, CompareOp::Between);
    EXPECT_EQ(std::get<Date>(p.filters[0].value.literal_value()).days, 9496);
    EXPECT_EQ(std::get<Date>(p.filters[0].high->literal_value()).days, 9496 + 30);
}

TEST(Plan, ExpressionTypes) {
    const auto p = to_plan(builtin_query("q5"), catalog());
    ASSERT_EQ(p.aggregates.size(), 1u);
    EXPECT_EQ(p.aggregates[0].expr->type(), ColumnType::Float64);
    EXPECT_EQ(p.aggregates[0].expr->rhs().type(), ColumnType::Float64);  // INT32 1 - FLOAT64
    const auto q = to_plan(select().field(col("o_orderkey") * lit(2)).from("orders"), catalog());
    EXPECT_EQ(q.projections[0].type, ColumnType::Int32);
    EXPECT_EQ(q.projections[0].name, "expr0");
}

TEST(Plan, Errors) {
    EXPECT_EQ(plan_error(select().field(count()).from("nope")), ErrorCode::UnknownTable);
    EXPECT_EQ(plan_error(select().field("zzz").from("orders")), ErrorCode::UnknownColumn);
    EXPECT_EQ(plan_error(select().field(col("lineitem", "l_orderkey")).from("orders")), ErrorCode::UnknownTable);
    EXPECT_EQ(plan_error(select().field(count()).from("orders").from("lineitem").from("part")),
              ErrorCode::UnsupportedShape);
    // Non-equi join.
    EXPECT_EQ(plan_error(select().field(count()).from("orders").from("lineitem").where(lt("l_orderkey", col("o_orderkey")))),
              ErrorCode::UnsupportedShape);
    // Two join conditions.
    EXPECT_EQ(plan_error(select()
                             .field(count())
                             .from("orders")
                             .from("lineitem")
                             .where(eq("l_orderkey", col("o_orderkey")))
                             .where(eq("l_extendedprice", col("o_totalprice")))),
              ErrorCode::UnsupportedShape);
    // Two sources without a join condition.
    EXPECT_EQ(plan_error(select().field(count()).from("orders").from("lineitem")), ErrorCode::UnsupportedShape);
    // ORDER BY without LIMIT outside group-by.
    EXPECT_EQ(plan_error(select().field("o_orderkey").from("orders").order_by("o_orderkey")), ErrorCode::UnsupportedShape);
    EXPECT_EQ(plan_error(select().field(count()).from("orders").where(lt("o_orderdate", 5.0))), ErrorCode::TypeMismatch);
    EXPECT_EQ(plan_error(select().field(sum("o_orderdate")).from("orders")), ErrorCode::TypeMismatch);
    EXPECT_EQ(plan_error(select().field(col("o_orderdate") + lit(1)).from("orders")), ErrorCode::TypeMismatch);
    EXPECT_EQ(plan_error(select().field(lit("a") * lit(2)).from("orders")), ErrorCode::TypeMismatch);
    // Grouped output must be a key or an aggregate.
    EXPECT_EQ(plan_error(select().field("o_totalprice").field(count()).from("orders").group_by("o_orderdate")),
              ErrorCode::UnsupportedShape);
    EXPECT_EQ(plan_error(select().field(count()).from("orders").order_by("count").limit(0)), ErrorCode::UnsupportedShape);
}

TEST(Plan, AmbiguousColumnNeedsQualification) {
    std::vector<TableSchema> cat{{"a", {{"k", ColumnType::Int32}}}, {"b", {{"k", ColumnType::Int32}}}};
    auto ambiguous = select().field(count()).from("a").from("b").where(eq("k", col("k")));
    EXPECT_THROW(to_plan(ambiguous, cat), Error);
    auto qualified = select().field(count()).from("a").from("b").where(eq(col("a", "k"), col("b", "k")));
    EXPECT_EQ(to_plan(qualified, cat).plan_class, PlanClass::Join);
}

TEST(PlanDigest, DeterministicAndLiteralSensitive) {
    const auto a = plan_digest(to_plan(builtin_query("q1"), catalog()));
    EXPECT_EQ(a, plan_digest(to_plan(builtin_query("q1"), catalog())));
    const auto b = plan_digest(to_plan(select().field(count()).from("orders").where(lt("o_totalprice", 1501)), catalog()));
    EXPECT_NE(a, b);
}

TEST(PlanDigest, Snapshot) {
    EXPECT_EQ(plan_digest(to_plan(builtin_query("q1"), catalog())),
              "class=FILTER;sources=[orders];join=;filters=[LT(orders.o_totalprice,i:1500)];groupKeys=[];"
              "aggregates=[COUNT(*) AS count];projections=[count AS count:INT32];orderBy=;limit=");
    EXPECT_EQ(plan_digest(to_plan(builtin_query("q4"), catalog())),
              "class=JOIN_GROUPBY_TOPK;sources=[orders,lineitem];join=lineitem.l_orderkey=orders.o_orderkey;"
              "filters=[BETWEEN(orders.o_orderdate,d:1996-01-01,d:1996-01-31)];"
              "groupKeys=[lineitem.l_orderkey,orders.o_orderdate,orders.o_shippriority];"
              "aggregates=[SUM(lineitem.l_extendedprice) AS rev];"
              "projections=[lineitem.l_orderkey AS l_orderkey:INT32,rev AS rev:FLOAT64,"
              "orders.o_orderdate AS o_orderdate:DATE32,orders.o_shippriority AS o_shippriority:INT32];"
              "orderBy=rev DESC;limit=10");
}
