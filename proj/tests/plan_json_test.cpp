#include <gtest/gtest.h>

#include "abr/error.hpp"
#include "abr/plan_json.hpp"
#include "abr/queries.hpp"
#include "abr/tpch.hpp"
#include "random_instance.hpp"

using namespace abr;

namespace {

std::vector<TableSchema> catalog() { return {orders_schema(), lineitem_schema()}; }

}  // namespace

TEST(PlanJson, BuiltinsRoundTrip) {
    for (const auto& id : {"q1", "q2", "q3", "q4", "q5", "q6"}) {
        const auto plan = to_plan(builtin_query(id), catalog());
        const auto j = plan_to_json(plan);
        EXPECT_EQ(j["planClass"], std::string(to_string(plan.plan_class)));
        const auto again = to_plan(query_from_json(Json::parse(j.dump())), catalog());
        EXPECT_EQ(plan_digest(again), plan_digest(plan)) << id;
    }
}

TEST(PlanJson, RandomPlansRoundTrip) {
    abr::testing::InstanceGenerator gen(77);
    int planned = 0;
    for (int i = 0; i < 200; ++i) {
        const auto inst = gen.next(static_cast<PlanClass>(i % 4));
        LogicalPlan plan;
        try {
            plan = to_plan(inst.query, inst.db);
        } catch (const Error&) {
            continue;
        }
        ++planned;
        const auto again = to_plan(query_from_json(plan_to_json(plan)), inst.db);
        ASSERT_EQ(plan_digest(again), plan_digest(plan)) << inst.description;
    }
    EXPECT_GT(planned, 150);
}

TEST(PlanJson, Q2DescriptorUsesJoinKey) {
    const auto j = plan_to_json(to_plan(builtin_query("q2"), catalog()));
    EXPECT_EQ(j["joinKey"]["left"]["column"], "l_orderkey");
    EXPECT_TRUE(j["filters"].empty());
    EXPECT_TRUE(j["limit"].is_null());
}

TEST(PlanJson, MalformedDescriptors) {
    for (const char* text : {R"([])", R"({"sources":["orders"]})", R"({"sources":"orders","projections":[]})",
                             R"({"sources":["orders"],"projections":[{"expr":{"bogus":1}}]})",
                             R"({"sources":["orders"],"projections":[{"expr":{"literal":1.5,"type":"INT32"}}]})",
                             R"({"sources":["orders"],"projections":[{"expr":{"column":"o_orderkey"}}],"limit":"x"})",
                             R"({"sources":["orders"],"projections":[{"expr":{"op":"DIV","left":{"literal":1},"right":{"literal":2}}}]})"}) {
        try {
            query_from_json(Json::parse(text));
            ADD_FAILURE() << text;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InvalidDescriptor) << text;
        }
    }
}

TEST(PlanJson, ResultRoundTrip) {
    const ColumnDef schema[] = {{"k", ColumnType::Int32}, {"d", ColumnType::Date32}, {"p", ColumnType::Float64},
                                {"s", ColumnType::String}};
    ResultTable t(schema);
    const Value r0[] = {std::int32_t{1}, Date{9496}, 0.1, std::string("a")};
    const Value r1[] = {std::int32_t{-2}, Date{0}, 1e300, std::string("")};
    t.append_row(r0);
    t.append_row(r1);
    const auto j = result_to_json(t, {std::chrono::milliseconds(2), std::chrono::milliseconds(3)});
    EXPECT_EQ(j["columns"][1]["values"][0], "1996-01-01");
    EXPECT_EQ(j["stats"]["rows"], 2);
    EXPECT_DOUBLE_EQ(j["stats"]["compileMs"].get<double>(), 2.0);
    EXPECT_EQ(result_from_json(Json::parse(j.dump())), t);
}
