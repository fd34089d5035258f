#include <cstring>
#include <sstream>

#include <gtest/gtest.h>

#include "abr/error.hpp"
#include "abr/plan_json.hpp"
#include "abr/queries.hpp"
#include "abr/session.hpp"
#include "abr/tbl.hpp"
#include "abr/tpch.hpp"

using namespace abr;

namespace {

std::string tbl_text(const Database& db, const std::string& table) {
    std::ostringstream out;
    emit_tbl(db, table, out);
    return out.str();
}

Json descriptor(std::string_view id) {
    return plan_to_json(to_plan(builtin_query(id), std::vector<TableSchema>{orders_schema(), lineitem_schema()}));
}

Json view_descriptor(const Session& s, std::string_view day) {
    return plan_to_json(to_plan(view_day_filter(kDefaultView, day), s.database()));
}

}  // namespace

class SessionTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto gen = gen_tpch_subset({0.001, 42});
        orders_ = tbl_text(gen, "orders");
        lines_ = tbl_text(gen, "lineitem");
    }
    void load(Session& s) {
        EXPECT_EQ(s.load_table("orders", schema_to_json(orders_schema()), orders_), 1500u);
        s.load_table("lineitem", schema_to_json(lineitem_schema()), lines_);
    }
    std::string orders_, lines_;
};

TEST_F(SessionTest, LoadAndList) {
    Session s;
    EXPECT_TRUE(s.list_tables()["tables"].empty());
    load(s);
    const auto t = s.list_tables()["tables"];
    ASSERT_EQ(t.size(), 2u);
    EXPECT_EQ(t[0]["name"], "orders");
    EXPECT_EQ(t[0]["rows"], 1500);
    EXPECT_EQ(t[0]["columns"].size(), 4u);
    EXPECT_EQ(t[1]["columns"][2]["name"], "l_discount");
}

TEST_F(SessionTest, RunPlanMatchesEngine) {
    Session s;
    load(s);
    const auto direct = gen_tpch_subset({0.001, 42});
    for (const auto& id : {"q1", "q3", "q4"}) {
        const auto out = s.run_plan(descriptor(id));
        EXPECT_TRUE(out["stats"].contains("execMs"));
        const auto expected = run_plan(to_plan(builtin_query(id), direct), direct, Backend::Compiled).table;
        EXPECT_EQ(result_from_json(out), expected) << id;
    }
    EXPECT_EQ(s.run_plan(descriptor("q4"))["columns"][0]["values"].size(), 10u);
}

TEST_F(SessionTest, MaterializeThenFilterEqualsDirect) {
    Session s;
    load(s);
    const auto rows = s.materialize(std::string(kDefaultView), descriptor("q6"));
    EXPECT_GT(rows, 0u);
    const auto direct = result_from_json(s.run_plan(descriptor("q5")));
    const auto via_view = result_from_json(s.run_plan(view_descriptor(s, "1996-01-06")));
    EXPECT_TRUE(compare_results(direct, via_view, {0, true}).matches);
    EXPECT_EQ(s.list_tables()["tables"].size(), 3u);
}

TEST_F(SessionTest, FailedCallsLeaveCatalogUnchanged) {
    Session s;
    load(s);
    const auto before = s.list_tables();
    const auto digest = s.database().arena_digest();
    EXPECT_THROW(s.load_table("bad", schema_to_json(orders_schema()), "1|x|1996-01-01|0|\n"), Error);
    EXPECT_THROW(s.load_table("orders", schema_to_json(orders_schema()), ""), Error);
    Json broken = descriptor("q1");
    broken["sources"] = {"nope"};
    EXPECT_THROW(s.run_plan(broken), Error);
    EXPECT_THROW(s.materialize("v", broken), Error);
    EXPECT_EQ(s.list_tables(), before);
    EXPECT_EQ(s.database().arena_digest(), digest);
}

TEST(SessionErrors, ErrorJsonShape) {
    const auto j = error_to_json(Error(ErrorCode::UnknownTable, "no table named 'x'"));
    EXPECT_EQ(j["error"]["code"], "UnknownTable");
    EXPECT_NE(j["error"]["message"].get<std::string>().find("no table named 'x'"), std::string::npos);
}

TEST_F(SessionTest, CAbi) {
    abr_session* s = abr_session_new();
    ASSERT_NE(s, nullptr);
    const auto schema = schema_to_json(orders_schema()).dump();
    char* r = abr_load_table(s, "orders", schema.c_str(), orders_.data(), orders_.size());
    EXPECT_EQ(Json::parse(r)["rows"], 1500);
    abr_string_free(r);
    const auto plan = descriptor("q1").dump();
    r = abr_run_plan(s, plan.c_str());
    const auto out = Json::parse(r);
    abr_string_free(r);
    EXPECT_EQ(out["columns"][0]["name"], "count");
    EXPECT_EQ(out["columns"][0]["values"].size(), 1u);
    r = abr_run_plan(s, "{not json");
    EXPECT_EQ(Json::parse(r)["error"]["code"], "InvalidDescriptor");
    abr_string_free(r);
    r = abr_list_tables(s);
    EXPECT_EQ(Json::parse(r)["tables"].size(), 1u);
    abr_string_free(r);
    r = abr_materialize(s, "cheap", plan.c_str());
    EXPECT_EQ(Json::parse(r)["rows"], 1);
    abr_string_free(r);
    abr_session_free(s);
}
