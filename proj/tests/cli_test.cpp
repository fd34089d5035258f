#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "abr/queries.hpp"
#include "abr/tbl.hpp"
#include "abr/tpch.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int status;
    std::string out;
};

Run abr_cli(const std::string& args) {
    const std::string cmd = std::string(ABR_CLI_PATH) + " " + args + " 2>&1";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    const int raw = pclose(p);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("abr_cli_" + std::to_string(::getpid()) + "_" +
                                            ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenWritesTables) {
    const auto r = abr_cli("gen --scale-factor 0.01 --seed 42 --out-dir " + dir_.string());
    ASSERT_EQ(r.status, 0) << r.out;
    EXPECT_NE(r.out.find("orders: 15000 rows"), std::string::npos) << r.out;
    EXPECT_TRUE(fs::exists(dir_ / "orders.tbl"));
    EXPECT_TRUE(fs::exists(dir_ / "lineitem.schema.json"));
    const auto l = abr_cli("load " + (dir_ / "orders.tbl").string() + " " + (dir_ / "orders.schema.json").string());
    EXPECT_EQ(l.status, 0) << l.out;
    EXPECT_NE(l.out.find("orders: 15000 rows"), std::string::npos);
}

TEST_F(Cli, Q3JsonHasOneRowPerDistinctDate) {
    ASSERT_EQ(abr_cli("gen --scale-factor 0.01 --seed 42 --out-dir " + dir_.string()).status, 0);
    const auto r = abr_cli("query q3 --output json --data-dir " + dir_.string());
    ASSERT_EQ(r.status, 0) << r.out;
    const auto j = json::parse(r.out);
    const auto db = abr::gen_tpch_subset({0.01, 42});
    const auto dates = db.date_view("orders", "o_orderdate");
    const std::set<std::int32_t> distinct(dates.begin(), dates.end());
    EXPECT_EQ(j["columns"][0]["values"].size(), distinct.size());
    EXPECT_EQ(j["stats"]["rows"], distinct.size());
}

TEST_F(Cli, BackendsPrintSameAnswer) {
    const auto a = json::parse(abr_cli("query q1 --output json --backend compiled").out);
    const auto b = json::parse(abr_cli("query q1 --output json --backend reference").out);
    EXPECT_EQ(a["columns"], b["columns"]);
}

TEST_F(Cli, MaterializeThenFilter) {
    ASSERT_EQ(abr_cli("gen --scale-factor 0.01 --out-dir " + dir_.string()).status, 0);
    const auto direct = abr_cli("query q5 --output json --data-dir " + dir_.string());
    const auto via = abr_cli("materialize jan_orders q6 --then q5f --output json --data-dir " + dir_.string());
    ASSERT_EQ(via.status, 0) << via.out;
    EXPECT_TRUE(fs::exists(dir_ / "jan_orders.tbl"));
    const auto body = via.out.substr(via.out.find('{'));
    EXPECT_EQ(json::parse(body)["columns"], json::parse(direct.out)["columns"]);
}

TEST_F(Cli, BenchJson) {
    const auto r = abr_cli("bench q1 --scale-factor 0.001 --output json --cross-check");
    ASSERT_EQ(r.status, 0) << r.out;
    const auto j = json::parse(r.out);
    EXPECT_EQ(j["warmupRuns"], 5);
    EXPECT_EQ(j["runs"].size(), 5u);
    EXPECT_TRUE(j["crossCheck"]["matches"].get<bool>());
}

TEST_F(Cli, FailuresExitNonzero) {
    {
        std::ofstream(dir_ / "bad.tbl") << "1|2|\n";
        std::ofstream(dir_ / "bad.schema.json") << abr::schema_to_json(abr::orders_schema()).dump();
    }
    auto r = abr_cli("load " + (dir_ / "bad.tbl").string() + " " + (dir_ / "bad.schema.json").string());
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("abr:"), std::string::npos);
    EXPECT_NE(abr_cli("query q9").status, 0);
    EXPECT_NE(abr_cli("query q1 --backend turbo").status, 0);
    EXPECT_NE(abr_cli("bench q1 --trials 0").status, 0);
    EXPECT_NE(abr_cli("frobnicate").status, 0);
}
