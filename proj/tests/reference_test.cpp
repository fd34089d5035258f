#include <cmath>

#include <gtest/gtest.h>

#include "abr/error.hpp"
#include "abr/kernel.hpp"
#include "abr/reference.hpp"
#include "abr/tpch.hpp"
#include "fixture_cases.hpp"

using namespace abr;
using namespace abr::sql;
using abr::testing::fixture_cases;

TEST(Reference, ScalarArithmetic) {
    EXPECT_EQ(std::get<double>(eval_scalar(lit(1) - lit(0.25))), 0.75);
    const double v = std::get<double>(eval_scalar(lit(100.0) * (lit(1) - lit(0.1))));
    EXPECT_NEAR(v, 90.0, 1e-12);
    EXPECT_EQ(std::get<std::int32_t>(eval_scalar(lit(7) * lit(6))), 42);
    EXPECT_EQ(std::get<std::int32_t>(eval_scalar(lit(2147483647) + lit(1))), -2147483647 - 1);
    try {
        eval_scalar(lit("x") * lit(2));
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TypeMismatch);
    }
    const RowContext row = [](const ScalarExpr& c) -> DynValue {
        return c.column_name() == "a" ? DynValue{std::int32_t{4}} : DynValue{0.5};
    };
    EXPECT_EQ(std::get<double>(eval_scalar(col("a") * col("b"), row)), 2.0);
}

TEST(Reference, FixtureOracles) {
    for (const auto& c : fixture_cases()) {
        const auto db = c.make_db();
        const auto got = eval_plan(to_plan(c.query, db), db).table;
        const auto m = compare_results(got, c.expected, {1e-12, c.ordered});
        EXPECT_TRUE(m.matches) << c.id << ": " << m.detail;
    }
}

TEST(Reference, EmptyOrdersCountIsZero) {
    const auto db = abr::testing::tpch_fixture({}, {});
    const auto r = eval_plan(to_plan(builtin_query("q1"), db), db);
    EXPECT_EQ(r.table.ints(0), (std::vector<std::int32_t>{0}));
    EXPECT_EQ(r.stats.rows_scanned, 0u);
    EXPECT_FALSE(r.stats.join_mode);
}

TEST(Reference, JoinModesAgree) {
    const auto db = gen_tpch_subset({0.002, 5});
    for (const auto& id : {"q2", "q4", "q6"}) {
        const auto plan = to_plan(builtin_query(id), db);
        const auto nl = eval_plan(plan, db, {JoinMode::NestedLoop});
        const auto hash = eval_plan(plan, db, {JoinMode::Hash});
        EXPECT_EQ(nl.stats.join_mode, JoinMode::NestedLoop);
        EXPECT_EQ(hash.stats.join_mode, JoinMode::Hash);
        EXPECT_EQ(nl.stats.join_matches, hash.stats.join_matches);
        EXPECT_EQ(nl.table, hash.table) << id;
        // 3000 orders, more than 10^4 lines.
        EXPECT_EQ(eval_plan(plan, db).stats.join_mode, JoinMode::Hash);
        EXPECT_EQ(eval_plan(plan, db, {JoinMode::Auto, 20'000}).stats.join_mode, JoinMode::NestedLoop);
    }
}

// Every lineitem row references an existing order, so the join matches
// exactly the lineitem cardinality.
TEST(Reference, JoinMatchCountIsLineitemCount) {
    const auto db = gen_tpch_subset({0.001, 42});
    const auto r = eval_plan(to_plan(builtin_query("q2"), db), db);
    EXPECT_EQ(r.stats.join_matches, db.row_count("lineitem"));
}

TEST(Reference, Q4MatchesCompiledOnTinyFixture) {
    const auto db = abr::testing::tiny_join_fixture();
    const auto plan = to_plan(builtin_query("q4"), db);
    EXPECT_EQ(eval_plan(plan, db).table, compile(plan, db).execute(db).table);
}
