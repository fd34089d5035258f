#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "abr/topk.hpp"

using namespace abr;

namespace {

ResultTable revenue_table(const std::vector<double>& revenue, const std::vector<std::string>& keys) {
    const ColumnDef schema[] = {{"key", ColumnType::String}, {"revenue", ColumnType::Float64}};
    ResultTable t(schema);
    for (std::size_t i = 0; i < revenue.size(); ++i) {
        const Value row[] = {keys[i], revenue[i]};
        t.append_row(row);
    }
    return t;
}

}  // namespace

TEST(TopK, DescendingWithTieBreak) {
    const auto t = revenue_table({5, 9, 9, 1}, {"a", "b", "c", "d"});
    const std::size_t tie[] = {0};
    const auto top = top_k(t, "revenue", SortDirection::Desc, 2, tie);
    ASSERT_EQ(top.row_count(), 2u);
    EXPECT_EQ(top.strings(0), (std::vector<std::string>{"b", "c"}));
    EXPECT_EQ(top.floats(1), (std::vector<double>{9, 9}));
}

TEST(TopK, KLargerThanInput) {
    const auto t = revenue_table({3, 1, 2}, {"x", "y", "z"});
    const auto top = top_k(t, "revenue", SortDirection::Asc, 10, {});
    EXPECT_EQ(top.floats(1), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(top_k(t, "revenue", SortDirection::Asc, 0, {}).row_count(), 0u);
}

// Bounded selection equals sorting everything and truncating.
TEST(TopK, MatchesFullSortOracle) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng() % 60;
        const std::size_t k = 1 + rng() % 15;
        std::vector<int> primary(n), secondary(n);
        for (std::size_t i = 0; i < n; ++i) {
            primary[i] = static_cast<int>(rng() % 6);
            secondary[i] = static_cast<int>(rng() % 1000);
        }
        const auto desc = rng() % 2 == 0;
        auto before = [&](std::size_t a, std::size_t b) {
            if (primary[a] != primary[b]) return desc ? primary[a] > primary[b] : primary[a] < primary[b];
            if (secondary[a] != secondary[b]) return secondary[a] < secondary[b];
            return a < b;
        };
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), 0);
        std::sort(all.begin(), all.end(), before);
        all.resize(std::min(n, k));
        EXPECT_EQ(top_k_indices(n, k, before), all);
    }
}

TEST(RowOrder, LexicographicAcrossTypes) {
    const ColumnDef schema[] = {{"d", ColumnType::Date32}, {"s", ColumnType::String}, {"f", ColumnType::Float64}};
    ResultTable t(schema);
    const Value r0[] = {Date{5}, std::string("b"), 1.0};
    const Value r1[] = {Date{5}, std::string("a"), 2.0};
    const Value r2[] = {Date{4}, std::string("z"), 0.0};
    t.append_row(r0);
    t.append_row(r1);
    t.append_row(r2);
    const SortKey keys[] = {{0, SortDirection::Desc}, {1, SortDirection::Asc}};
    RowOrder order(schema, keys);
    EXPECT_TRUE(order.before(t, 1, 0));
    EXPECT_TRUE(order.before(t, 0, 2));
    EXPECT_FALSE(order.before(t, 0, 0));
}
