#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "abr/plan.hpp"
#include "abr/query.hpp"
#include "abr/storage.hpp"

namespace abr::testing {

/// A random sealed database plus a query against it.
///
/// Tables r and s share a column layout (prefix r_ / s_):
///   k INT32 join key, g INT32 small group domain, i INT32 full range,
///   d DATE32, x FLOAT64 multiples of 1/4 (including -0.0), p FLOAT64
///   arbitrary positive, t STRING.
/// Expressions over x stay exactly representable, so float results of both
/// backends agree bit for bit; aggregates over p only add positive terms.
struct Instance {
    Database db;
    QueryBuilder query;
    PlanClass intended;
    std::string description;
};

class InstanceGenerator {
public:
    explicit InstanceGenerator(std::uint64_t seed) : rng_(seed) {}

    Instance next(PlanClass plan_class);

private:
    std::uint32_t pick_rows();
    void fill_table(Database& db, const std::string& prefix, std::uint32_t rows, std::int32_t key_domain);
    Predicate random_filter(const std::string& prefix);
    ScalarExpr numeric_expr(const std::string& prefix, bool allow_int);
    AggSpec random_aggregate(const std::vector<std::string>& prefixes, int index);

    int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    std::mt19937_64 rng_;
};

struct DifferentialOutcome {
    bool agree = true;
    std::string detail;
};

/// Plans the query, runs both backends and compares: identical error codes
/// when either throws, otherwise equal results (sequences with ORDER BY,
/// multisets without; FLOAT64 cells within 1e-9 relative).
DifferentialOutcome run_differential(const Instance& instance);

}  // namespace abr::testing
