#pragma once

#include <chrono>
#include <cstdint>
#include <functional>

#include "abr/plan.hpp"
#include "abr/result.hpp"
#include "abr/storage.hpp"

namespace abr {

/// Runtime-tagged scalar used by the reference executor.
using DynValue = Value;

enum class JoinMode { Auto, NestedLoop, Hash };

std::string_view to_string(JoinMode mode);

struct ReferenceOptions {
    /// Auto picks nested loops when both inputs have at most
    /// `nested_loop_limit` rows and a hash join otherwise.
    JoinMode join_mode = JoinMode::Auto;
    std::uint32_t nested_loop_limit = 10'000;
};

struct ReferenceStats {
    /// Strategy actually used; nullopt for single-table plans.
    std::optional<JoinMode> join_mode;
    std::uint64_t join_matches = 0;
    std::uint64_t rows_scanned = 0;
};

struct ReferenceResult {
    ResultTable table;
    ReferenceStats stats;
    std::chrono::nanoseconds exec_time{0};
};

/// Supplies the value of a column reference for the current row.
using RowContext = std::function<DynValue(const ScalarExpr& column)>;

/// Recursive evaluation over runtime tags. INT32 arithmetic wraps; mixed
/// INT32/FLOAT64 operands promote to FLOAT64. Throws TypeMismatch for
/// arithmetic on strings or dates.
DynValue eval_scalar(const ScalarExpr& expr, const RowContext& row = {});

/// Row-at-a-time evaluation of `plan`. Same results and errors as the
/// compiled backend.
ReferenceResult eval_plan(const LogicalPlan& plan, const Database& db, const ReferenceOptions& options = {});

}  // namespace abr
