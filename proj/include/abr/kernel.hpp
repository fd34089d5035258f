#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "abr/plan.hpp"
#include "abr/result.hpp"
#include "abr/storage.hpp"

namespace abr {

/// A column the kernel reads, resolved to its arena location at compile time.
struct BoundAccessor {
    int source;
    std::string table;
    std::string column;
    ColumnType type;
    std::size_t arena_offset;
};

struct ExecutionResult {
    ResultTable table;
    std::chrono::nanoseconds exec_time{0};
};

/// A plan lowered onto one of the fixed loop templates with every column,
/// operator and type decision made up front.
///
/// The per-row loops run over evaluator objects whose concrete types were
/// picked during `compile`: column loads are typed pointer reads, comparisons
/// and arithmetic are instantiated per operator and operand type, and the
/// scan/join/group loops are instantiated per filter-chain and sink shape.
/// Nothing inspects a type tag or looks up an operator while iterating rows.
class ExecutableKernel {
public:
    ExecutableKernel(ExecutableKernel&&) noexcept;
    ExecutableKernel& operator=(ExecutableKernel&&) noexcept;
    ~ExecutableKernel();

    PlanClass plan_class() const;
    std::chrono::nanoseconds compile_time() const;
    const std::vector<BoundAccessor>& accessors() const;
    /// One entry per aggregate, in plan order.
    const std::vector<AggFunc>& accumulators() const;
    /// Bytes per composite group key (0 without GROUP BY).
    std::size_t group_key_width() const;
    /// Source index hashed in the build phase of join plans.
    std::optional<int> build_source() const;
    /// Short human-readable summary of the chosen template.
    std::string describe() const;

    /// Runs the kernel. `db` must be the database it was compiled against.
    /// Never modifies `db`; safe to call concurrently on distinct kernels.
    ExecutionResult execute(const Database& db) const;

    struct Impl;

private:
    explicit ExecutableKernel(std::unique_ptr<Impl> impl);
    friend ExecutableKernel compile(const LogicalPlan& plan, const Database& db);
    std::unique_ptr<Impl> impl_;
};

/// Throws NotSealed, UnknownTable/UnknownColumn (db differs from the catalog
/// the plan was built against) or TypeMismatch.
ExecutableKernel compile(const LogicalPlan& plan, const Database& db);

}  // namespace abr
