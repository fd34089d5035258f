#pragma once

#include <chrono>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "abr/plan.hpp"
#include "abr/result.hpp"

namespace abr {

enum class Backend { Compiled, Reference };

std::string_view to_string(Backend backend);
/// "compiled" or "reference"; throws InvalidDescriptor otherwise.
Backend parse_backend(std::string_view name);

struct RunOutcome {
    ResultTable table;
    std::chrono::nanoseconds compile{0};  // always 0 for the reference backend
    std::chrono::nanoseconds exec{0};

    std::chrono::nanoseconds latency() const { return compile + exec; }
};

/// One end-to-end run: compile (compiled backend only) and execute.
RunOutcome run_plan(const LogicalPlan& plan, const Database& db, Backend backend);

struct Summary {
    double mean = 0;
    double stddev = 0;               // sample (n - 1); 0 for one sample
    std::optional<double> ci95;      // 1.96 * stddev / sqrt(n); absent below two samples
};

Summary summarize(std::span<const double> samples);

struct BenchOptions {
    int warmup = 5;
    int trials = 5;
    /// Also run the other backend once and compare results.
    bool cross_check = false;
};

struct BenchRun {
    double compile_ms;
    double exec_ms;
    double total_ms() const { return compile_ms + exec_ms; }
};

struct BenchReport {
    std::string query_id;
    Backend backend = Backend::Compiled;
    int warmup_runs = 0;
    std::vector<BenchRun> runs;
    Summary latency;  // over total_ms
    std::size_t result_rows = 0;
    std::optional<MatchReport> cross_check;
};

/// Warmup runs are executed and discarded; trials are recorded in order.
BenchReport run_bench(const std::string& query_id, const LogicalPlan& plan, const Database& db, Backend backend,
                      const BenchOptions& options = {});

nlohmann::json report_to_json(const BenchReport& report);
std::string report_to_text(const BenchReport& report);

}  // namespace abr
