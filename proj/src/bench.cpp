#include "abr/bench.hpp"

#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "abr/error.hpp"
#include "abr/kernel.hpp"
#include "abr/reference.hpp"

namespace abr {

std::string_view to_string(Backend backend) { return backend == Backend::Compiled ? "compiled" : "reference"; }

Backend parse_backend(std::string_view name) {
    if (name == "compiled") return Backend::Compiled;
    if (name == "reference") return Backend::Reference;
    throw Error(ErrorCode::InvalidDescriptor, fmt::format("unknown backend '{}'", name));
}

RunOutcome run_plan(const LogicalPlan& plan, const Database& db, Backend backend) {
    if (backend == Backend::Reference) {
        auto r = eval_plan(plan, db);
        return {std::move(r.table), std::chrono::nanoseconds{0}, r.exec_time};
    }
    const auto kernel = compile(plan, db);
    auto r = kernel.execute(db);
    return {std::move(r.table), kernel.compile_time(), r.exec_time};
}

Summary summarize(std::span<const double> samples) {
    Summary s;
    if (samples.empty()) return s;
    const double n = static_cast<double>(samples.size());
    s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    if (samples.size() < 2) return s;
    double ss = 0;
    for (double x : samples) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / (n - 1));
    s.ci95 = 1.96 * s.stddev / std::sqrt(n);
    return s;
}

namespace {

double to_ms(std::chrono::nanoseconds ns) { return static_cast<double>(ns.count()) / 1e6; }

}  // namespace

BenchReport run_bench(const std::string& query_id, const LogicalPlan& plan, const Database& db, Backend backend,
                      const BenchOptions& options) {
    if (options.warmup < 0 || options.trials < 1) {
        throw Error(ErrorCode::InvalidDescriptor, "need warmup >= 0 and trials >= 1");
    }
    BenchReport report;
    report.query_id = query_id;
    report.backend = backend;
    report.warmup_runs = options.warmup;
    for (int i = 0; i < options.warmup; ++i) run_plan(plan, db, backend);
    std::vector<double> totals;
    ResultTable last;
    for (int i = 0; i < options.trials; ++i) {
        auto out = run_plan(plan, db, backend);
        report.runs.push_back({to_ms(out.compile), to_ms(out.exec)});
        totals.push_back(report.runs.back().total_ms());
        last = std::move(out.table);
    }
    report.latency = summarize(totals);
    report.result_rows = last.row_count();
    if (options.cross_check) {
        const auto other = backend == Backend::Compiled ? Backend::Reference : Backend::Compiled;
        const auto theirs = run_plan(plan, db, other);
        report.cross_check = compare_results(last, theirs.table, {.ordered = plan.order_by.has_value()});
    }
    return report;
}

nlohmann::json report_to_json(const BenchReport& r) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& run : r.runs) {
        runs.push_back({{"compileMs", run.compile_ms}, {"execMs", run.exec_ms}, {"totalMs", run.total_ms()}});
    }
    nlohmann::json j{{"queryId", r.query_id},
                     {"backend", to_string(r.backend)},
                     {"warmupRuns", r.warmup_runs},
                     {"measuredRuns", r.runs.size()},
                     {"runs", std::move(runs)},
                     {"meanMs", r.latency.mean},
                     {"stddevMs", r.latency.stddev},
                     {"ci95Ms", r.latency.ci95 ? nlohmann::json(*r.latency.ci95) : nlohmann::json(nullptr)},
                     {"ciMethod", "normal approximation, 1.96 * s / sqrt(n)"},
                     {"resultRows", r.result_rows}};
    if (r.cross_check) j["crossCheck"] = {{"matches", r.cross_check->matches}, {"detail", r.cross_check->detail}};
    return j;
}

std::string report_to_text(const BenchReport& r) {
    std::string out = fmt::format("query {} on {} backend: {} warmup, {} measured runs (ms; 95% CI by normal approximation)\n",
                                  r.query_id, to_string(r.backend), r.warmup_runs, r.runs.size());
    out += fmt::format("{:>5} {:>12} {:>12} {:>12}\n", "run", "compile", "exec", "total");
    for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const auto& run = r.runs[i];
        out += fmt::format("{:>5} {:>12.3f} {:>12.3f} {:>12.3f}\n", i + 1, run.compile_ms, run.exec_ms, run.total_ms());
    }
    out += fmt::format("mean {:.3f} ms, stddev {:.3f} ms, 95% CI ", r.latency.mean, r.latency.stddev);
    out += r.latency.ci95 ? fmt::format("+/- {:.3f} ms", *r.latency.ci95) : std::string("n/a");
    out += fmt::format(", {} result row(s)\n", r.result_rows);
    if (r.cross_check) {
        out += r.cross_check->matches ? "cross-check: backends agree\n"
                                      : fmt::format("cross-check: MISMATCH ({})\n", r.cross_check->detail);
    }
    return out;
}

}  // namespace abr
