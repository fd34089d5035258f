// abr: generate or load data, run queries on either backend, materialize
// results and benchmark.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "abr/bench.hpp"
#include "abr/error.hpp"
#include "abr/plan_json.hpp"
#include "abr/queries.hpp"
#include "abr/tbl.hpp"
#include "abr/tpch.hpp"

namespace fs = std::filesystem;
using namespace abr;

namespace {

struct DataOptions {
    std::string data_dir;
    double scale_factor = 0.01;
    std::uint64_t seed = 42;
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
    cmd->add_option("--data-dir", d.data_dir, "Directory of .tbl files with .schema.json sidecars");
    cmd->add_option("--scale-factor", d.scale_factor, "Generate data in memory at this scale (no --data-dir)");
    cmd->add_option("--seed", d.seed, "Generator seed");
}

void load_dir(Database& db, const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, fmt::format("'{}' is not a directory", dir.string()));
    std::vector<fs::path> sidecars;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto name = entry.path().filename().string();
        if (name.size() > 12 && name.ends_with(".schema.json")) sidecars.push_back(entry.path());
    }
    std::sort(sidecars.begin(), sidecars.end());
    for (const auto& sidecar : sidecars) {
        const auto schema = read_schema_file(sidecar);
        load_tbl(db, schema, dir / (schema.name + ".tbl"));
    }
}

Database open_database(const DataOptions& d) {
    Database db;
    if (!d.data_dir.empty()) load_dir(db, d.data_dir);
    else gen_tpch_tables(db, {d.scale_factor, d.seed});
    db.seal();
    return db;
}

struct QueryOptions {
    std::string id;
    std::string plan_file;
    std::string day = "1996-01-06";
    std::string view{kDefaultView};
};

void add_query_options(CLI::App* cmd, QueryOptions& q, bool positional = true) {
    if (positional) cmd->add_option("query", q.id, "Built-in query id (q1..q6, q5f)");
    cmd->add_option("--plan-file", q.plan_file, "JSON plan descriptor");
    cmd->add_option("--date", q.day, "Day for q5 and q5f (YYYY-MM-DD)");
    cmd->add_option("--view", q.view, "Materialized table read by q5f");
}

std::pair<std::string, QueryBuilder> resolve_query(const QueryOptions& q) {
    if (!q.plan_file.empty()) {
        std::ifstream in(q.plan_file);
        if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", q.plan_file));
        Json j;
        try {
            in >> j;
        } catch (const Json::exception& e) {
            throw Error(ErrorCode::InvalidDescriptor, e.what());
        }
        return {fs::path(q.plan_file).stem().string(), query_from_json(j)};
    }
    if (q.id.empty()) throw Error(ErrorCode::UnknownQuery, "give a built-in query id or --plan-file");
    if (q.id == "q5") return {q.id, top_orders_on(q.day)};
    if (q.id == "q5f") return {q.id, view_day_filter(q.view, q.day)};
    return {q.id, builtin_query(q.id)};
}

void print_result(const RunOutcome& out, const std::string& format) {
    if (format == "json") {
        std::cout << result_to_json(out.table, {out.compile, out.exec}).dump() << '\n';
    } else {
        std::cout << format_table(out.table);
        std::cout << fmt::format("compile {:.3f} ms, exec {:.3f} ms\n", out.compile.count() / 1e6,
                                 out.exec.count() / 1e6);
    }
}

void write_table(const Database& db, const std::string& name, const fs::path& dir) {
    fs::create_directories(dir);
    emit_tbl(db, name, dir / (name + ".tbl"));
    write_schema_file(db.schema(name), dir / (name + ".schema.json"));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Columnar query engine with plan-specialized kernels"};
    app.require_subcommand(1);

    std::string backend_name = "compiled";
    std::string output = "table";
    auto add_backend = [&](CLI::App* cmd) {
        cmd->add_option("--backend", backend_name, "compiled or reference")
            ->check(CLI::IsMember({"compiled", "reference"}));
    };
    auto add_output = [&](CLI::App* cmd) {
        cmd->add_option("--output", output, "table or json")->check(CLI::IsMember({"table", "json"}));
    };

    // gen
    auto* gen = app.add_subcommand("gen", "Generate the orders/lineitem subset");
    DataOptions gen_data;
    std::string out_dir;
    gen->add_option("--scale-factor", gen_data.scale_factor, "Scale factor (orders = round(1.5M * sf))");
    gen->add_option("--seed", gen_data.seed, "Generator seed");
    gen->add_option("--out-dir", out_dir, "Write .tbl files and schema sidecars here");

    // load
    auto* load = app.add_subcommand("load", "Parse a .tbl file against a schema sidecar");
    std::string tbl_path, schema_path, load_dir_opt;
    load->add_option("tbl", tbl_path, "Pipe-delimited data file")->required();
    load->add_option("schema", schema_path, "Schema sidecar JSON")->required();
    load->add_option("--data-dir", load_dir_opt, "Copy the validated table into this directory");

    // query
    auto* query = app.add_subcommand("query", "Run a query");
    DataOptions query_data;
    QueryOptions query_opts;
    add_data_options(query, query_data);
    add_query_options(query, query_opts);
    add_backend(query);
    add_output(query);

    // materialize
    auto* mat = app.add_subcommand("materialize", "Store a query result as a new table");
    DataOptions mat_data;
    QueryOptions mat_opts;
    std::string mat_name, mat_out, then_id;
    mat->add_option("name", mat_name, "New table name")->required();
    mat->add_option("query", mat_opts.id, "Built-in query id (q1..q6)");
    add_data_options(mat, mat_data);
    add_query_options(mat, mat_opts, false);
    add_backend(mat);
    add_output(mat);
    mat->add_option("--out-dir", mat_out, "Write the new table here (default: --data-dir)");
    mat->add_option("--then", then_id, "Query to run on the successor database (e.g. q5f)");

    // bench
    auto* bench = app.add_subcommand("bench", "Warmup runs, then timed trials");
    DataOptions bench_data;
    QueryOptions bench_opts;
    BenchOptions bench_cfg;
    add_data_options(bench, bench_data);
    add_query_options(bench, bench_opts);
    add_backend(bench);
    add_output(bench);
    bench->add_option("--warmup", bench_cfg.warmup, "Unrecorded runs")->check(CLI::NonNegativeNumber);
    bench->add_option("--trials", bench_cfg.trials, "Recorded runs")->check(CLI::PositiveNumber);
    bench->add_flag("--cross-check", bench_cfg.cross_check, "Compare against the other backend once");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const Backend backend = parse_backend(backend_name);
        if (gen->parsed()) {
            const auto db = gen_tpch_subset({gen_data.scale_factor, gen_data.seed});
            for (const auto& t : db.table_names()) {
                std::cout << fmt::format("{}: {} rows\n", t, db.row_count(t));
                if (!out_dir.empty()) write_table(db, t, out_dir);
            }
        } else if (load->parsed()) {
            Database db;
            const auto schema = read_schema_file(schema_path);
            const auto rows = load_tbl(db, schema, fs::path(tbl_path));
            db.seal();
            if (!load_dir_opt.empty()) write_table(db, schema.name, load_dir_opt);
            std::cout << fmt::format("{}: {} rows\n", schema.name, rows);
        } else if (query->parsed()) {
            const auto db = open_database(query_data);
            const auto [id, builder] = resolve_query(query_opts);
            print_result(run_plan(to_plan(builder, db), db, backend), output);
        } else if (mat->parsed()) {
            const auto db = open_database(mat_data);
            const auto [id, builder] = resolve_query(mat_opts);
            const auto out = run_plan(to_plan(builder, db), db, backend);
            const auto next = materialize(db, mat_name, out.table);
            const std::string dir = mat_out.empty() ? mat_data.data_dir : mat_out;
            if (!dir.empty()) write_table(next, mat_name, dir);
            std::cout << fmt::format("{}: {} rows\n", mat_name, out.table.row_count());
            if (!then_id.empty()) {
                QueryOptions follow = mat_opts;
                follow.id = then_id;
                follow.plan_file.clear();
                if (then_id == "q5f") follow.view = mat_name;
                const auto [fid, fb] = resolve_query(follow);
                print_result(run_plan(to_plan(fb, next), next, backend), output);
            }
        } else if (bench->parsed()) {
            const auto db = open_database(bench_data);
            const auto [id, builder] = resolve_query(bench_opts);
            const auto report = run_bench(id, to_plan(builder, db), db, backend, bench_cfg);
            if (output == "json") std::cout << report_to_json(report).dump() << '\n';
            else std::cout << report_to_text(report);
            if (report.cross_check && !report.cross_check->matches) return 3;
        }
    } catch (const std::exception& e) {
        std::string msg = e.what();
        std::replace(msg.begin(), msg.end(), '\n', ' ');
        std::cerr << "abr: " << msg << '\n';
        return 1;
    }
    return 0;
}
