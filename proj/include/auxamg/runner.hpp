/// @file runner.hpp
/// @brief Batch orchestration: build a problem from one of three sources,
///        run setup + solve, and emit CSV or JSON-lines reports.

#ifndef AUXAMG_RUNNER_HPP
#define AUXAMG_RUNNER_HPP

#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cycle.hpp"
#include "errors.hpp"
#include "hierarchy.hpp"
#include "matrix_market.hpp"
#include "parallel.hpp"
#include "problems.hpp"

namespace auxamg {

/// One batch run: exactly one problem source must be set. `sizes` holds one
/// or more generator sizes (several = a sweep producing one report each).
struct RunConfig {
    std::string generator;          // "poisson2d"
    std::vector<int> sizes;
    std::string matrix_path;        // Matrix Market file, with...
    std::string coords_path;        // ...one "x y" line per DoF
    std::string mesh_path;

    SetupOptions setup;
    CycleOptions cycle;
    int threads = 1;

    std::string report_path;        // empty = stdout
    std::string residual_path;      // empty = derived from report_path
    std::string format = "csv";     // csv | jsonl
    int verbosity = 1;
};

struct RunReport {
    std::string label;
    long n = 0;
    long nnz = 0;
    HierarchyStats hier;
    int iterations = 0;
    bool converged = false;
    double setup_s = 0.0;
    double solve_s = 0.0;
    double total_s = 0.0;
    std::vector<double> residual_history;
};

namespace detail {

inline int count_sources(const RunConfig& c) {
    return (c.generator.empty() ? 0 : 1) + (c.matrix_path.empty() ? 0 : 1) +
           (c.mesh_path.empty() ? 0 : 1);
}

inline LinearSystem load_problem(const RunConfig& c, int size) {
    if (!c.generator.empty()) {
        if (c.generator != "poisson2d")
            throw argument_error("unknown generator '" + c.generator + "'");
        return gen_poisson_uniform2d(size);
    }
    if (!c.matrix_path.empty()) {
        if (c.coords_path.empty())
            throw argument_error("--matrix requires --coords (the method needs DoF coordinates)");
        LinearSystem sys;
        sys.A = read_matrix_market(c.matrix_path);
        sys.coords = read_coords(c.coords_path);
        if (static_cast<int>(sys.coords.size()) != sys.A.n_rows)
            throw size_error("coordinate count does not match matrix order");
        sys.b.assign(sys.A.n_rows, 1.0);
        return sys;
    }
    return assemble_fem_triangle(read_mesh(c.mesh_path));
}

} // namespace detail

/// Executes one problem instance end to end.
inline RunReport run_one(const RunConfig& config, int size) {
    set_num_threads(config.threads);
    const auto t0 = std::chrono::steady_clock::now();

    LinearSystem sys = detail::load_problem(config, size);
    RunReport rep;
    rep.label = config.generator.empty()
                    ? (config.matrix_path.empty() ? config.mesh_path : config.matrix_path)
                    : config.generator + "-" + std::to_string(size);
    rep.n = sys.A.n_rows;
    rep.nnz = sys.A.nnz();

    const auto t1 = std::chrono::steady_clock::now();
    Hierarchy h = setup_hierarchy(sys.A, sys.coords, config.setup);
    const auto t2 = std::chrono::steady_clock::now();
    rep.setup_s = std::chrono::duration<double>(t2 - t1).count();
    rep.hier = stats(h);

    SolveResult sol = solve(sys.A, sys.b, h, config.cycle);
    rep.solve_s = sol.solve_seconds;
    rep.iterations = sol.iterations;
    rep.converged = sol.converged;
    rep.residual_history = std::move(sol.residual_history);
    rep.total_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

/// Runs the whole config: one report per generator size, or a single report
/// for file-based sources.
inline std::vector<RunReport> run(const RunConfig& config) {
    if (detail::count_sources(config) != 1)
        throw argument_error("exactly one of --gen, --matrix, --mesh must be given");
    if (!config.generator.empty() && config.sizes.empty())
        throw argument_error("--gen requires at least one --n");
    validate(config.cycle);

    std::vector<RunReport> reports;
    if (config.generator.empty()) {
        reports.push_back(run_one(config, 0));
    } else {
        for (int n : config.sizes) reports.push_back(run_one(config, n));
    }
    return reports;
}

inline void write_csv(const std::vector<RunReport>& reports, std::ostream& out) {
    out << "N,levels,opcomplexity,iters,setup_s,solve_s,total_s,converged\n";
    char buf[160];
    for (const RunReport& r : reports) {
        std::snprintf(buf, sizeof buf, "%ld,%d,%.4f,%d,%.3f,%.3f,%.3f,%d\n", r.n, r.hier.levels,
                      r.hier.operator_complexity, r.iterations, r.setup_s, r.solve_s, r.total_s,
                      r.converged ? 1 : 0);
        out << buf;
    }
}

/// One "N,iter,residual" line per history entry, all runs concatenated.
inline void write_residuals(const std::vector<RunReport>& reports, std::ostream& out) {
    out << "N,iter,residual\n";
    char buf[96];
    for (const RunReport& r : reports)
        for (std::size_t i = 0; i < r.residual_history.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%ld,%zu,%.17g\n", r.n, i, r.residual_history[i]);
            out << buf;
        }
}

inline void write_jsonl(const std::vector<RunReport>& reports, std::ostream& out) {
    for (const RunReport& r : reports) {
        nlohmann::json j;
        j["label"] = r.label;
        j["n"] = r.n;
        j["nnz"] = r.nnz;
        j["levels"] = r.hier.levels;
        j["level_sizes"] = r.hier.sizes;
        j["level_nnz"] = r.hier.nnz;
        j["opcomplexity"] = r.hier.operator_complexity;
        j["iters"] = r.iterations;
        j["converged"] = r.converged;
        j["setup_s"] = r.setup_s;
        j["solve_s"] = r.solve_s;
        j["total_s"] = r.total_s;
        j["residual_history"] = r.residual_history;
        out << j.dump() << '\n';
    }
}

/// Writes the report (and, for CSV, the residual-history sidecar file).
inline void emit_report(const std::vector<RunReport>& reports, const RunConfig& config,
                        std::ostream& fallback) {
    std::ofstream file;
    std::ostream* out = &fallback;
    if (!config.report_path.empty()) {
        file.open(config.report_path);
        if (!file) throw io_error("cannot open " + config.report_path + " for writing");
        out = &file;
    }
    if (config.format == "jsonl") {
        write_jsonl(reports, *out);
        return;
    }
    if (config.format != "csv") throw argument_error("format must be csv or jsonl");
    write_csv(reports, *out);
    std::string rpath = config.residual_path;
    if (rpath.empty() && !config.report_path.empty()) rpath = config.report_path + ".residuals";
    if (!rpath.empty()) {
        std::ofstream rfile(rpath);
        if (!rfile) throw io_error("cannot open " + rpath + " for writing");
        write_residuals(reports, rfile);
    }
}

} // namespace auxamg

#endif // AUXAMG_RUNNER_HPP
