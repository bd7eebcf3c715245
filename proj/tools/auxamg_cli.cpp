// Batch driver: generate or load a problem, build the hierarchy, solve, and
// emit machine-readable reports.
//
// Exit codes: 0 solved, 1 usage error, 2 did not converge within the
// iteration cap, 3 problem-data error (I/O, parse, structure, geometry).

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <auxamg/runner.hpp>

int main(int argc, char** argv) {
    CLI::App app{
        "auxamg: aggregation AMG solver on a quadtree auxiliary grid.\n"
        "Exit codes: 0 solved, 1 usage, 2 not converged, 3 bad problem data."};

    auxamg::RunConfig cfg;
    std::vector<int> sweeps;
    bool quiet = false;

    app.add_option("--gen", cfg.generator, "problem generator (poisson2d)");
    app.add_option("--n", cfg.sizes, "cells per side; repeat for a size sweep");
    app.add_option("--matrix", cfg.matrix_path, "Matrix Market system matrix");
    app.add_option("--coords", cfg.coords_path, "DoF coordinates, one 'x y' line each");
    app.add_option("--mesh", cfg.mesh_path, "triangle mesh file");
    app.add_option("--rtol", cfg.cycle.rtol, "relative residual target (default 1e-6)");
    app.add_option("--max-iters", cfg.cycle.max_outer, "outer iteration cap (default 100)");
    app.add_option("--inner", cfg.cycle.n_inner, "PCG steps per coarse correction (default 2)");
    app.add_option("--sweeps", sweeps, "pre,post smoothing sweeps (default 1,1)")
        ->delimiter(',')
        ->expected(0, 2);
    app.add_option("--max-directions", cfg.cycle.max_directions,
                   "orthogonalization window, 0 = keep all");
    app.add_option("--coarsest-size", cfg.setup.coarsest_size,
                   "stop coarsening at this level size (default 64)");
    app.add_flag("--strict-locality", cfg.setup.strict_locality,
                 "fail setup when couplings escape the 9-point stencil");
    app.add_flag("--lump-locality", cfg.setup.lump_locality,
                 "fold escaped couplings into the diagonal instead of dropping");
    app.add_option("--threads", cfg.threads, "worker threads (default 1)");
    app.add_option("--report", cfg.report_path, "report file (default stdout)");
    app.add_option("--residuals", cfg.residual_path,
                   "residual-history file (csv format only; default <report>.residuals)");
    app.add_option("--format", cfg.format, "csv or jsonl (default csv)");
    app.add_flag("-q,--quiet", quiet, "suppress the per-run summary on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    if (sweeps.size() == 1) {
        cfg.cycle.pre_sweeps = cfg.cycle.post_sweeps = sweeps[0];
    } else if (sweeps.size() == 2) {
        cfg.cycle.pre_sweeps = sweeps[0];
        cfg.cycle.post_sweeps = sweeps[1];
    }
    cfg.verbosity = quiet ? 0 : 1;

    try {
        const std::vector<auxamg::RunReport> reports = auxamg::run(cfg);
        auxamg::emit_report(reports, cfg, std::cout);
        bool all_converged = true;
        for (const auxamg::RunReport& r : reports) {
            if (cfg.verbosity > 0)
                std::fprintf(stderr,
                             "%s: N=%ld levels=%d opcx=%.3f iters=%d %s "
                             "setup=%.3fs solve=%.3fs total=%.3fs\n",
                             r.label.c_str(), r.n, r.hier.levels, r.hier.operator_complexity,
                             r.iterations, r.converged ? "converged" : "NOT CONVERGED", r.setup_s,
                             r.solve_s, r.total_s);
            all_converged = all_converged && r.converged;
        }
        return all_converged ? 0 : 2;
    } catch (const auxamg::argument_error& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const auxamg::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
