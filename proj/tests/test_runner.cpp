#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "auxamg/runner.hpp"
#include "testgen.hpp"

using namespace auxamg;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("auxamg_test_" + name);
}

RunConfig poisson_config(std::vector<int> sizes) {
    RunConfig cfg;
    cfg.generator = "poisson2d";
    cfg.sizes = std::move(sizes);
    return cfg;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

}  // namespace

TEST_CASE("run executes a generator sweep and fills the report") {
    const std::vector<RunReport> reports = run(poisson_config({16}));
    REQUIRE(reports.size() == 1);
    const RunReport& r = reports[0];
    CHECK(r.label == "poisson2d-16");
    CHECK(r.n == 225);
    CHECK(r.nnz == 1065);
    CHECK(r.hier.levels == 2);
    CHECK(r.converged);
    CHECK(r.iterations > 0);
    CHECK(r.residual_history.size() == static_cast<std::size_t>(r.iterations) + 1);
    CHECK(r.hier.operator_complexity >= 1.0);
    CHECK(r.setup_s >= 0.0);
    CHECK(r.solve_s >= 0.0);
    CHECK(r.total_s >= r.setup_s);
}

TEST_CASE("iteration counts stay flat across a size sweep") {
    RunConfig cfg = poisson_config({17, 33});
    cfg.setup.coarsest_size = 16;
    const std::vector<RunReport> reports = run(cfg);
    REQUIRE(reports.size() == 2);
    CHECK(reports[0].n == 256);
    CHECK(reports[1].n == 1024);
    CHECK(reports[0].converged);
    CHECK(reports[1].converged);
    CHECK(reports[1].iterations <= 2 * reports[0].iterations + 2);
}

TEST_CASE("runs are deterministic") {
    const RunConfig cfg = poisson_config({16});
    const std::vector<RunReport> a = run(cfg);
    const std::vector<RunReport> b = run(cfg);
    CHECK(a[0].residual_history == b[0].residual_history);
    CHECK(a[0].iterations == b[0].iterations);
}

TEST_CASE("write_csv emits the documented columns") {
    const std::vector<RunReport> reports = run(poisson_config({16}));
    std::ostringstream out;
    write_csv(reports, out);
    const auto lines = split_lines(out.str());
    REQUIRE(lines.size() == 2);
    CHECK(lines[0] == "N,levels,opcomplexity,iters,setup_s,solve_s,total_s,converged");
    long n = 0;
    int levels = 0, iters = 0, conv = -1;
    double opc = 0.0, setup_s = 0.0, solve_s = 0.0, total_s = 0.0;
    REQUIRE(std::sscanf(lines[1].c_str(), "%ld,%d,%lf,%d,%lf,%lf,%lf,%d", &n, &levels, &opc,
                        &iters, &setup_s, &solve_s, &total_s, &conv) == 8);
    CHECK(n == 225);
    CHECK(levels == 2);
    CHECK(iters == reports[0].iterations);
    CHECK(conv == 1);
    CHECK(opc >= 1.0);
}

TEST_CASE("write_residuals lists every history entry exactly") {
    const std::vector<RunReport> reports = run(poisson_config({16}));
    std::ostringstream out;
    write_residuals(reports, out);
    const auto lines = split_lines(out.str());
    REQUIRE(lines.size() == reports[0].residual_history.size() + 1);
    CHECK(lines[0] == "N,iter,residual");
    for (std::size_t i = 0; i < reports[0].residual_history.size(); ++i) {
        long n = 0, iter = -1;
        double res = -1.0;
        REQUIRE(std::sscanf(lines[i + 1].c_str(), "%ld,%ld,%lf", &n, &iter, &res) == 3);
        CHECK(n == 225);
        CHECK(iter == static_cast<long>(i));
        // %.17g round-trips doubles exactly.
        CHECK(res == reports[0].residual_history[i]);
    }
}

TEST_CASE("write_jsonl round-trips through a JSON parser") {
    RunConfig cfg = poisson_config({16, 17});
    const std::vector<RunReport> reports = run(cfg);
    std::ostringstream out;
    write_jsonl(reports, out);
    const auto lines = split_lines(out.str());
    REQUIRE(lines.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        const nlohmann::json j = nlohmann::json::parse(lines[i]);
        CHECK(j["label"] == reports[i].label);
        CHECK(j["n"] == reports[i].n);
        CHECK(j["nnz"] == reports[i].nnz);
        CHECK(j["levels"] == reports[i].hier.levels);
        CHECK(j["level_sizes"].get<std::vector<long>>() == reports[i].hier.sizes);
        CHECK(j["iters"] == reports[i].iterations);
        CHECK(j["converged"] == reports[i].converged);
        CHECK(j["residual_history"].get<std::vector<double>>() == reports[i].residual_history);
    }
}

TEST_CASE("emit_report writes files and the CSV residual sidecar") {
    const std::vector<RunReport> reports = run(poisson_config({16}));
    const auto path = temp_file("report.csv");

    RunConfig cfg = poisson_config({16});
    cfg.report_path = path.string();
    std::ostringstream fallback;
    emit_report(reports, cfg, fallback);
    CHECK(fallback.str().empty());
    CHECK(std::filesystem::exists(path));
    CHECK(std::filesystem::exists(path.string() + ".residuals"));
    std::filesystem::remove(path);
    std::filesystem::remove(path.string() + ".residuals");

    // Without a path, the report goes to the fallback stream.
    RunConfig stdout_cfg = poisson_config({16});
    std::ostringstream captured;
    emit_report(reports, stdout_cfg, captured);
    CHECK_FALSE(captured.str().empty());

    RunConfig bad = poisson_config({16});
    bad.format = "xml";
    CHECK_THROWS_AS(emit_report(reports, bad, captured), argument_error);
}

TEST_CASE("a mesh file is a complete problem source") {
    const TriMesh mesh = structured_split_mesh(8);
    const auto path = temp_file("runner.mesh");
    {
        std::ofstream out(path);
        out.precision(17);
        out << "NODES " << mesh.nodes.size() << "\n";
        for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
            out << i + 1 << " " << mesh.nodes[i].x << " " << mesh.nodes[i].y << "\n";
        out << "ELEMENTS " << mesh.triangles.size() << "\n";
        for (std::size_t e = 0; e < mesh.triangles.size(); ++e)
            out << e + 1 << " " << mesh.triangles[e][0] + 1 << " " << mesh.triangles[e][1] + 1
                << " " << mesh.triangles[e][2] + 1 << "\n";
    }
    RunConfig cfg;
    cfg.mesh_path = path.string();
    const std::vector<RunReport> reports = run(cfg);
    REQUIRE(reports.size() == 1);
    CHECK(reports[0].n == 49);
    CHECK(reports[0].converged);
    CHECK(reports[0].label == path.string());
    std::filesystem::remove(path);
}

TEST_CASE("config validation rejects ambiguous or incomplete sources") {
    RunConfig both = poisson_config({16});
    both.mesh_path = "some.mesh";
    CHECK_THROWS_AS(run(both), argument_error);

    RunConfig none;
    CHECK_THROWS_AS(run(none), argument_error);

    RunConfig no_sizes;
    no_sizes.generator = "poisson2d";
    CHECK_THROWS_AS(run(no_sizes), argument_error);

    RunConfig unknown = poisson_config({16});
    unknown.generator = "helmholtz";
    CHECK_THROWS_AS(run(unknown), argument_error);

    RunConfig matrix_only;
    matrix_only.matrix_path = "a.mtx";
    CHECK_THROWS_AS(run(matrix_only), argument_error);

    // Coordinate count must match the matrix order.
    const auto mtx = temp_file("mismatch.mtx");
    const auto crd = temp_file("mismatch.coords");
    {
        std::ofstream out(mtx);
        out << "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 4.0\n2 2 4.0\n";
        std::ofstream cout_(crd);
        cout_ << "0.0 0.0\n";
    }
    RunConfig mismatch;
    mismatch.matrix_path = mtx.string();
    mismatch.coords_path = crd.string();
    CHECK_THROWS_AS(run(mismatch), size_error);
    std::filesystem::remove(mtx);
    std::filesystem::remove(crd);

    RunConfig bad_cycle = poisson_config({16});
    bad_cycle.cycle.rtol = 2.0;
    CHECK_THROWS_AS(run(bad_cycle), argument_error);
}
