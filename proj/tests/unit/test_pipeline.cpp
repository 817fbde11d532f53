#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include "hypres/errors.hpp"
#include "hypres/io.hpp"
#include "hypres/pipeline.hpp"

using namespace hypres;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("hypres_pipeline_" + name);
    fs::remove_all(p);
    return p;
}

RunConfig model_run(const fs::path& out) {
    return parse_run_config(json{{"system", {{"builtin", "model"}}},
                                 {"h", 0.01},
                                 {"window", {{"e0", 0.0}, {"eps0", 0.05}, {"depth", 0.05}}},
                                 {"oracle", {{"kind", "model-exact"}}},
                                 {"output_dir", out.string()}});
}

}  // namespace

TEST_CASE("model pipeline matches the exact lattice") {
    const fs::path dir = scratch("model");
    RunManifest m = run_pipeline(model_run(dir));
    CHECK(m.status == "complete");
    CHECK(m.summary["lattice_size"] == 55);
    CHECK(m.summary["comparison_matched"] == 55);
    CHECK(m.summary["comparison_max_err"].get<double>() <= 1e-12);
    CHECK(m.summary["action_derivative_rel_err"].get<double>() <= 1e-5);
    CHECK_NOTHROW(verify_manifest(m));

    const RunManifest loaded = load_manifest(dir / "manifest.json");
    CHECK(loaded.config_hash == m.config_hash);
    CHECK(loaded.outputs == m.outputs);

    const ResonanceLattice lat = lattice_from_csv(read_text_file(m.path_of("lattice_csv")), 0.01);
    CHECK(lat.entries.size() == 55);
    for (const auto& e : lat.entries) {
        // h m - i h (k + 1/2) up to the sign of m
        CHECK(std::abs(e.z.imag() + 0.01 * (e.k[0] + 0.5)) < 1e-14);
        CHECK(std::abs(std::abs(e.z.real()) - 0.01 * std::abs(e.m)) < 1e-14);
    }
    fs::remove_all(dir);
}

TEST_CASE("pipeline output is deterministic") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    RunManifest ma = run_pipeline(model_run(a));
    RunManifest mb = run_pipeline(model_run(b));
    CHECK(ma.config_hash != mb.config_hash);  // output_dir is part of the config
    for (const auto& key : {"lattice_csv", "lattice_json", "floquet", "action"})
        CHECK(read_text_file(ma.path_of(key)) == read_text_file(mb.path_of(key)));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("plot data") {
    const fs::path dir = scratch("plot");
    RunManifest m = run_pipeline(model_run(dir));
    const auto files = emit_plot_data(m);
    CHECK(files.size() == 3);
    for (const auto& f : files) CHECK(fs::exists(f));
    const std::string scan = read_text_file(dir / "plot_det_scan.csv");
    CHECK(scan.rfind("re_z,im_z,abs_det\n", 0) == 0);
    CHECK(load_manifest(dir / "manifest.json").outputs.count("plot_det_scan"));
    fs::remove_all(dir);
}

TEST_CASE("det scan vanishes next to lattice points") {
    const ModelSpec spec = ModelSpec::hyperbolic(1.0, 0.01);
    // 3 x 3 grid around the zero 0.01 - 0.005 i, half a lattice step wide
    const std::string csv = det_scan_csv(spec, 0.005, 0.015, -0.01, 0.0, 3, 3, 2);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    double at_zero = -1.0, elsewhere = INFINITY;
    while (std::getline(in, line)) {
        double re, im, v;
        CHECK(std::sscanf(line.c_str(), "%lf,%lf,%lf", &re, &im, &v) == 3);
        if (std::abs(re - 0.01) < 1e-12 && std::abs(im + 0.005) < 1e-12)
            at_zero = v;
        else if (std::abs(im + 0.005) < 1e-12)
            elsewhere = std::min(elsewhere, v);
    }
    CHECK(at_zero >= 0.0);
    CHECK(at_zero < 1e-6 * elsewhere);
}

TEST_CASE("hyp2 pipeline against the separable oracle") {
    const fs::path dir = scratch("hyp2");
    const RunConfig c = parse_run_config(json{{"system", {{"builtin", "hyp2"}}},
                                              {"h", 0.02},
                                              {"calibration", {{"g_ell_offset", 2}}},
                                              {"oracle", {{"kind", "separable"}}},
                                              {"output_dir", dir.string()}});
    RunManifest m = run_pipeline(c);
    CHECK(m.summary["lattice_size"].get<int>() >= 20);
    CHECK(m.summary["comparison_matched"] == m.summary["lattice_size"]);
    CHECK(m.summary["comparison_max_err"].get<double>() <= 1e-2 * 0.02);
    CHECK(m.summary["g_ell"] == 0);
    fs::remove_all(dir);
}

TEST_CASE("empty window gives a header-only lattice") {
    const fs::path dir = scratch("empty");
    RunConfig c = model_run(dir);
    c.window = SpectralWindow{0.005, 0.001, 0.05, 1.0};
    c.oracle.kind = "none";
    RunManifest m = run_pipeline(c);
    CHECK(m.summary["lattice_size"] == 0);
    CHECK(read_text_file(m.path_of("lattice_csv")) == "m,k1,re_z,im_z,residual,multiplicity\n");
    CHECK(emit_plot_data(m).size() == 2);  // no oracle scatter without an oracle
    RunManifest no_lattice = m;
    no_lattice.outputs.erase("lattice_csv");
    CHECK_THROWS_AS(emit_plot_data(no_lattice), DependencyError);
    fs::remove_all(dir);
}

TEST_CASE("a failing stage leaves a partial manifest") {
    const fs::path dir = scratch("fail");
    RunConfig c = parse_run_config(json{{"system", {{"builtin", "hyp2"}}},
                                        {"h", 0.02},
                                        {"orbit",
                                         {{"guess", {0.0, 0.0, 0.0, 0.0}},
                                          {"period", 6.3},
                                          {"e_min", 0.3},
                                          {"e_max", 0.7}}},
                                        {"output_dir", dir.string()}});
    try {
        run_pipeline(c);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "orbit");
        CHECK_THROWS_AS(std::rethrow_if_nested(e), FixedPointError);
    }
    const RunManifest m = load_manifest(dir / "manifest.json");
    CHECK(m.status == "failed");
    CHECK(m.failed_stage == "orbit");
    CHECK_FALSE(m.error.empty());
    fs::remove_all(dir);
}

TEST_CASE("verify_manifest notices missing files") {
    const fs::path dir = scratch("verify");
    RunConfig c = model_run(dir);
    c.oracle.kind = "none";
    RunManifest m = run_pipeline(c);
    fs::remove(m.path_of("lattice_csv"));
    CHECK_THROWS_AS(verify_manifest(m), DependencyError);
    fs::remove_all(dir);
}
