#include "hypres/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <functional>

#include "hypres/floquet.hpp"
#include "hypres/io.hpp"
#include "hypres/oracle.hpp"
#include "hypres/orbits.hpp"

namespace hypres {

namespace fs = std::filesystem;

namespace {

json versions_json() {
    return {{"hypres", kVersion},
            {"manifest", kManifestVersion},
            {"lattice_csv", kLatticeCsvVersion},
            {"scatter_csv", kScatterCsvVersion},
            {"det_scan_csv", 1}};
}

void save_manifest(const RunManifest& m) { write_json_file(m.output_dir / "manifest.json", to_json(m)); }

json floquet_family_json(const std::vector<FloquetData>& data) {
    json a = json::array();
    for (const auto& d : data) a.push_back(to_json(d));
    return a;
}

ResonanceLattice lattice_of_points(const std::vector<cplx>& pts, double h) {
    ResonanceLattice lat;
    lat.h = h;
    for (auto z : pts) {
        LatticeEntry e;
        e.z = z;
        lat.entries.push_back(e);
    }
    return lat;
}

// same label truncation as solve_bs: |k|_1 <= k_bound
ResonanceLattice restrict_to_window(const ResonanceLattice& lat, const SpectralWindow& w) {
    ResonanceLattice out;
    out.h = lat.h;
    const int kb = w.k_bound(lat.h);
    for (const auto& e : lat.entries) {
        int k1 = 0;
        for (int k : e.k) k1 += k;
        if (k1 <= kb && w.contains(e.z, 1e-9 * lat.h)) out.entries.push_back(e);
    }
    return out;
}

int lattice_arity(const ResonanceLattice& lat, int fallback) {
    return lat.entries.empty() ? fallback : static_cast<int>(lat.entries.front().k.size());
}

bool ends_with(const std::string& s, const std::string& tail) {
    return s.size() >= tail.size() && s.compare(s.size() - tail.size(), tail.size(), tail) == 0;
}

}  // namespace

fs::path RunManifest::path_of(const std::string& key) const {
    auto it = outputs.find(key);
    if (it == outputs.end()) throw DependencyError("manifest has no output '" + key + "'");
    return output_dir / it->second;
}

json to_json(const RunManifest& m) {
    return {{"config_hash", m.config_hash},
            {"versions", m.versions},
            {"config", m.config},
            {"output_dir", m.output_dir.string()},
            {"outputs", m.outputs},
            {"wall_times", m.wall_times},
            {"status", m.status},
            {"failed_stage", m.failed_stage},
            {"error", m.error},
            {"summary", m.summary}};
}

RunManifest manifest_from_json(const json& j) {
    RunManifest m;
    try {
        m.config_hash = j.at("config_hash").get<std::string>();
        m.versions = j.at("versions");
        m.config = j.at("config");
        m.output_dir = j.at("output_dir").get<std::string>();
        m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
        m.wall_times = j.at("wall_times").get<std::map<std::string, double>>();
        m.status = j.at("status").get<std::string>();
        m.failed_stage = j.at("failed_stage").get<std::string>();
        m.error = j.at("error").get<std::string>();
        m.summary = j.at("summary");
    } catch (const json::exception& e) {
        throw SchemaError(std::string("bad manifest: ") + e.what());
    }
    return m;
}

RunManifest load_manifest(const fs::path& path) {
    RunManifest m = manifest_from_json(read_json_file(path));
    // the manifest may have been moved together with its directory
    m.output_dir = path.parent_path();
    return m;
}

RunManifest run_pipeline(const RunConfig& cfg) {
    RunManifest man;
    man.config = to_json(cfg);
    man.config_hash = hex64(fnv1a64(man.config.dump()));
    man.versions = versions_json();
    man.output_dir = cfg.output_dir;
    man.status = "running";
    fs::create_directories(man.output_dir);

    auto emit = [&](const std::string& key, const std::string& file, const std::string& text) {
        write_text_file(man.output_dir / file, text);
        man.outputs[key] = file;
    };
    auto stage = [&](const std::string& name, const std::function<void()>& body) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body();
        } catch (const std::exception& e) {
            man.wall_times[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            man.status = "failed";
            man.failed_stage = name;
            man.error = e.what();
            save_manifest(man);
            std::throw_with_nested(StageError(name, e.what()));
        }
        man.wall_times[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    HamiltonianSystem sys;
    OrbitFamily family;
    std::vector<FloquetData> floq;
    SemiclassicalAction action;
    Conventions conv = cfg.calibration.conventions;
    ResonanceLattice lattice;
    int g_ell = 0;

    stage("orbit", [&] {
        sys = make_system(cfg.system);
        if (sys.dof() < 2) throw ConfigError("the pipeline needs at least two degrees of freedom");
        ShootingOptions opt;
        opt.tol = cfg.tol.shooting;
        opt.samples = cfg.orbit.samples;
        opt.integration_tol = cfg.tol.integration;
        const PeriodicOrbit seed =
            find_periodic_orbit(sys, PhasePoint::from_stacked(cfg.orbit.guess), cfg.orbit.period, opt);
        family = continue_family(sys, seed, cfg.orbit.e_min, cfg.orbit.e_max, cfg.orbit.nodes, opt);
        if (family.failure) throw NoConvergence("continuation stopped: " + *family.failure, 0.0);
        emit("orbit", "orbit.json", to_json(seed).dump(2) + "\n");
        emit("family", "family.json", to_json(family).dump(2) + "\n");
        man.summary["family_nodes"] = family.orbits.size();
        man.summary["action_derivative_rel_err"] = action_derivative_check(family).max_rel_err;
    });

    stage("floquet", [&] {
        for (const auto& o : family.orbits)
            floq.push_back(floquet_analysis(sys, o, std::max(cfg.tol.integration, 1e-13), cfg.tol.floquet));
        const std::size_t mid = floq.size() / 2;
        g_ell = floq[mid].g_ell;
        for (const auto& f : floq) {
            if (!f.nondegenerate) throw DegeneracyError("degenerate orbit at E = " + format_double(f.energy));
            if (f.tags != floq[mid].tags) throw DegeneracyError("exponent types change along the family");
        }
        emit("floquet", "floquet.json", floquet_family_json(floq).dump(2) + "\n");
        man.summary["g_ell"] = g_ell;
    });

    stage("action", [&] {
        action = assemble_action(family, floq, sys, g_ell, cfg.h);
        json tab = json::array();
        for (std::size_t i = 0; i < family.orbits.size(); ++i) {
            const double e = family.energies(static_cast<Eigen::Index>(i));
            json mus = json::array();
            for (int j = 0; j < action.d(); ++j) {
                const cplx m = action.mu(static_cast<std::size_t>(j), e);
                mus.push_back({m.real(), m.imag()});
            }
            tab.push_back({{"energy", e},
                           {"period", family.periods(static_cast<Eigen::Index>(i))},
                           {"s0", action.s0(e).real()},
                           {"s1", {action.s1(e, conv).real(), action.s1(e, conv).imag()}},
                           {"mu", mus}});
        }
        json tags = json::array();
        for (auto t : action.tags()) tags.push_back(to_string(t));
        json out = {{"h", cfg.h}, {"g_ell", g_ell}, {"tags", tags}, {"windings", action.windings()},
                    {"conventions", to_json(conv)}, {"nodes", tab}};
        emit("action", "action.json", out.dump(2) + "\n");
    });

    const bool separable = cfg.oracle.kind == "separable";
    auto reference = [&] {
        const double omega = cfg.system.builtin == "semihyp3" ? cfg.system.omega : -1.0;
        return separable_reference(cfg.h, omega, cfg.oracle.k_max, cfg.oracle.n_max, cfg.oracle.l_max);
    };

    if (cfg.calibration.search) {
        stage("calibrate", [&] {
            if (!separable) throw ConfigError("calibration search needs the separable oracle");
            const CalibrationReport rep =
                calibrate_conventions(action, cfg.window, reference(), cfg.tol.calibration * cfg.h);
            emit("calibration", "calibration.json", to_json(rep).dump(2) + "\n");
            if (rep.candidates == 0) throw CalibrationFailure("no convention tuple matches the reference");
            conv = rep.conventions;
            man.summary["calibration_unique"] = rep.unique;
        });
    }

    stage("bs", [&] {
        BsOptions opt;
        opt.residual_factor = cfg.tol.bs_residual_factor;
        lattice = solve_bs(action, cfg.window, conv, opt);
        emit("lattice_csv", "lattice.csv", lattice_to_csv(lattice, action.d()));
        emit("lattice_json", "lattice.json", to_json(lattice).dump(2) + "\n");
        man.summary["lattice_size"] = lattice.entries.size();
    });

    if (cfg.oracle.kind != "none") {
        ResonanceLattice oracle_lat;
        stage("oracle", [&] {
            if (cfg.oracle.kind == "model-exact") {
                oracle_lat = model_resonances(ModelSpec::hyperbolic(cfg.system.mu, cfg.h), cfg.window);
                emit("oracle_lattice_csv", "oracle.csv", lattice_to_csv(oracle_lat, lattice_arity(oracle_lat, 1)));
            } else if (cfg.oracle.kind == "separable") {
                oracle_lat = restrict_to_window(reference(), cfg.window);
                emit("oracle_lattice_csv", "oracle.csv", lattice_to_csv(oracle_lat, lattice_arity(oracle_lat, 2)));
            } else {
                GridSpec1D grid;
                grid.l = cfg.oracle.l;
                grid.n = cfg.oracle.n;
                grid.theta = cfg.oracle.theta;
                grid.h = cfg.h;
                // widened by the pairing tolerance so lattice points on the
                // window edge still find their partner
                SpectralWindow wide = cfg.window;
                wide.eps0 += cfg.comparison_tol();
                wide.depth += cfg.comparison_tol();
                const EigenResult eig = eigenvalues_in_window(
                    scaled_model_operator(cfg.system.mu, grid, cfg.oracle.n_fourier), wide);
                emit("oracle_scatter_csv", "oracle.csv", scatter_to_csv(eig.eigenvalues));
                emit("oracle_eigen", "oracle_eigen.json", to_json(eig).dump(2) + "\n");
                oracle_lat = lattice_of_points(eig.eigenvalues, cfg.h);
            }
        });
        stage("compare", [&] {
            const double tol = cfg.comparison_tol();
            const LatticeDiff diff = lattice_diff(lattice, oracle_lat, tol);
            json rep = to_json(diff);
            rep["tolerance"] = tol;
            rep["lattice_size"] = lattice.entries.size();
            rep["oracle_size"] = oracle_lat.entries.size();
            emit("comparison", "comparison.json", rep.dump(2) + "\n");
            man.summary["comparison_max_err"] = diff.max_err;
            man.summary["comparison_matched"] = diff.matched;
        });
    }

    man.status = "complete";
    save_manifest(man);
    return man;
}

void verify_manifest(const RunManifest& m) {
    for (const auto& [key, file] : m.outputs) {
        const fs::path p = m.output_dir / file;
        if (!fs::exists(p)) throw DependencyError("missing output " + p.string());
        const std::string text = read_text_file(p);
        bool same = true;
        if (ends_with(file, ".json")) {
            const json j = json::parse(text);
            json back;
            if (key == "orbit") back = to_json(orbit_from_json(j));
            else if (key == "family") back = to_json(family_from_json(j));
            else if (key == "floquet") {
                back = json::array();
                for (const auto& e : j) back.push_back(to_json(floquet_from_json(e)));
            } else if (key == "lattice_json") back = to_json(lattice_from_json(j));
            else if (key == "oracle_eigen") back = to_json(eigen_from_json(j));
            else if (key == "calibration") back = to_json(calibration_from_json(j));
            else if (key == "comparison") {
                back = to_json(diff_from_json(j));
                for (const char* extra : {"tolerance", "lattice_size", "oracle_size"}) back[extra] = j.at(extra);
            } else back = j;
            same = back == j;
        } else if (key == "lattice_csv" || key == "oracle_lattice_csv") {
            const ResonanceLattice lat = lattice_from_csv(text);
            same = lattice_to_csv(lat, lattice_arity(lat, 0)) == text || lat.entries.empty();
        } else if (key.rfind("det_scan", 0) == 0 || ends_with(key, "det_scan")) {
            same = text.rfind("re_z,im_z,abs_det\n", 0) == 0;
        } else {
            same = scatter_to_csv(scatter_from_csv(text)) == text;
        }
        if (!same) throw SchemaError("output '" + key + "' does not round-trip");
    }
}

std::vector<fs::path> emit_plot_data(RunManifest& m) {
    if (!m.outputs.count("lattice_csv")) throw DependencyError("emit_plot_data needs the lattice output");
    std::vector<fs::path> written;
    auto put = [&](const std::string& key, const std::string& file, const std::string& text) {
        write_text_file(m.output_dir / file, text);
        m.outputs[key] = file;
        written.push_back(m.output_dir / file);
    };
    const ResonanceLattice lat = lattice_from_csv(read_text_file(m.path_of("lattice_csv")));
    put("plot_lattice", "plot_lattice.csv", scatter_to_csv(lattice_points(lat)));
    if (m.outputs.count("oracle_lattice_csv")) {
        const ResonanceLattice o = lattice_from_csv(read_text_file(m.path_of("oracle_lattice_csv")));
        put("plot_oracle", "plot_oracle.csv", scatter_to_csv(lattice_points(o)));
    } else if (m.outputs.count("oracle_scatter_csv")) {
        put("plot_oracle", "plot_oracle.csv", read_text_file(m.path_of("oracle_scatter_csv")));
    }
    const json& sys = m.config.at("system");
    if (sys.contains("builtin") && sys.at("builtin") == "model") {
        const double h = m.config.at("h").get<double>();
        const SpectralWindow w = window_from_json(m.config.at("window"));
        const ModelSpec spec = ModelSpec::hyperbolic(sys.at("mu").get<double>(), h);
        put("plot_det_scan", "plot_det_scan.csv",
            det_scan_csv(spec, w.e0 - w.eps0, w.e0 + w.eps0, -w.depth, 0.0, 121, 41, w.k_bound(h)));
    }
    save_manifest(m);
    return written;
}

std::string det_scan_csv(const ModelSpec& spec, double re_min, double re_max, double im_min,
                         double im_max, int n_re, int n_im, int k_max) {
    if (n_re < 2 || n_im < 2) throw ContractError("det_scan_csv: need at least 2 points per axis");
    std::string out = "re_z,im_z,abs_det\n";
    for (int b = 0; b < n_im; ++b) {
        const double im = im_min + (im_max - im_min) * b / (n_im - 1);
        for (int a = 0; a < n_re; ++a) {
            const double re = re_min + (re_max - re_min) * a / (n_re - 1);
            const double v = std::abs(truncated_monodromy_determinant(spec, cplx(re, im), k_max));
            out += format_double(re) + "," + format_double(im) + "," + format_double(v) + "\n";
        }
    }
    return out;
}

}  // namespace hypres
