// hypres command-line driver
#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypres/circle_model.hpp"
#include "hypres/config.hpp"
#include "hypres/errors.hpp"
#include "hypres/floquet.hpp"
#include "hypres/io.hpp"
#include "hypres/model_quantum.hpp"
#include "hypres/oracle.hpp"
#include "hypres/orbits.hpp"
#include "hypres/pipeline.hpp"

using namespace hypres;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kOther = 1, kSchema = 2, kNoConvergence = 3, kCalibration = 4 };

int exit_code_of(const std::exception& e) {
    if (const auto* s = dynamic_cast<const StageError*>(&e)) {
        try {
            std::rethrow_if_nested(*s);
        } catch (const std::exception& inner) {
            return exit_code_of(inner);
        }
        return kOther;
    }
    if (dynamic_cast<const SchemaError*>(&e) || dynamic_cast<const ConfigError*>(&e)) return kSchema;
    if (dynamic_cast<const NoConvergence*>(&e) || dynamic_cast<const IntegrationError*>(&e) ||
        dynamic_cast<const FixedPointError*>(&e))
        return kNoConvergence;
    if (dynamic_cast<const CalibrationFailure*>(&e)) return kCalibration;
    return kOther;
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_text_file(out, text);
}

Vec parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw SchemaError("bad number '" + item + "' in list");
        }
    }
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
    return out;
}

cplx parse_complex(const std::string& s) {
    const Vec v = parse_list(s);
    if (v.size() != 2) throw SchemaError("complex value must be 're,im'");
    return {v(0), v(1)};
}

struct SystemOpts {
    std::string label = "hyp2";
    double omega = 1.4142135623730951;
    double mu = 1.0;

    void add(CLI::App* app) {
        app->add_option("--system", label, "built-in system label")->capture_default_str();
        app->add_option("--omega", omega, "semihyp3 oscillator frequency")->capture_default_str();
        app->add_option("--mu", mu, "model hyperbolic rate")->capture_default_str();
    }
    HamiltonianSystem make() const { return builtin_system(label, omega, mu); }
};

struct WindowOpts {
    double e0 = 0.0, eps0 = 0.05, depth = 0.0, c_const = 1.0;

    void add(CLI::App* app) {
        app->add_option("--e0", e0, "window centre")->capture_default_str();
        app->add_option("--eps0", eps0, "window half width")->capture_default_str();
        app->add_option("--depth", depth, "window depth (default h log(1/h))");
        app->add_option("--c-const", c_const, "k bound constant")->capture_default_str();
    }
    SpectralWindow make(double h) const {
        SpectralWindow w = SpectralWindow::standard(e0, eps0, h, 1.0, c_const);
        if (depth > 0) w.depth = depth;
        w.validate();
        return w;
    }
};

// Reads a lattice CSV or a scatter CSV.
ResonanceLattice read_points(const std::string& path) {
    const std::string text = read_text_file(path);
    if (text.rfind("re_z,im_z", 0) == 0) {
        ResonanceLattice lat;
        for (auto z : scatter_from_csv(text)) {
            LatticeEntry e;
            e.z = z;
            lat.entries.push_back(e);
        }
        return lat;
    }
    return lattice_from_csv(text);
}

std::string floquet_table(const FloquetData& f) {
    std::ostringstream os;
    os << "energy " << format_double(f.energy) << "  nondegenerate " << f.nondegenerate << "  g_ell "
       << f.g_ell << "  symplectic_defect " << f.symplectic_defect << "\n";
    for (std::size_t j = 0; j < f.exponents.size(); ++j)
        os << "  " << to_string(f.tags[j]) << "  mu = " << format_double(f.exponents[j].real()) << " "
           << format_double(f.exponents[j].imag()) << "i  winding " << f.windings[j] << "\n";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hypres: resonances near hyperbolic periodic orbits"};
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    std::function<void()> action;

    // orbit find / continue
    auto* orbit = app.add_subcommand("orbit", "periodic orbits");
    orbit->require_subcommand(1);
    SystemOpts osys;
    std::string guess_s, out;
    double period = 0, tol = 1e-10, e_min = 0, e_max = 0;
    int samples = 256, nodes = 9;
    auto* ofind = orbit->add_subcommand("find", "shoot for one periodic orbit");
    auto* ocont = orbit->add_subcommand("continue", "continue a family in energy");
    for (auto* sc : {ofind, ocont}) {
        osys.add(sc);
        sc->add_option("--guess", guess_s, "stacked q,p guess")->required();
        sc->add_option("--period", period, "period guess")->required();
        sc->add_option("--tol", tol, "closing tolerance")->capture_default_str();
        sc->add_option("--samples", samples, "samples per orbit")->capture_default_str();
        sc->add_option("-o,--out", out, "output JSON (default stdout)");
    }
    ocont->add_option("--e-min", e_min)->required();
    ocont->add_option("--e-max", e_max)->required();
    ocont->add_option("--nodes", nodes)->capture_default_str();
    auto find_seed = [&] {
        const auto sys = osys.make();
        return std::make_pair(sys, find_periodic_orbit(sys, PhasePoint::from_stacked(parse_list(guess_s)), period,
                                                       tol, 40, samples));
    };
    ofind->callback([&] {
        action = [&] {
            auto [sys, o] = find_seed();
            emit(out, to_json(o).dump(2) + "\n");
        };
    });
    ocont->callback([&] {
        action = [&] {
            auto [sys, o] = find_seed();
            ShootingOptions opt;
            opt.tol = tol;
            opt.samples = samples;
            const OrbitFamily fam = continue_family(sys, o, e_min, e_max, nodes, opt);
            emit(out, to_json(fam).dump(2) + "\n");
            if (fam.failure) throw NoConvergence("continuation stopped: " + *fam.failure, 0.0);
        };
    });

    // floquet
    auto* floq = app.add_subcommand("floquet", "Floquet data of an orbit");
    SystemOpts fsys;
    std::string orbit_file;
    double ftol = 1e-6;
    fsys.add(floq);
    floq->add_option("--orbit", orbit_file, "orbit JSON")->required()->check(CLI::ExistingFile);
    floq->add_option("--tol", ftol, "classification tolerance")->capture_default_str();
    floq->add_option("-o,--out", out, "output JSON (default: table on stdout only)");
    floq->callback([&] {
        action = [&] {
            const PeriodicOrbit o = orbit_from_json(read_json_file(orbit_file));
            if (floq->count("--system") == 0) fsys.label = o.sys_label;
            const FloquetData f = floquet_analysis(fsys.make(), o, 1e-12, ftol);
            std::cout << floquet_table(f);
            if (!out.empty()) write_json_file(out, to_json(f));
        };
    });

    // action
    auto* act = app.add_subcommand("action", "semiclassical action along a family");
    SystemOpts asys;
    std::string family_file;
    double h = 0.05;
    asys.add(act);
    act->add_option("--family", family_file, "family JSON")->required()->check(CLI::ExistingFile);
    act->add_option("--h", h, "semiclassical parameter")->capture_default_str();
    act->add_option("-o,--out", out, "output JSON (default stdout)");
    act->callback([&] {
        action = [&] {
            const OrbitFamily fam = family_from_json(read_json_file(family_file));
            if (fam.orbits.empty()) throw SchemaError("family is empty");
            if (act->count("--system") == 0) asys.label = fam.orbits.front().sys_label;
            const auto sys = asys.make();
            std::vector<FloquetData> fl;
            for (const auto& o : fam.orbits) fl.push_back(floquet_analysis(sys, o));
            const int g = fl[fl.size() / 2].g_ell;
            const SemiclassicalAction a = assemble_action(fam, fl, sys, g, h);
            json rows = json::array();
            for (Eigen::Index i = 0; i < fam.energies.size(); ++i) {
                const double e = fam.energies(i);
                const cplx s1 = a.s1(e);
                rows.push_back({{"energy", e}, {"period", fam.periods(i)}, {"s0", a.s0(e).real()},
                                {"s1", {s1.real(), s1.imag()}}});
            }
            json res = {{"h", h}, {"g_ell", g}, {"derivative_check", action_derivative_check(fam).max_rel_err},
                        {"nodes", rows}};
            emit(out, res.dump(2) + "\n");
        };
    });

    // bs solve
    auto* bs = app.add_subcommand("bs", "Bohr-Sommerfeld lattice");
    bs->require_subcommand(1);
    auto* bsolve = bs->add_subcommand("solve", "solve the quantization condition for a config");
    std::string config_file;
    bsolve->add_option("--config", config_file, "run config JSON")->required()->check(CLI::ExistingFile);
    bsolve->add_option("-o,--out", out, "lattice CSV (default stdout)");
    bsolve->callback([&] {
        action = [&] {
            RunConfig cfg = load_run_config(config_file);
            cfg.oracle.kind = "none";
            cfg.calibration.search = false;
            const RunManifest m = run_pipeline(cfg);
            emit(out, read_text_file(m.path_of("lattice_csv")));
        };
    });

    // circle-model
    auto* circ = app.add_subcommand("circle-model", "Gram determinant and Grushin checks on the circle");
    int npts = 512;
    double ch = 0.1, center = 1.5707963267948966, sigma = 0.14;
    std::vector<std::string> zs;
    circ->add_option("--n", npts, "grid points (power of two)")->capture_default_str();
    circ->add_option("--h", ch, "semiclassical parameter")->capture_default_str();
    circ->add_option("--center", center, "cutoff centre")->capture_default_str();
    circ->add_option("--sigma", sigma, "cutoff width")->capture_default_str();
    circ->add_option("--z", zs, "spectral parameter 're,im' (repeatable)");
    circ->add_option("-o,--out", out, "output CSV (default stdout)");
    circ->callback([&] {
        action = [&] {
            const CircleGrid grid(npts, ch);
            const Cutoff chi = Cutoff::smooth_step(grid, center, sigma);
            if (zs.empty()) zs = {"0.013,-0.021", "0.047,0.011", "0.5,-0.05"};
            std::string csv = "re_z,im_z,re_det,im_det,re_exact,im_exact,rel_err,grushin_residual\n";
            for (const auto& s : zs) {
                const cplx z = parse_complex(s);
                const cplx d = gram_determinant(grid, z, chi);
                const cplx ex = -4.0 * std::pow(std::sin(3.141592653589793 * z / ch), 2);
                const double rel = std::abs(d - ex) / std::max(std::abs(ex), 1e-300);
                csv += format_double(z.real()) + "," + format_double(z.imag()) + "," + format_double(d.real()) +
                       "," + format_double(d.imag()) + "," + format_double(ex.real()) + "," +
                       format_double(ex.imag()) + "," + format_double(rel) + "," +
                       format_double(verify_grushin_identity(grid, z, chi)) + "\n";
            }
            emit(out, csv);
        };
    });

    // model spectrum / det-scan
    auto* model = app.add_subcommand("model", "exactly solvable model");
    model->require_subcommand(1);
    double mmu = 1.0, mh = 0.01;
    WindowOpts mwin;
    auto* mspec = model->add_subcommand("spectrum", "model resonance lattice in a window");
    auto* mscan = model->add_subcommand("det-scan", "|det(1 - M(z))| on a grid");
    int nre = 121, nim = 41, kmax = -1;
    for (auto* sc : {mspec, mscan}) {
        sc->add_option("--mu", mmu, "hyperbolic rate")->capture_default_str();
        sc->add_option("--h", mh, "semiclassical parameter")->capture_default_str();
        mwin.add(sc);
        sc->add_option("-o,--out", out, "output CSV (default stdout)");
    }
    mscan->add_option("--nre", nre)->capture_default_str();
    mscan->add_option("--nim", nim)->capture_default_str();
    mscan->add_option("--k-max", kmax, "truncation (default from window)");
    mspec->callback([&] {
        action = [&] {
            const ResonanceLattice lat = model_resonances(ModelSpec::hyperbolic(mmu, mh), mwin.make(mh));
            emit(out, lattice_to_csv(lat, 1));
        };
    });
    mscan->callback([&] {
        action = [&] {
            const SpectralWindow w = mwin.make(mh);
            const int k = kmax >= 0 ? kmax : w.k_bound(mh);
            emit(out, det_scan_csv(ModelSpec::hyperbolic(mmu, mh), w.e0 - w.eps0, w.e0 + w.eps0, -w.depth, 0.0,
                                   nre, nim, k));
        };
    });

    // oracle run / compare
    auto* orc = app.add_subcommand("oracle", "complex-scaled reference spectra");
    orc->require_subcommand(1);
    auto* orun = orc->add_subcommand("run", "eigenvalues of a complex-scaled operator");
    std::string kind = "inverted";
    GridSpec1D grid;
    double omu = 1.0;
    int nf = 10;
    bool fd = false;
    WindowOpts owin;
    owin.eps0 = 0.25;
    orun->add_option("--kind", kind, "inverted | model")->check(CLI::IsMember({"inverted", "model"}))
        ->capture_default_str();
    orun->add_option("--h", grid.h)->capture_default_str();
    orun->add_option("--n", grid.n, "interior grid points")->capture_default_str();
    orun->add_option("--l", grid.l, "half box length")->capture_default_str();
    orun->add_option("--theta", grid.theta, "scaling angle")->capture_default_str();
    orun->add_option("--mu", omu)->capture_default_str();
    orun->add_option("--n-fourier", nf)->capture_default_str();
    orun->add_flag("--fd", fd, "second-order finite differences instead of the sine basis");
    owin.add(orun);
    orun->add_option("-o,--out", out, "scatter CSV (default stdout)");
    orun->callback([&] {
        action = [&] {
            const auto disc = fd ? Discretization::FiniteDifference2 : Discretization::Spectral;
            const CMat op = kind == "inverted" ? scaled_inverted_oscillator(grid, disc)
                                               : scaled_model_operator(omu, grid, nf, disc);
            const EigenResult r = eigenvalues_in_window(op, owin.make(grid.h));
            emit(out, scatter_to_csv(r.eigenvalues));
        };
    });
    auto* ocmp = orc->add_subcommand("compare", "match two point sets");
    std::string file_a, file_b;
    double ctol = 1e-3;
    bool strict = false;
    ocmp->add_option("a", file_a, "lattice or scatter CSV")->required()->check(CLI::ExistingFile);
    ocmp->add_option("b", file_b, "lattice or scatter CSV")->required()->check(CLI::ExistingFile);
    ocmp->add_option("--tol", ctol, "absolute pairing tolerance")->capture_default_str();
    ocmp->add_flag("--strict", strict, "exit 1 unless every point is matched");
    ocmp->callback([&] {
        action = [&] {
            const LatticeDiff d = lattice_diff(read_points(file_a), read_points(file_b), ctol);
            std::cout << to_json(d).dump(2) << "\n";
            if (strict && (!d.unmatched_a.empty() || !d.unmatched_b.empty())) throw Error("unmatched points");
        };
    });

    // calibrate
    auto* cal = app.add_subcommand("calibrate", "search the convention tuple against the separable oracle");
    cal->add_option("--config", config_file, "run config JSON")->required()->check(CLI::ExistingFile);
    cal->callback([&] {
        action = [&] {
            RunConfig cfg = load_run_config(config_file);
            cfg.calibration.search = true;
            if (cfg.oracle.kind == "none") cfg.oracle.kind = "separable";
            const RunManifest m = run_pipeline(cfg);
            const CalibrationReport r = calibration_from_json(read_json_file(m.path_of("calibration")));
            std::cout << to_json(r).dump(2) << "\n";
            if (!r.unique) std::cerr << "warning: convention tuple is not unique\n";
        };
    });

    // run
    auto* run = app.add_subcommand("run", "full pipeline");
    bool plot = false;
    run->add_option("--config", config_file, "run config JSON")->required()->check(CLI::ExistingFile);
    run->add_flag("--plot", plot, "also write plot data");
    run->callback([&] {
        action = [&] {
            RunManifest m = run_pipeline(load_run_config(config_file));
            verify_manifest(m);
            if (plot) emit_plot_data(m);
            std::cout << (m.output_dir / "manifest.json").string() << "\n";
            if (m.summary.contains("comparison_max_err"))
                std::cout << "comparison max_err " << format_double(m.summary["comparison_max_err"].get<double>())
                          << "\n";
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kSchema;
    }
    try {
        action();
    } catch (const StageError& e) {
        std::cerr << "hypres: " << e.what() << "\n";
        return exit_code_of(e);
    } catch (const std::exception& e) {
        std::cerr << "hypres: " << e.what() << "\n";
        return exit_code_of(e);
    }
    return kOk;
}
