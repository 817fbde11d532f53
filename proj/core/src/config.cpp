#include "hypres/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hypres/errors.hpp"
#include "hypres/io.hpp"

namespace hypres {

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw SchemaError(where + " must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key)) throw SchemaError("unknown key '" + key + "' in " + where);
    }
}

double real_at(const json& j, const std::string& key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number()) throw SchemaError(where + "." + key + " must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw SchemaError(where + "." + key + " must be finite");
    return x;
}

int int_at(const json& j, const std::string& key, const std::string& where) {
    const auto& v = j.at(key);
    if (!v.is_number_integer()) throw SchemaError(where + "." + key + " must be an integer");
    return v.get<int>();
}

double positive(double x, const std::string& name) {
    if (!(x > 0.0)) throw SchemaError(name + " must be positive");
    return x;
}

std::vector<PolynomialTerm> terms_from(const json& j, int dof, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + " must be an array");
    std::vector<PolynomialTerm> out;
    for (const auto& t : j) {
        check_keys(t, where + "[]", {"coef", "powers"});
        if (!t.contains("coef") || !t.contains("powers")) throw SchemaError(where + " term needs coef and powers");
        PolynomialTerm term;
        term.coef = real_at(t, "coef", where);
        if (!t["powers"].is_array()) throw SchemaError(where + ".powers must be an array");
        for (const auto& p : t["powers"]) {
            if (!p.is_number_integer() || p.get<int>() < 0)
                throw SchemaError(where + ".powers must be non-negative integers");
            term.powers.push_back(p.get<int>());
        }
        if (static_cast<int>(term.powers.size()) != 2 * dof)
            throw SchemaError(where + ".powers must have length 2 dof");
        out.push_back(std::move(term));
    }
    return out;
}

json terms_json(const std::vector<PolynomialTerm>& terms) {
    json a = json::array();
    for (const auto& t : terms) a.push_back({{"coef", t.coef}, {"powers", t.powers}});
    return a;
}

Vec vec_of(const json& j, const std::string& where) {
    if (!j.is_array()) throw SchemaError(where + " must be an array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw SchemaError(where + " must hold numbers");
        v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    }
    return v;
}

SystemConfig parse_system(const json& j) {
    check_keys(j, "system", {"builtin", "omega", "mu", "polynomial"});
    SystemConfig s;
    const bool has_builtin = j.contains("builtin");
    const bool has_poly = j.contains("polynomial");
    if (has_builtin == has_poly) throw SchemaError("system needs exactly one of builtin / polynomial");
    if (j.contains("omega")) s.omega = positive(real_at(j, "omega", "system"), "system.omega");
    if (j.contains("mu")) s.mu = positive(real_at(j, "mu", "system"), "system.mu");
    if (has_builtin) {
        if (!j["builtin"].is_string()) throw SchemaError("system.builtin must be a string");
        s.builtin = j["builtin"].get<std::string>();
        const auto labels = builtin_labels();
        if (std::find(labels.begin(), labels.end(), s.builtin) == labels.end())
            throw SchemaError("unknown built-in system '" + s.builtin + "'");
        return s;
    }
    const auto& p = j["polynomial"];
    check_keys(p, "system.polynomial", {"label", "dof", "h0", "h1", "angle_periods"});
    if (!p.contains("dof") || !p.contains("h0")) throw SchemaError("system.polynomial needs dof and h0");
    s.label = p.contains("label") ? p["label"].get<std::string>() : "polynomial";
    s.dof = int_at(p, "dof", "system.polynomial");
    if (s.dof < 1) throw SchemaError("system.polynomial.dof must be >= 1");
    s.h0 = terms_from(p["h0"], s.dof, "system.polynomial.h0");
    if (p.contains("h1")) s.h1 = terms_from(p["h1"], s.dof, "system.polynomial.h1");
    if (p.contains("angle_periods")) {
        const Vec a = vec_of(p["angle_periods"], "system.polynomial.angle_periods");
        if (a.size() != s.dof) throw SchemaError("angle_periods must have one entry per dof");
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a(i) < 0) throw SchemaError("angle_periods must be >= 0");
            s.angle_periods.push_back(a(i));
        }
    }
    return s;
}

}  // namespace

std::optional<BuiltinDefaults> builtin_defaults(const std::string& label) {
    auto mk = [](std::initializer_list<double> g, double T, double lo, double hi, double e0,
                 double eps0) {
        BuiltinDefaults d;
        d.guess = Vec(static_cast<Eigen::Index>(g.size()));
        Eigen::Index i = 0;
        for (double v : g) d.guess(i++) = v;
        d.period = T;
        d.e_min = lo;
        d.e_max = hi;
        d.e0 = e0;
        d.eps0 = eps0;
        return d;
    };
    if (label == "hyp2") return mk({1.0, 0.01, 0.0, 0.0}, 6.3, 0.3, 0.7, 0.5, 0.1);
    if (label == "semihyp3") return mk({1.4, 0.01, 0.0, 0.0, 0.0, 0.0}, 6.3, 0.6, 1.4, 1.0, 0.3);
    if (label == "diabolo2") return mk({0.0, 0.2279, 0.0, 0.0}, 2.29, 0.07, 0.13, 0.1, 0.025);
    if (label == "model") return mk({0.0, 0.01, 0.0, 0.01}, 6.3, -0.1, 0.1, 0.0, 0.05);
    return std::nullopt;
}

RunConfig parse_run_config(const json& j) {
    check_keys(j, "config",
               {"system", "h", "window", "orbit", "tolerances", "calibration", "oracle", "output_dir"});
    if (!j.contains("system")) throw SchemaError("config needs a system");
    if (!j.contains("h")) throw SchemaError("config needs h");
    RunConfig c;
    c.system = parse_system(j["system"]);
    c.h = real_at(j, "h", "config");
    if (!(c.h > 0.0 && c.h <= 1.0)) throw SchemaError("h must lie in (0, 1]");

    const auto defaults = builtin_defaults(c.system.builtin);

    // window
    json w = j.contains("window") ? j["window"] : json::object();
    check_keys(w, "window", {"e0", "eps0", "depth", "c_const"});
    if (!defaults && (!w.contains("e0") || !w.contains("eps0")))
        throw SchemaError("window.e0 and window.eps0 are required for this system");
    const double e0 = w.contains("e0") ? real_at(w, "e0", "window") : defaults->e0;
    const double eps0 = w.contains("eps0") ? real_at(w, "eps0", "window") : defaults->eps0;
    const double cc = w.contains("c_const") ? real_at(w, "c_const", "window") : 1.0;
    c.window = SpectralWindow::standard(e0, positive(eps0, "window.eps0"), c.h, 1.0,
                                        positive(cc, "window.c_const"));
    if (w.contains("depth")) c.window.depth = positive(real_at(w, "depth", "window"), "window.depth");

    // orbit
    json o = j.contains("orbit") ? j["orbit"] : json::object();
    check_keys(o, "orbit", {"guess", "period", "e_min", "e_max", "nodes", "samples"});
    if (!defaults && (!o.contains("guess") || !o.contains("period") || !o.contains("e_min") ||
                      !o.contains("e_max")))
        throw SchemaError("orbit.guess, period, e_min and e_max are required for this system");
    c.orbit.guess = o.contains("guess") ? vec_of(o["guess"], "orbit.guess") : defaults->guess;
    c.orbit.period = o.contains("period") ? real_at(o, "period", "orbit") : defaults->period;
    c.orbit.e_min = o.contains("e_min") ? real_at(o, "e_min", "orbit") : defaults->e_min;
    c.orbit.e_max = o.contains("e_max") ? real_at(o, "e_max", "orbit") : defaults->e_max;
    if (o.contains("nodes")) c.orbit.nodes = int_at(o, "nodes", "orbit");
    if (o.contains("samples")) c.orbit.samples = int_at(o, "samples", "orbit");
    positive(c.orbit.period, "orbit.period");
    if (c.orbit.e_min > c.orbit.e_max) throw SchemaError("orbit.e_min must not exceed orbit.e_max");
    if (c.orbit.nodes < 4) throw SchemaError("orbit.nodes must be >= 4");
    if (c.orbit.samples < 16) throw SchemaError("orbit.samples must be >= 16");
    const int dof = c.system.builtin.empty() ? c.system.dof
                                             : builtin_system(c.system.builtin).dof();
    if (c.orbit.guess.size() != 2 * dof) throw SchemaError("orbit.guess must have length 2 dof");

    // tolerances
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        check_keys(t, "tolerances",
                   {"shooting", "integration", "floquet", "bs_residual_factor", "comparison", "calibration"});
        auto set = [&](const char* key, double& dst) {
            if (t.contains(key)) dst = positive(real_at(t, key, "tolerances"), std::string("tolerances.") + key);
        };
        set("shooting", c.tol.shooting);
        set("integration", c.tol.integration);
        set("floquet", c.tol.floquet);
        set("bs_residual_factor", c.tol.bs_residual_factor);
        set("comparison", c.tol.comparison);
        set("calibration", c.tol.calibration);
    }

    if (j.contains("calibration")) {
        const auto& cal = j["calibration"];
        check_keys(cal, "calibration", {"ee_sign", "g_ell_offset", "m_offset", "search"});
        if (cal.contains("ee_sign")) c.calibration.conventions.ee_sign = int_at(cal, "ee_sign", "calibration");
        if (cal.contains("g_ell_offset"))
            c.calibration.conventions.g_ell_offset = int_at(cal, "g_ell_offset", "calibration");
        if (cal.contains("m_offset")) c.calibration.conventions.m_offset = int_at(cal, "m_offset", "calibration");
        if (cal.contains("search")) {
            if (!cal["search"].is_boolean()) throw SchemaError("calibration.search must be a boolean");
            c.calibration.search = cal["search"].get<bool>();
        }
        if (c.calibration.conventions.ee_sign != 1 && c.calibration.conventions.ee_sign != -1)
            throw SchemaError("calibration.ee_sign must be +1 or -1");
    }

    if (j.contains("oracle")) {
        const auto& orc = j["oracle"];
        check_keys(orc, "oracle", {"kind", "l", "n", "theta", "n_fourier", "k_max", "n_max", "l_max"});
        auto& oc = c.oracle;
        if (orc.contains("kind")) {
            if (!orc["kind"].is_string()) throw SchemaError("oracle.kind must be a string");
            oc.kind = orc["kind"].get<std::string>();
        }
        if (oc.kind != "none" && oc.kind != "model-exact" && oc.kind != "scaled-model" && oc.kind != "separable")
            throw SchemaError("oracle.kind must be none, model-exact, scaled-model or separable");
        if (orc.contains("l")) oc.l = positive(real_at(orc, "l", "oracle"), "oracle.l");
        if (orc.contains("n")) oc.n = int_at(orc, "n", "oracle");
        if (orc.contains("theta")) oc.theta = real_at(orc, "theta", "oracle");
        if (orc.contains("n_fourier")) oc.n_fourier = int_at(orc, "n_fourier", "oracle");
        if (orc.contains("k_max")) oc.k_max = int_at(orc, "k_max", "oracle");
        if (orc.contains("n_max")) oc.n_max = int_at(orc, "n_max", "oracle");
        if (orc.contains("l_max")) oc.l_max = int_at(orc, "l_max", "oracle");
        if (oc.n < 8 || oc.n_fourier < 0 || oc.k_max < 0 || oc.n_max < 0 || oc.l_max < 0)
            throw SchemaError("oracle sizes out of range");
        if (!(oc.theta > 0.0 && oc.theta < 1.5707963267948966))
            throw SchemaError("oracle.theta must lie in (0, pi/2)");
        const bool model = c.system.builtin == "model";
        if ((oc.kind == "model-exact" || oc.kind == "scaled-model") && !model)
            throw SchemaError("oracle kind '" + oc.kind + "' needs the model system");
        if (oc.kind == "separable" && c.system.builtin != "hyp2" && c.system.builtin != "semihyp3")
            throw SchemaError("separable oracle needs hyp2 or semihyp3");
    }

    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw SchemaError("output_dir must be a string");
        c.output_dir = j["output_dir"].get<std::string>();
    }
    return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return parse_run_config(read_json_file(path));
}

json to_json(const RunConfig& c) {
    json sys;
    if (!c.system.builtin.empty()) {
        sys = {{"builtin", c.system.builtin}, {"omega", c.system.omega}, {"mu", c.system.mu}};
    } else {
        json poly = {{"label", c.system.label},
                     {"dof", c.system.dof},
                     {"h0", terms_json(c.system.h0)},
                     {"h1", terms_json(c.system.h1)}};
        if (!c.system.angle_periods.empty()) poly["angle_periods"] = c.system.angle_periods;
        sys = {{"polynomial", poly}, {"omega", c.system.omega}, {"mu", c.system.mu}};
    }
    json tol = {{"shooting", c.tol.shooting},
                {"integration", c.tol.integration},
                {"floquet", c.tol.floquet},
                {"bs_residual_factor", c.tol.bs_residual_factor},
                {"calibration", c.tol.calibration}};
    if (c.tol.comparison > 0) tol["comparison"] = c.tol.comparison;
    json guess = json::array();
    for (Eigen::Index i = 0; i < c.orbit.guess.size(); ++i) guess.push_back(c.orbit.guess(i));
    return {{"system", sys},
            {"h", c.h},
            {"window", to_json(c.window)},
            {"orbit",
             {{"guess", guess},
              {"period", c.orbit.period},
              {"e_min", c.orbit.e_min},
              {"e_max", c.orbit.e_max},
              {"nodes", c.orbit.nodes},
              {"samples", c.orbit.samples}}},
            {"tolerances", tol},
            {"calibration",
             {{"ee_sign", c.calibration.conventions.ee_sign},
              {"g_ell_offset", c.calibration.conventions.g_ell_offset},
              {"m_offset", c.calibration.conventions.m_offset},
              {"search", c.calibration.search}}},
            {"oracle",
             {{"kind", c.oracle.kind},
              {"l", c.oracle.l},
              {"n", c.oracle.n},
              {"theta", c.oracle.theta},
              {"n_fourier", c.oracle.n_fourier},
              {"k_max", c.oracle.k_max},
              {"n_max", c.oracle.n_max},
              {"l_max", c.oracle.l_max}}},
            {"output_dir", c.output_dir}};
}

HamiltonianSystem make_system(const SystemConfig& s) {
    if (!s.builtin.empty()) return builtin_system(s.builtin, s.omega, s.mu);
    HamiltonianSystem sys = polynomial_system(s.label, s.dof, s.h0, s.h1);
    for (std::size_t i = 0; i < s.angle_periods.size(); ++i)
        if (s.angle_periods[i] > 0) sys.set_angle_period(static_cast<int>(i), s.angle_periods[i]);
    return sys;
}

}  // namespace hypres
