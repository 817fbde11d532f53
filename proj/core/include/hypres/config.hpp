#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypres/bs.hpp"
#include "hypres/systems.hpp"

namespace hypres {

struct SystemConfig {
    // built-in label, or empty for an inline polynomial system
    std::string builtin;
    double omega = 1.4142135623730951;
    double mu = 1.0;

    std::string label;
    int dof = 0;
    std::vector<PolynomialTerm> h0;
    std::vector<PolynomialTerm> h1;
    std::vector<double> angle_periods;  // one per q, 0 for none

    std::string name() const { return builtin.empty() ? label : builtin; }
};

struct OrbitConfig {
    Vec guess;  // stacked (q, p)
    double period = 0.0;
    double e_min = 0.0;
    double e_max = 0.0;
    int nodes = 9;
    int samples = 256;
};

struct Tolerances {
    double shooting = 1e-10;
    double integration = 1e-12;
    double floquet = 1e-6;
    double bs_residual_factor = 1e-12;
    // absolute pairing tolerance for comparisons; 0 means 1e-2 h
    double comparison = 0.0;
    // calibration tolerance in units of h
    double calibration = 1e-2;
};

struct CalibrationConfig {
    Conventions conventions;
    bool search = false;
};

struct OracleConfig {
    // none | model-exact | scaled-model | separable
    std::string kind = "none";
    double l = 1.25;
    int n = 160;
    double theta = 0.7853981633974483;
    int n_fourier = 10;
    int k_max = 6;
    int n_max = 80;
    int l_max = 6;
};

struct RunConfig {
    SystemConfig system;
    double h = 0.0;
    SpectralWindow window;
    OrbitConfig orbit;
    Tolerances tol;
    CalibrationConfig calibration;
    OracleConfig oracle;
    std::string output_dir = "hypres_out";

    double comparison_tol() const { return tol.comparison > 0 ? tol.comparison : 1e-2 * h; }
};

// Strict parsing: unknown keys, wrong types and out-of-range values raise
// SchemaError. Missing orbit / window entries of built-ins get defaults.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Fully expanded config; parse_run_config(to_json(c)) reproduces c.
nlohmann::json to_json(const RunConfig& config);

HamiltonianSystem make_system(const SystemConfig& config);

// Orbit seed, period, family range and window used when the config is silent.
struct BuiltinDefaults {
    Vec guess;
    double period = 0.0;
    double e_min = 0.0;
    double e_max = 0.0;
    double e0 = 0.0;
    double eps0 = 0.0;
};
std::optional<BuiltinDefaults> builtin_defaults(const std::string& label);

}  // namespace hypres
