#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "hypres/bs.hpp"
#include "hypres/floquet.hpp"
#include "hypres/oracle.hpp"
#include "hypres/orbits.hpp"

namespace hypres {

using json = nlohmann::json;

// %.17g, so that text round trips to the same double
std::string format_double(double v);

json to_json(const PhasePoint& x);
json to_json(const PeriodicOrbit& orbit);
json to_json(const OrbitFamily& family);
json to_json(const FloquetData& data);
json to_json(const Conventions& conv);
json to_json(const SpectralWindow& window);
json to_json(const ResonanceLattice& lattice);
json to_json(const EigenResult& result);
json to_json(const LatticeDiff& diff);
json to_json(const CalibrationReport& report);

PhasePoint phase_point_from_json(const json& j);
PeriodicOrbit orbit_from_json(const json& j);
OrbitFamily family_from_json(const json& j);
FloquetData floquet_from_json(const json& j);
Conventions conventions_from_json(const json& j);
SpectralWindow window_from_json(const json& j);
ResonanceLattice lattice_from_json(const json& j);
EigenResult eigen_from_json(const json& j);
LatticeDiff diff_from_json(const json& j);
CalibrationReport calibration_from_json(const json& j);

// columns: m, k1..kd, re_z, im_z, residual, multiplicity
inline constexpr int kLatticeCsvVersion = 1;
std::string lattice_to_csv(const ResonanceLattice& lattice, int d);
ResonanceLattice lattice_from_csv(const std::string& text, double h = 0.0);

// columns: re_z, im_z
inline constexpr int kScatterCsvVersion = 1;
std::string scatter_to_csv(const std::vector<cplx>& points);
std::vector<cplx> scatter_from_csv(const std::string& text);

std::vector<cplx> lattice_points(const ResonanceLattice& lattice);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

// 64-bit FNV-1a
std::uint64_t fnv1a64(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace hypres
