#include "hypres/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "hypres/errors.hpp"

namespace hypres {

namespace {

json num(double v) {
    if (std::isfinite(v)) return v;
    // JSON has no inf/nan
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

double get_num(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    throw SchemaError("expected a number");
}

json vec_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(num(v(i)));
    return a;
}

Vec vec_from(const json& j) {
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = get_num(j[i]);
    return v;
}

json cplx_json(cplx z) { return json::array({num(z.real()), num(z.imag())}); }
cplx cplx_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw SchemaError("complex number must be [re, im]");
    return {get_num(j[0]), get_num(j[1])};
}

json cvec_json(const std::vector<cplx>& v) {
    json a = json::array();
    for (auto z : v) a.push_back(cplx_json(z));
    return a;
}
std::vector<cplx> cvec_from(const json& j) {
    std::vector<cplx> v;
    for (const auto& e : j) v.push_back(cplx_from(e));
    return v;
}

json dvec_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}
std::vector<double> dvec_from(const json& j) {
    std::vector<double> v;
    for (const auto& e : j) v.push_back(get_num(e));
    return v;
}

json mat_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
    return rows;
}
Mat mat_from(const json& j) {
    const auto r = static_cast<Eigen::Index>(j.size());
    const auto c = r == 0 ? Eigen::Index(0) : static_cast<Eigen::Index>(j[0].size());
    Mat m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != c) throw SchemaError("ragged matrix");
        for (Eigen::Index k = 0; k < c; ++k) m(i, k) = get_num(j[i][k]);
    }
    return m;
}

const json& field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing key: ") + key);
    return j.at(key);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw SchemaError("bad number in CSV: '" + s + "'");
    }
    if (pos != s.size()) throw SchemaError("bad number in CSV: '" + s + "'");
    return v;
}

int parse_int(const std::string& s) {
    std::size_t pos = 0;
    int v = 0;
    try {
        v = std::stoi(s, &pos);
    } catch (const std::exception&) {
        throw SchemaError("bad integer in CSV: '" + s + "'");
    }
    if (pos != s.size()) throw SchemaError("bad integer in CSV: '" + s + "'");
    return v;
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json to_json(const PhasePoint& x) { return {{"q", vec_json(x.q)}, {"p", vec_json(x.p)}}; }

PhasePoint phase_point_from_json(const json& j) {
    PhasePoint x(vec_from(field(j, "q")), vec_from(field(j, "p")));
    if (x.q.size() != x.p.size()) throw SchemaError("q and p differ in length");
    return x;
}

json to_json(const PeriodicOrbit& orbit) {
    json samples = json::array();
    for (const auto& s : orbit.samples) {
        json row = json::array({num(s.time)});
        const Vec x = s.point.stacked();
        for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(num(x(i)));
        samples.push_back(std::move(row));
    }
    return {{"sys_label", orbit.sys_label},
            {"x0", to_json(orbit.x0)},
            {"period", num(orbit.period)},
            {"energy", num(orbit.energy)},
            {"residual", num(orbit.residual)},
            {"angle_periods", dvec_json(orbit.angle_periods)},
            {"samples", samples}};
}

PeriodicOrbit orbit_from_json(const json& j) {
    PeriodicOrbit o;
    o.sys_label = field(j, "sys_label").get<std::string>();
    o.x0 = phase_point_from_json(field(j, "x0"));
    o.period = get_num(field(j, "period"));
    o.energy = get_num(field(j, "energy"));
    o.residual = get_num(field(j, "residual"));
    o.angle_periods = dvec_from(field(j, "angle_periods"));
    const auto dim = static_cast<std::size_t>(o.x0.stacked().size());
    for (const auto& row : field(j, "samples")) {
        if (row.size() != dim + 1) throw SchemaError("orbit sample has wrong length");
        Vec x(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) x(static_cast<Eigen::Index>(i)) = get_num(row[i + 1]);
        o.samples.push_back({get_num(row[0]), PhasePoint::from_stacked(x)});
    }
    return o;
}

json to_json(const OrbitFamily& family) {
    json orbits = json::array();
    for (const auto& o : family.orbits) orbits.push_back(to_json(o));
    json j = {{"orbits", orbits},
              {"energies", vec_json(family.energies)},
              {"periods", vec_json(family.periods)},
              {"actions", vec_json(family.actions)}};
    j["failure"] = family.failure ? json(*family.failure) : json(nullptr);
    return j;
}

OrbitFamily family_from_json(const json& j) {
    OrbitFamily f;
    for (const auto& o : field(j, "orbits")) f.orbits.push_back(orbit_from_json(o));
    f.energies = vec_from(field(j, "energies"));
    f.periods = vec_from(field(j, "periods"));
    f.actions = vec_from(field(j, "actions"));
    const auto& fail = field(j, "failure");
    if (!fail.is_null()) f.failure = fail.get<std::string>();
    return f;
}

json to_json(const FloquetData& d) {
    json tags = json::array();
    for (auto t : d.tags) tags.push_back(to_string(t));
    return {{"reduced_map", mat_json(d.reduced_map)},
            {"multipliers", cvec_json(d.multipliers)},
            {"exponents", cvec_json(d.exponents)},
            {"tags", tags},
            {"nondegenerate", d.nondegenerate},
            {"elliptic_count", d.elliptic_count},
            {"g_ell", d.g_ell},
            {"windings", d.windings},
            {"hypothesis_violation", d.hypothesis_violation},
            {"symplectic_defect", num(d.symplectic_defect)},
            {"energy", num(d.energy)}};
}

FloquetData floquet_from_json(const json& j) {
    FloquetData d;
    d.reduced_map = mat_from(field(j, "reduced_map"));
    d.multipliers = cvec_from(field(j, "multipliers"));
    d.exponents = cvec_from(field(j, "exponents"));
    for (const auto& t : field(j, "tags")) d.tags.push_back(exponent_type_from_string(t.get<std::string>()));
    d.nondegenerate = field(j, "nondegenerate").get<bool>();
    d.elliptic_count = field(j, "elliptic_count").get<int>();
    d.g_ell = field(j, "g_ell").get<int>();
    d.windings = field(j, "windings").get<std::vector<int>>();
    d.hypothesis_violation = field(j, "hypothesis_violation").get<bool>();
    d.symplectic_defect = get_num(field(j, "symplectic_defect"));
    d.energy = get_num(field(j, "energy"));
    return d;
}

json to_json(const Conventions& c) {
    return {{"ee_sign", c.ee_sign}, {"g_ell_offset", c.g_ell_offset}, {"m_offset", c.m_offset}};
}

Conventions conventions_from_json(const json& j) {
    Conventions c;
    c.ee_sign = field(j, "ee_sign").get<int>();
    c.g_ell_offset = field(j, "g_ell_offset").get<int>();
    c.m_offset = field(j, "m_offset").get<int>();
    if (c.ee_sign != 1 && c.ee_sign != -1) throw SchemaError("ee_sign must be +1 or -1");
    return c;
}

json to_json(const SpectralWindow& w) {
    return {{"e0", num(w.e0)}, {"eps0", num(w.eps0)}, {"depth", num(w.depth)}, {"c_const", num(w.c_const)}};
}

SpectralWindow window_from_json(const json& j) {
    SpectralWindow w;
    w.e0 = get_num(field(j, "e0"));
    w.eps0 = get_num(field(j, "eps0"));
    w.depth = get_num(field(j, "depth"));
    w.c_const = get_num(field(j, "c_const"));
    return w;
}

json to_json(const ResonanceLattice& lat) {
    json entries = json::array();
    for (const auto& e : lat.entries)
        entries.push_back({{"m", e.m},
                           {"k", e.k},
                           {"z", cplx_json(e.z)},
                           {"residual", num(e.newton_residual)},
                           {"multiplicity", e.multiplicity}});
    json skipped = json::array();
    for (const auto& [m, k] : lat.skipped) skipped.push_back({{"m", m}, {"k", k}});
    return {{"h", num(lat.h)}, {"entries", entries}, {"warnings", lat.warnings}, {"skipped", skipped}};
}

ResonanceLattice lattice_from_json(const json& j) {
    ResonanceLattice lat;
    lat.h = get_num(field(j, "h"));
    for (const auto& e : field(j, "entries")) {
        LatticeEntry le;
        le.m = field(e, "m").get<int>();
        le.k = field(e, "k").get<std::vector<int>>();
        le.z = cplx_from(field(e, "z"));
        le.newton_residual = get_num(field(e, "residual"));
        le.multiplicity = field(e, "multiplicity").get<int>();
        lat.entries.push_back(std::move(le));
    }
    lat.warnings = field(j, "warnings").get<std::vector<std::string>>();
    for (const auto& s : field(j, "skipped"))
        lat.skipped.emplace_back(field(s, "m").get<int>(), field(s, "k").get<std::vector<int>>());
    return lat;
}

json to_json(const EigenResult& r) {
    return {{"eigenvalues", cvec_json(r.eigenvalues)},
            {"theta", num(r.theta)},
            {"grid", {{"l", num(r.params.l)}, {"n", r.params.n}, {"theta", num(r.params.theta)}, {"h", num(r.params.h)}}},
            {"n_fourier", r.n_fourier}};
}

EigenResult eigen_from_json(const json& j) {
    EigenResult r;
    r.eigenvalues = cvec_from(field(j, "eigenvalues"));
    r.theta = get_num(field(j, "theta"));
    const auto& g = field(j, "grid");
    r.params.l = get_num(field(g, "l"));
    r.params.n = field(g, "n").get<int>();
    r.params.theta = get_num(field(g, "theta"));
    r.params.h = get_num(field(g, "h"));
    r.n_fourier = field(j, "n_fourier").get<int>();
    return r;
}

json to_json(const LatticeDiff& d) {
    json pairs = json::array();
    for (const auto& [a, b] : d.pairs) pairs.push_back({a, b});
    return {{"matched", d.matched},
            {"max_err", num(d.max_err)},
            {"unmatched_a", d.unmatched_a},
            {"unmatched_b", d.unmatched_b},
            {"pairs", pairs}};
}

LatticeDiff diff_from_json(const json& j) {
    LatticeDiff d;
    d.matched = field(j, "matched").get<int>();
    d.max_err = get_num(field(j, "max_err"));
    d.unmatched_a = field(j, "unmatched_a").get<std::vector<int>>();
    d.unmatched_b = field(j, "unmatched_b").get<std::vector<int>>();
    for (const auto& p : field(j, "pairs")) d.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    return d;
}

json to_json(const CalibrationReport& r) {
    return {{"conventions", to_json(r.conventions)},
            {"max_err", num(r.max_err)},
            {"matched", r.matched},
            {"unique", r.unique},
            {"candidates", r.candidates}};
}

CalibrationReport calibration_from_json(const json& j) {
    CalibrationReport r;
    r.conventions = conventions_from_json(field(j, "conventions"));
    r.max_err = get_num(field(j, "max_err"));
    r.matched = field(j, "matched").get<int>();
    r.unique = field(j, "unique").get<bool>();
    r.candidates = field(j, "candidates").get<int>();
    return r;
}

std::string lattice_to_csv(const ResonanceLattice& lat, int d) {
    std::string out = "m";
    for (int i = 1; i <= d; ++i) out += ",k" + std::to_string(i);
    out += ",re_z,im_z,residual,multiplicity\n";
    for (const auto& e : lat.entries) {
        if (static_cast<int>(e.k.size()) != d) throw ArityError("lattice entry has wrong k arity");
        out += std::to_string(e.m);
        for (int k : e.k) out += "," + std::to_string(k);
        out += "," + format_double(e.z.real()) + "," + format_double(e.z.imag()) + "," +
               format_double(e.newton_residual) + "," + std::to_string(e.multiplicity) + "\n";
    }
    return out;
}

ResonanceLattice lattice_from_csv(const std::string& text, double h) {
    const auto lines = lines_of(text);
    if (lines.empty()) throw SchemaError("lattice CSV has no header");
    const auto header = split(lines[0], ',');
    const int cols = static_cast<int>(header.size());
    if (cols < 5 || header[0] != "m" || header[cols - 4] != "re_z" || header[cols - 3] != "im_z" ||
        header[cols - 2] != "residual" || header[cols - 1] != "multiplicity")
        throw SchemaError("unexpected lattice CSV header");
    const int d = cols - 5;
    for (int i = 1; i <= d; ++i)
        if (header[i] != "k" + std::to_string(i)) throw SchemaError("unexpected lattice CSV header");
    ResonanceLattice lat;
    lat.h = h;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto f = split(lines[r], ',');
        if (static_cast<int>(f.size()) != cols) throw SchemaError("lattice CSV row has wrong width");
        LatticeEntry e;
        e.m = parse_int(f[0]);
        for (int i = 1; i <= d; ++i) e.k.push_back(parse_int(f[i]));
        e.z = {parse_double(f[cols - 4]), parse_double(f[cols - 3])};
        e.newton_residual = parse_double(f[cols - 2]);
        e.multiplicity = parse_int(f[cols - 1]);
        lat.entries.push_back(std::move(e));
    }
    return lat;
}

std::string scatter_to_csv(const std::vector<cplx>& points) {
    std::string out = "re_z,im_z\n";
    for (auto z : points) out += format_double(z.real()) + "," + format_double(z.imag()) + "\n";
    return out;
}

std::vector<cplx> scatter_from_csv(const std::string& text) {
    const auto lines = lines_of(text);
    if (lines.empty() || lines[0] != "re_z,im_z") throw SchemaError("unexpected scatter CSV header");
    std::vector<cplx> pts;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto f = split(lines[r], ',');
        if (f.size() != 2) throw SchemaError("scatter CSV row has wrong width");
        pts.emplace_back(parse_double(f[0]), parse_double(f[1]));
    }
    return pts;
}

std::vector<cplx> lattice_points(const ResonanceLattice& lat) {
    std::vector<cplx> pts;
    pts.reserve(lat.entries.size());
    for (const auto& e : lat.entries) pts.push_back(e.z);
    return pts;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DependencyError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

json read_json_file(const std::filesystem::path& path) {
    const auto text = read_text_file(path);
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace hypres
