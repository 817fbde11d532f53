#include <doctest.h>

#include <cmath>

#include "hypres/config.hpp"
#include "hypres/errors.hpp"

using namespace hypres;
using nlohmann::json;

namespace {

json model_config() {
    return json{{"system", {{"builtin", "model"}, {"mu", 1.0}}},
                {"h", 0.01},
                {"window", {{"e0", 0.0}, {"eps0", 0.05}, {"depth", 0.05}}},
                {"oracle", {{"kind", "model-exact"}}},
                {"output_dir", "out"}};
}

}  // namespace

TEST_CASE("built-in config fills defaults") {
    const RunConfig c = parse_run_config(model_config());
    CHECK(c.system.name() == "model");
    CHECK(c.h == 0.01);
    CHECK(c.window.depth == 0.05);
    CHECK(c.orbit.guess.size() == 4);
    CHECK(c.orbit.period > 0.0);
    CHECK(c.oracle.kind == "model-exact");
    CHECK(c.comparison_tol() == doctest::Approx(1e-4));
    CHECK(c.tol.shooting == 1e-10);

    for (const auto& label : {"hyp2", "semihyp3", "diabolo2", "model"}) {
        CAPTURE(label);
        const auto d = builtin_defaults(label);
        REQUIRE(d);
        CHECK(d->e_min <= d->e0);
        CHECK(d->e0 <= d->e_max);
        CHECK(d->eps0 > 0.0);
    }
    CHECK_FALSE(builtin_defaults("harmonic"));
}

TEST_CASE("config round trips through JSON") {
    json j = model_config();
    j["calibration"] = {{"ee_sign", -1}, {"g_ell_offset", 2}, {"m_offset", -1}};
    j["tolerances"] = {{"comparison", 3e-5}};
    const RunConfig a = parse_run_config(j);
    const json expanded = to_json(a);
    const RunConfig b = parse_run_config(expanded);
    CHECK(to_json(b) == expanded);
    CHECK(b.calibration.conventions == Conventions{-1, 2, -1});
    CHECK(b.comparison_tol() == 3e-5);
}

TEST_CASE("schema errors") {
    auto bad = [](auto mutate) {
        json j = model_config();
        mutate(j);
        return j;
    };
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["h"] = -0.1; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["h"] = 2.0; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["h"] = "small"; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["extra"] = 1; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["window"]["width"] = 1; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j.erase("system"); })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["system"]["builtin"] = "nope"; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["tolerances"] = {{"shooting", 0.0}}; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["calibration"] = {{"ee_sign", 0}}; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["oracle"]["kind"] = "separable"; })), SchemaError);
    CHECK_THROWS_AS(parse_run_config(bad([](json& j) { j["orbit"] = {{"guess", {1.0, 2.0}}}; })), SchemaError);
}

TEST_CASE("inline polynomial system") {
    // 1/2 (px^2 + py^2) + 1/2 x^2 - 1/2 y^2 in stacked powers (x, y, px, py)
    const json j = json::parse(R"({
        "system": {"polynomial": {
            "label": "poly", "dof": 2,
            "h0": [{"coef": 0.5, "powers": [0, 0, 2, 0]},
                   {"coef": 0.5, "powers": [0, 0, 0, 2]},
                   {"coef": 0.5, "powers": [2, 0, 0, 0]},
                   {"coef": -0.5, "powers": [0, 2, 0, 0]}],
            "h1": [{"coef": 1.0, "powers": [0, 0, 0, 0]}]}},
        "h": 0.02,
        "window": {"e0": 0.5, "eps0": 0.1},
        "orbit": {"guess": [1.0, 0.0, 0.0, 0.0], "period": 6.3, "e_min": 0.3, "e_max": 0.7}
    })");
    const RunConfig c = parse_run_config(j);
    const HamiltonianSystem s = make_system(c.system);
    const HamiltonianSystem ref = hyp2();
    Vec x(4);
    x << 0.3, -0.7, 1.1, 0.2;
    const PhasePoint p = PhasePoint::from_stacked(x);
    CHECK(s.h0(p) == doctest::Approx(ref.h0(p)));
    CHECK((s.grad_h0(p) - ref.grad_h0(p)).norm() < 1e-12);
    CHECK(s.h1(p) == 1.0);
    CHECK(parse_run_config(to_json(c)).system.h0.size() == 4);

    json missing = j;
    missing.erase("orbit");
    CHECK_THROWS_AS(parse_run_config(missing), SchemaError);
    json wrong = j;
    wrong["system"]["polynomial"]["h0"][0]["powers"] = {1, 0};
    CHECK_THROWS_AS(parse_run_config(wrong), SchemaError);
}
