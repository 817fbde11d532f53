#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace std::string_literals;
namespace fs = std::filesystem;

namespace {

const fs::path kDir = fs::temp_directory_path() / "hypres_cli_test";

int run(const std::string& args, const std::string& stdout_file = "/dev/null") {
    const std::string cmd = "\""s + HYPRES_CLI_PATH + "\" " + args + " > " + stdout_file + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path write(const std::string& name, const std::string& text) {
    fs::create_directories(kDir);
    const fs::path p = kDir / name;
    std::ofstream(p) << text;
    return p;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("help and parse errors") {
    CHECK(run("--help") == 0);
    CHECK(run("") != 0);
    CHECK(run("no-such-command") == 2);
    CHECK(run("model spectrum --bogus 1") == 2);
    CHECK(run("orbit find --system hyp2 --guess 1,0,0,0") == 2);  // --period missing
}

TEST_CASE("schema errors in a config exit with 2") {
    const fs::path cfg = write("bad.json", R"({"system": {"builtin": "model"}, "h": -0.1})");
    CHECK(run("run --config " + cfg.string()) == 2);
    const fs::path extra = write("extra.json", R"({"system": {"builtin": "model"}, "h": 0.01, "colour": 1})");
    CHECK(run("bs solve --config " + extra.string()) == 2);
}

TEST_CASE("shooting from an equilibrium exits with 3") {
    CHECK(run("orbit find --system hyp2 --guess 0,0,0,0 --period 6.3") == 3);
}

TEST_CASE("unreachable calibration tolerance exits with 4") {
    const fs::path cfg = write("cal.json", R"({"system": {"builtin": "semihyp3"}, "h": 0.05,
        "tolerances": {"calibration": 1e-13},
        "output_dir": ")" + (kDir / "cal_out").string() + R"("})");
    CHECK(run("calibrate --config " + cfg.string()) == 4);
}

TEST_CASE("orbit, floquet and action chain") {
    const fs::path orbit = kDir / "orbit.json", family = kDir / "family.json", action = kDir / "action.json";
    fs::create_directories(kDir);
    CHECK(run("orbit find --system hyp2 --guess 1.1,0.05,0,0 --period 6.3 -o " + orbit.string()) == 0);
    CHECK(slurp(orbit).find("\"period\"") != std::string::npos);
    CHECK(run("floquet --orbit " + orbit.string(), (kDir / "table.txt").string()) == 0);
    CHECK(slurp(kDir / "table.txt").find("hr") != std::string::npos);
    CHECK(run("orbit continue --system hyp2 --guess 1,0,0,0 --period 6.2832 --e-min 0.3 --e-max 0.7 --nodes 5 -o " +
              family.string()) == 0);
    CHECK(run("action --family " + family.string() + " --h 0.02 -o " + action.string()) == 0);
    CHECK(fs::file_size(action) > 0);
}

TEST_CASE("model spectrum, oracle compare and circle model") {
    const fs::path a = kDir / "model.csv", b = kDir / "model_b.csv", c = kDir / "shifted.csv";
    fs::create_directories(kDir);
    CHECK(run("model spectrum --h 0.01 --e0 0 --eps0 0.05 --depth 0.05 -o " + a.string()) == 0);
    CHECK(count_lines(slurp(a)) == 56);
    CHECK(run("model spectrum --h 0.01 --e0 0 --eps0 0.05 --depth 0.05 -o " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(run("oracle compare " + a.string() + " " + b.string() + " --tol 1e-9 --strict") == 0);
    CHECK(run("model spectrum --h 0.01 --e0 0.002 --eps0 0.05 --depth 0.05 --mu 1.3 -o " + c.string()) == 0);
    CHECK(run("oracle compare " + a.string() + " " + c.string() + " --tol 1e-9 --strict") == 1);

    const fs::path circ = kDir / "circle.csv";
    CHECK(run("circle-model --n 256 --h 0.1 --z 0.05,0 --z 0.025,0 -o " + circ.string()) == 0);
    CHECK(count_lines(slurp(circ)) == 3);
}

TEST_CASE("full run writes a manifest") {
    const fs::path out = kDir / "run_out";
    fs::remove_all(out);
    const fs::path cfg = write("run.json", R"({"system": {"builtin": "model"}, "h": 0.01,
        "window": {"e0": 0, "eps0": 0.05, "depth": 0.05},
        "oracle": {"kind": "model-exact"},
        "output_dir": ")" + out.string() + R"("})");
    CHECK(run("run --plot --config " + cfg.string(), (kDir / "run.txt").string()) == 0);
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "plot_det_scan.csv"));
    CHECK(slurp(kDir / "run.txt").find("comparison max_err") != std::string::npos);
}
