#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

const char* cli() { return std::getenv("ROUGH_CLI"); }

int run(const std::string& args) {
    std::string cmd = std::string(cli()) + " " + args + " > /dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("rough_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_config(const fs::path& p, const std::string& body) {
    std::ofstream os(p);
    os << body;
}

}  // namespace

TEST_CASE("cli is available to the test binary") { REQUIRE(cli() != nullptr); }

TEST_CASE("sample is deterministic for a fixed seed") {
    fs::path dir = fresh_dir("sample");
    write_config(dir / "cfg", "H = 0.35\nn = 64\nd = 1\n");
    std::string base = "sample --config " + (dir / "cfg").string() + " --seed 7 --out ";
    CHECK(run(base + (dir / "a").string()) == 0);
    CHECK(run(base + (dir / "b").string()) == 0);
    std::string a = slurp(dir / "a" / "path.csv");
    std::string b = slurp(dir / "b" / "path.csv");
    CHECK(a.size() > 0);
    CHECK(a == b);
    SUBCASE("a different seed changes the sample") {
        CHECK(run("sample --config " + (dir / "cfg").string() + " --seed 8 --out " +
                  (dir / "c").string()) == 0);
        CHECK(slurp(dir / "c" / "path.csv") != a);
    }
}

TEST_CASE("invalid configuration exits with code 2") {
    fs::path dir = fresh_dir("badcfg");
    write_config(dir / "cfg", "H = 0.2\nn = 64\n");  // H outside (1/4, 1)
    CHECK(run("sample --config " + (dir / "cfg").string() + " --out " + dir.string()) == 2);
    write_config(dir / "cfg2", "H = 0.35\nn = 100\n");  // n not a power of two
    CHECK(run("sample --config " + (dir / "cfg2").string() + " --out " + dir.string()) == 2);
    write_config(dir / "cfg3", "H = 0.35\nn = 64\nN = 0\n");
    CHECK(run("mc-area --config " + (dir / "cfg3").string() + " --out " + dir.string()) == 2);
    CHECK(run("solve-dde --config " + (dir / "cfg2").string() + " --out " + dir.string()) == 2);
}

TEST_CASE("validate audits cleanly and flags injected faults") {
    fs::path dir = fresh_dir("validate");
    write_config(dir / "cfg", "H = 0.35\nn = 64\nd = 2\ndelays = 0.125\n");
    std::string base = "validate --config " + (dir / "cfg").string() + " --seed 3 --out ";
    CHECK(run(base + (dir / "ok").string()) == 0);
    std::string audit = slurp(dir / "ok" / "audit.csv");
    CHECK(audit.find("identity,residual,scale,relative") == 0);
    CHECK(run(base + (dir / "bad").string() + " --inject-fault") == 0);
    std::string bad = slurp(dir / "bad" / "audit.csv");
    CHECK(bad != audit);
    // The perturbed audit must report a residual far above clean rounding.
    double worst = 0.0;
    std::stringstream ss(bad);
    std::string line;
    std::getline(ss, line);  // header
    while (std::getline(ss, line)) {
        auto pos = line.rfind(',');
        if (pos != std::string::npos) worst = std::max(worst, std::stod(line.substr(pos + 1)));
    }
    CHECK(worst >= 1e-4);
}

TEST_CASE("solve-sde produces a solution and report") {
    fs::path dir = fresh_dir("sde");
    write_config(dir / "cfg",
                 "driver = line\nn = 64\nd = 1\nl = 1\nvector_field = linear\na = 1\n");
    CHECK(run("solve-sde --config " + (dir / "cfg").string() + " --out " + dir.string()) == 0);
    std::string report = slurp(dir / "report.txt");
    CHECK(report.find("method = step3") != std::string::npos);
    std::string sol = slurp(dir / "solution.csv");
    CHECK(sol.find("t,x1") == 0);
    // Final value approximates e.
    auto pos = sol.rfind(',');
    double last = std::stod(sol.substr(pos + 1));
    CHECK(last == doctest::Approx(2.718281828).epsilon(1e-4));
}

TEST_CASE("solve-dde runs on a delayed field") {
    fs::path dir = fresh_dir("dde");
    write_config(dir / "cfg",
                 "driver = line\nn = 64\nd = 1\nl = 1\ndelays = 0.25\n"
                 "vector_field = delay-linear\nparams = 0, 1\na = 1\n");
    CHECK(run("solve-dde --config " + (dir / "cfg").string() + " --out " + dir.string()) == 0);
    std::string sol = slurp(dir / "solution.csv");
    CHECK(sol.find("t,x1") == 0);
    auto pos = sol.rfind(',');
    double last = std::stod(sol.substr(pos + 1));
    // Piecewise-polynomial value of the unit-history delay equation at t = 1.
    CHECK(last == doctest::Approx(2.30224609375).epsilon(1e-3));
}

TEST_CASE("mc-area reports a small z for the Brownian diagonal") {
    fs::path dir = fresh_dir("mc");
    write_config(dir / "cfg", "H = 0.5\nn = 128\nN = 200\ntau = 1\nv1 = 0\n");
    CHECK(run("mc-area --config " + (dir / "cfg").string() + " --seed 11 --out " + dir.string()) ==
          0);
    std::string mc = slurp(dir / "mc.csv");
    CHECK(mc.find("H,v1,v2,tau,N,mean,stderr,closed_form,z") == 0);
}
