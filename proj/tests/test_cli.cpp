#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "typek/app.hpp"

using namespace typek;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = app::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) {
    const char* dir = std::getenv("TYPEK_TEST_DATA");
    return (fs::path(dir ? dir : "tests/data") / name).string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string l; std::getline(in, l);) ++n;
    return n;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("typek_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str(const std::string& sub = "") const { return (path / sub).string(); }
};

}  // namespace

TEST_CASE("check passes on the default builtin") {
    TempDir t;
    const auto r = run({"--builtin", "example1", "--out", t.str(), "check"});
    CHECK(r.code == 0);
    const Json j = Json::parse(slurp(t.path / "report.json"));
    CHECK(j["all_pass"] == true);
    CHECK(j["rho"]["max_rho"].get<double>() <= 0.534);
    CHECK(j["map"]["name"] == "example1");
}

TEST_CASE("check fails with a warning for a large b") {
    TempDir t;
    const auto r = run({"--builtin", "example1", "-p", "a=0.75", "-p", "b=0.2", "--out", t.str(), "check"});
    CHECK(r.code == app::kCheckFailed);
    CHECK(r.err.find("warning") != std::string::npos);
    const Json j = Json::parse(slurp(t.path / "report.json"));
    CHECK(j["all_pass"] == false);
    CHECK(j["rho"]["pass"] == false);
}

TEST_CASE("map files") {
    TempDir t;
    const auto ok = run({"--map", data("example1.map"), "--out", t.str("file"), "fixed-points"});
    CHECK(ok.code == 0);
    const auto built = run({"--builtin", "example1", "--out", t.str("builtin"), "fixed-points"});
    CHECK(built.code == 0);
    CHECK(slurp(t.path / "file" / "fixed_points.csv") == slurp(t.path / "builtin" / "fixed_points.csv"));

    const auto bad = run({"--map", data("bad.map"), "--out", t.str("bad"), "check"});
    CHECK(bad.code == app::kMapLoad);
    CHECK(bad.err.find("line 3, column 9") != std::string::npos);
    CHECK_FALSE(fs::exists(t.path / "bad" / "report.json"));

    CHECK(run({"--map", data("missing.map"), "check"}).code == app::kMapLoad);
    CHECK(run({"--builtin", "nope", "check"}).code == app::kMapLoad);
    CHECK(run({"--builtin", "example1", "-p", "c=1", "check"}).code == app::kMapLoad);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == app::kUsage);
    CHECK(run({"check"}).code == app::kUsage);
    CHECK(run({"--builtin", "example1", "--map", data("example1.map"), "check"}).code == app::kUsage);
    CHECK(run({"--builtin", "example1", "--tol", "-1", "check"}).code == app::kUsage);
    CHECK(run({"--builtin", "example1", "--grid", "2", "check"}).code == app::kUsage);
    CHECK(run({"--builtin", "example1", "--backend", "gpu", "check"}).code == app::kUsage);
    CHECK(run({"--builtin", "example1", "frobnicate"}).code == app::kUsage);
    CHECK(run({"--help"}).code == 0);
}

TEST_CASE("fixed-point catalogs") {
    TempDir t;
    CHECK(run({"--builtin", "example1", "-p", "a=1.5", "--out", t.str("i"), "fixed-points"}).code == 0);
    CHECK(line_count(t.path / "i" / "fixed_points.csv") == 1 + 4);
    CHECK(run({"--builtin", "example1", "-p", "a=0.75", "--out", t.str("ii"), "fixed-points"}).code == 0);
    CHECK(line_count(t.path / "ii" / "fixed_points.csv") == 1 + 6);
    const Json j = Json::parse(slurp(t.path / "ii" / "fixed_points.json"));
    CHECK(j["fixed_points"].size() == 6);
    CHECK(j["map"]["params"]["a"] == 0.75);
}

TEST_CASE("degenerate and violating maps") {
    TempDir t;
    const auto d = run({"--map", data("degenerate.map"), "--out", t.str(), "fixed-points"});
    CHECK(d.code == app::kDegenerate);
    CHECK(d.err.find("nullclines") != std::string::npos);
    CHECK(run({"--map", data("degenerate.map"), "--out", t.str(), "check"}).code == 0);
    CHECK(run({"--map", data("broken.map"), "--out", t.str(), "fixed-points"}).code == app::kCheckFailed);
}

TEST_CASE("attractor outputs are deterministic") {
    TempDir t;
    for (const char* sub : {"one", "two"})
        REQUIRE(run({"--builtin", "example1", "-p", "a=0.75", "--out", t.str(sub), "attractor"}).code == 0);
    for (const char* f : {"attractor.json", "attractor.svg", "fixed_points.csv", "fixed_points.json"}) {
        CAPTURE(f);
        CHECK(slurp(t.path / "one" / f) == slurp(t.path / "two" / f));
        CHECK_FALSE(slurp(t.path / "one" / f).empty());
    }
    const Json j = Json::parse(slurp(t.path / "one" / "attractor.json"));
    CHECK(j["curves"].size() == 3);
    CHECK(j["sigma_0_is_point"] == false);
}

TEST_CASE("orbit command") {
    TempDir t;
    const auto r =
        run({"--builtin", "example1", "-p", "a=1.5", "--out", t.str(), "orbit", "--x0", "0.3,1.7", "--x0", "1,1"});
    CHECK(r.code == 0);
    CHECK(fs::exists(t.path / "orbit_0.csv"));
    CHECK(fs::exists(t.path / "orbit_1.csv"));
    const Json j = Json::parse(slurp(t.path / "orbits.json"));
    REQUIRE(j["orbits"].size() == 2);
    for (const auto& o : j["orbits"]) CHECK(o["verdict"] == "converged");

    TempDir u;
    CHECK(run({"--builtin", "example1", "-p", "a=1.5", "--seed", "4", "--out", u.str(), "orbit", "--random", "5"}).code ==
          0);
    CHECK(Json::parse(slurp(u.path / "orbits.json"))["orbits"].size() == 5);

    TempDir v;
    CHECK(run({"--builtin", "example1", "--out", v.str(), "orbit", "--backward", "--x0", "0.05,0.05"}).code == 0);
    CHECK(Json::parse(slurp(v.path / "orbits.json"))["orbits"][0]["backward"] == true);

    CHECK(run({"--builtin", "example1", "--out", v.str(), "orbit", "--x0", "1,x"}).code == app::kUsage);
    CHECK(run({"--builtin", "example1", "--out", v.str(), "orbit", "--x0", "1,1,1"}).code == app::kUsage);
}

TEST_CASE("retrotone command") {
    TempDir t;
    CHECK(run({"--builtin", "example1", "--seed", "3", "--out", t.str(), "retrotone", "--pairs", "20000"}).code == 0);
    const Json j = Json::parse(slurp(t.path / "retrotone.json"));
    CHECK(j["status"] == "pass");
    CHECK(j["definition"] == "weak");
    CHECK(j["seed"] == 3);

    const auto b = run({"--map", data("broken.map"), "--out", t.str("b"), "retrotone", "--strong"});
    CHECK(b.code == app::kCheckFailed);
    CHECK(Json::parse(slurp(t.path / "b" / "retrotone.json"))["counterexample"].is_object());
}

TEST_CASE("serial and OpenMP backends write the same report") {
    TempDir t;
    CHECK(run({"--builtin", "example1", "--backend", "serial", "--out", t.str("s"), "check"}).code == 0);
    CHECK(run({"--builtin", "example1", "--backend", "openmp", "--out", t.str("p"), "check"}).code == 0);
    const Json s = Json::parse(slurp(t.path / "s" / "report.json"));
    const Json p = Json::parse(slurp(t.path / "p" / "report.json"));
    CHECK(s["rho"] == p["rho"]);
    CHECK(s["invariance"] == p["invariance"]);
}
