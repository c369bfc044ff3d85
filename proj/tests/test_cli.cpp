#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "stringlab/json_io.hpp"

using namespace stringlab;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stringlab_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kCommutatorConfig = R"({
  "f": {"profile": "gaussian", "center": [0, 0], "width": 1},
  "g": {"profile": "gaussian", "center": [1.5, 0.2], "width": 0.8},
  "r": 1,
  "sampling": {"pmax": 8, "panels": 8, "nodes_per_panel": 8},
  "position_nodes": 24,
  "scan": {"direction": [0, 1], "radii": [1, 2]}
})";

}  // namespace

TEST_CASE("usage errors exit with 2") {
  const auto none = run({});
  CHECK(none.code == cli::kUsage);
  CHECK(none.err.find("spectrum") != std::string::npos);
  CHECK(run({"bogus"}).code == cli::kUsage);
  CHECK(run({"spectrum", "--d", "26"}).code == cli::kUsage);
  CHECK(run({"spectrum", "--d", "26", "--max-level", "1", "--frobnicate"}).code == cli::kUsage);
  CHECK(run({"measure", "--d", "2", "--check", "nonsense"}).code == cli::kUsage);
  CHECK(run({"observable-check", "--level", "2"}).code == cli::kUsage);
  CHECK(run({"commutator"}).code == cli::kUsage);
  CHECK(run({"spectrum", "--d", "26", "--max-level", "1", "--config", "/nonexistent/cfg.json"}).code == cli::kUsage);
}

TEST_CASE("spectrum output") {
  const auto r = run({"spectrum", "--d", "26", "--max-level", "2"});
  REQUIRE(r.code == cli::kOk);
  const auto j = json::parse(r.out);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 3);
  CHECK(j[0]["r"] == "-2/1");
  CHECK(j[1]["dim_physical"] == 24);
  CHECK(j[2]["dim_physical"] == 324);
  CHECK(j[2]["inertia"]["n_minus"] == 0);
  CHECK(j[1]["p"][0] == "1/1");
}

TEST_CASE("noghost exit codes") {
  const auto ok = run({"noghost", "--d", "26", "--level", "1"});
  CHECK(ok.code == cli::kOk);
  CHECK(json::parse(ok.out)["pass"] == true);
  const auto fault = run({"noghost", "--d", "26", "--level", "1", "--inject-fault"});
  CHECK(fault.code == cli::kCheckFailed);
  CHECK(json::parse(fault.out)["pass"] == false);
  CHECK(run({"noghost", "--d", "27", "--level", "2"}).code == cli::kCheckFailed);
}

TEST_CASE("virasoro-check reports the central terms") {
  const auto r = run({"virasoro-check", "--d", "4", "--mmax", "2", "--level", "2"});
  REQUIRE(r.code == cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["schema"] == "virasoro-check");
  CHECK(j["schema_version"] == kSchemaVersion);
  for (const auto& c : j["central_terms"]) CHECK(c["measured"] == c["expected"]);
  CHECK(j["central_terms"].size() == 2);
}

TEST_CASE("repeated runs are byte-identical") {
  const fs::path dir = scratch_dir("repeat");
  write(dir / "c.json", kCommutatorConfig);
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"spectrum", "--d", "10", "--max-level", "2"},
           {"measure", "--d", "2", "--check", "invariance", "--nodes", "32"},
           {"commutator", "--config", (dir / "c.json").string()},
           {"field-ccr", "--d", "3", "--jmax", "2", "--probes", "3", "--max-quanta", "2"}}) {
    const auto a = run(args), b = run(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
    CHECK_FALSE(a.out.empty());
  }
  // Thread count does not change the bytes either.
  auto args = std::vector<std::string>{"--jobs", "3", "spectrum", "--d", "10", "--max-level", "2"};
  CHECK(run(args).out == run({"spectrum", "--d", "10", "--max-level", "2"}).out);
  fs::remove_all(dir);
}

TEST_CASE("config files and flag overrides") {
  const fs::path dir = scratch_dir("config");
  write(dir / "s.json", R"({"d": 5, "max-level": 1})");
  const auto a = run({"spectrum", "--config", (dir / "s.json").string()});
  REQUIRE(a.code == cli::kOk);
  CHECK(json::parse(a.out)[0]["d"] == 5);
  const auto b = run({"spectrum", "--config", (dir / "s.json").string(), "--d", "7"});
  REQUIRE(b.code == cli::kOk);
  CHECK(json::parse(b.out)[0]["d"] == 7);
  CHECK(json::parse(b.out).size() == 2);
  write(dir / "bad.json", R"({"d": 5, "max-level": 1, "colour": "red"})");
  CHECK(run({"spectrum", "--config", (dir / "bad.json").string()}).code == cli::kUsage);
  write(dir / "broken.json", R"({"d": 5,)");
  CHECK(run({"spectrum", "--config", (dir / "broken.json").string()}).code == cli::kUsage);
  write(dir / "c.json", R"({"f": {"center": [0, 0]}, "g": {"center": [1, 0]}, "sampling": {"pmax": 4, "bins": 3}})");
  CHECK(run({"commutator", "--config", (dir / "c.json").string()}).code == cli::kUsage);
  fs::remove_all(dir);
}

TEST_CASE("commutator JSON and spacelike scan CSV") {
  const fs::path dir = scratch_dir("comm");
  write(dir / "c.json", kCommutatorConfig);
  const auto r = run({"commutator", "--config", (dir / "c.json").string()});
  REQUIRE(r.code == cli::kOk);
  const auto j = json::parse(r.out);
  CHECK(j["value"][0] == 0.0);
  CHECK(j["position_route"]["rel_diff"].get<double>() < 1e-3);
  const auto s = run({"commutator", "--config", (dir / "c.json").string(), "--scan", "spacelike", "--out",
                      (dir / "scan.csv").string()});
  REQUIRE(s.code == cli::kOk);
  const std::string csv = read(dir / "scan.csv");
  CHECK(csv.rfind("|a|,re,im,reference_scale\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  fs::remove_all(dir);
}

TEST_CASE("output directory from the environment") {
  const fs::path dir = scratch_dir("env");
  ::setenv("STRINGLAB_OUT_DIR", dir.c_str(), 1);
  const auto r = run({"spectrum", "--d", "26", "--max-level", "1", "--out", "table.json"});
  ::unsetenv("STRINGLAB_OUT_DIR");
  REQUIRE(r.code == cli::kOk);
  CHECK(fs::exists(dir / "table.json"));
  CHECK(fs::exists(dir / "table.csv"));
  CHECK(json::parse(read(dir / "table.json")).size() == 2);
  fs::remove_all(dir);
}

TEST_CASE("floats use 17 significant digits") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(std::nan("")) == "\"nan\"");
  json j = json::object();
  j["x"] = 1.0 / 3.0;
  j["v"] = json::array({0.5, 2.0});
  CHECK(dump(j, 0) == R"({"x":0.33333333333333331,"v":[0.5, 2]})");
  CHECK(json::parse(dump(j))["x"].get<double>() == 1.0 / 3.0);
}

TEST_CASE("json round trips") {
  const auto occ = Occupation::from_entries({{0, 1, 2}, {3, 2, 1}});
  CHECK(occupation_from_json(to_json(occ)) == occ);
  CHECK_THROWS_AS(occupation_from_json(json::array({json::array({0, 1})})), std::invalid_argument);
  CHECK(to_json(Rational(-3, 6)) == "-1/2");
  CHECK(complex_from_json(json("1/4")) == Complex(0.25, 0));
  CHECK(complex_from_json(json::array({1, -2})) == Complex(1, -2));
  FockBuilder<Complex> b(4);
  b.add(occ, Complex(0.5, -1));
  b.add(Occupation::single(2, 1), Complex(2, 0));
  const auto v = b.finish();
  CHECK(fock_from_json(4, to_json(v)) == v);
  CHECK_THROWS_AS(fock_from_json(2, to_json(v)), std::invalid_argument);
  const auto f = test_function_from_json(json::parse(R"({"profile": "bump", "center": [1, 2], "width": [0.5, 0.25]})"));
  CHECK(f.profile == Profile::bump);
  CHECK(f.width[1] == 0.25);
  CHECK_THROWS_AS(test_function_from_json(json::parse(R"({"profile": "box", "center": [0]})")), std::invalid_argument);
  CHECK_THROWS_AS(test_function_from_json(json::parse(R"({"center": [0, 0], "width": -1})")), std::invalid_argument);
}
