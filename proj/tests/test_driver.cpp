#include "bvwave/driver.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace bvwave;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "bvwave_driver_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
  args.insert(args.begin(), "bvwave");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(int(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::string> problems_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.problems;
  }
  return {};
}

}  // namespace

TEST_CASE("registry media are deterministic") {
  const Problem a = registry("random-5-jumps(11)"), b = registry("random-5-jumps(11)"), c = registry("random-5-jumps(12)");
  CHECK(a.medium.alpha().breakpoints() == b.medium.alpha().breakpoints());
  CHECK(a.medium.beta().breakpoints() == b.medium.beta().breakpoints());
  for (double x = -2.5; x <= 2.5; x += 0.0625) {
    CHECK(a.medium.alpha()(x) == b.medium.alpha()(x));
    CHECK(a.medium.beta()(x) == b.medium.beta()(x));
  }
  bool differs = a.medium.alpha().breakpoints() != c.medium.alpha().breakpoints() ||
                 a.medium.beta().breakpoints() != c.medium.beta().breakpoints();
  for (double x = -2.5; x <= 2.5; x += 0.0625)
    differs = differs || a.medium.alpha()(x) != c.medium.alpha()(x) || a.medium.beta()(x) != c.medium.beta()(x);
  CHECK(differs);
  CHECK_THROWS(registry("random-0-jumps(1)"));
  CHECK_THROWS(registry("vacuum"));
  CHECK(registry("slab").medium.beta()(0.0) == 4.0);
}

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(R"({"medium": "slab", "seed": 5, "simulate": {"T": 12, "dx": 0.01},
      "resonances": {"rect": [0.1, 2, -1, -0.01]}, "suite": {"criteria": [1, 5]}})");
  CHECK(c.problem.name == "slab");
  CHECK(c.seed == 5);
  CHECK(c.simulate.T == 12.0);
  CHECK(c.simulate.dx == 0.01);
  CHECK(c.simulate.R1 == 3.0);
  REQUIRE(c.resonances.rect);
  CHECK(c.resonances.rect->im_max == -0.01);
  CHECK(c.suite.criteria == std::vector<int>{1, 5});

  const ExperimentConfig m = parse_config(R"({"medium": {"alpha": {"tails": [1, 1]},
      "beta": {"breakpoints": [-1, 1], "pieces": [[2]], "tails": [1, 1]}}})");
  CHECK(m.problem.medium.beta()(0.0) == 2.0);
  CHECK(m.problem.medium.interfaces() == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("malformed config reports line and column") {
  const auto p = problems_of("{\n  \"medium\": \"slab\",\n  \"simulate\": {\"T\": 3,, }\n}\n");
  REQUIRE(p.size() == 1);
  CHECK(p[0].rfind("config:3:", 0) == 0);
}

TEST_CASE("every config violation is reported") {
  const auto p = problems_of(R"({"medium": "nope", "simulate": {"T": -1, "zzz": 1}, "weight": {"grid_points": 1.5},
      "resonances": {"rect": [1, 0, 0, 1]}, "suite": {"criteria": [9]}, "extra": true})");
  CHECK(p.size() == 7);
  auto has = [&](const std::string& s) {
    return std::any_of(p.begin(), p.end(), [&](const std::string& q) { return q.find(s) != std::string::npos; });
  };
  CHECK(has("medium"));
  CHECK(has("simulate.T"));
  CHECK(has("\"zzz\""));
  CHECK(has("weight.grid_points"));
  CHECK(has("resonances.rect"));
  CHECK(has("no criterion 9"));
  CHECK(has("\"extra\""));
  CHECK(problems_of("{}").size() == 1);
}

TEST_CASE("data files") {
  const fs::path dir = scratch("data");
  {
    std::ofstream(dir / "data.json") << R"({"w1": {"breakpoints": [-0.5, 0.5], "pieces": [[2]], "tails": [0, 0]}})";
    std::ofstream(dir / "cfg.json") << R"({"medium": "free", "data": "data.json"})";
    std::ofstream(dir / "missing.json") << R"({"medium": "free", "data": "nowhere.json"})";
  }
  const ExperimentConfig c = load_config(dir / "cfg.json");
  CHECK(c.problem.data.w1(0.0) == 2.0);
  CHECK(c.problem.data.w1(0.75) == 0.0);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "absent.json"), ConfigError);
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("exit");
  std::string out, err;
  CHECK(run({"--help"}, &out) == exit_pass);
  CHECK(out.find("resonances") != std::string::npos);
  CHECK(run({}) == exit_usage);
  CHECK(run({"resonances"}, nullptr, &err) == exit_usage);
  CHECK(err.find("--medium") != std::string::npos);
  CHECK(run({"resonances", "--medium", "slab", "--rect", "0,1"}) == exit_usage);
  CHECK(run({"resonances", "--medium", "slab", "--no-such-flag"}) == exit_usage);
  CHECK(run({"simulate", "--medium", "unknown-medium"}) == exit_usage);
  CHECK(run({"simulate", "--medium", "slab", "--data", (dir / "nothing.json").string()}) == exit_usage);

  // W(0) = 0 always, so a rectangle through the origin puts a zero on the contour.
  CHECK(run({"resonances", "--medium", "slab", "--rect", "0,1,-1,1", "--output-dir", dir.string()}, &out) == exit_usage);
  CHECK(out.find("suggested rect") != std::string::npos);

  CHECK(run({"bv-check", "--medium", "free", "--output-dir", dir.string()}) == exit_pass);
  CHECK(slurp(dir / "bv_check.json").find("\"passed\": true") != std::string::npos);
}

TEST_CASE("free medium has no resonances") {
  const fs::path dir = scratch("free");
  CHECK(run({"resonances", "--medium", "free", "--output-dir", dir.string()}) == exit_pass);
  CHECK(slurp(dir / "poles.csv") == "re,im,abs_W_residual,certified\n");
}

TEST_CASE("reruns give byte-identical tables") {
  const fs::path a = scratch("rerun_a"), b = scratch("rerun_b");
  for (const auto& d : {a, b}) {
    REQUIRE(run({"resonances", "--medium", "two-slab", "--rect", "0.05,6,-2,-0.01", "--output-dir", d.string()}) == exit_pass);
    REQUIRE(run({"simulate", "--medium", "slab", "--T", "6", "--dx", "0.01", "--output-dir", d.string()}) != exit_usage);
  }
  const std::string poles = slurp(a / "poles.csv");
  CHECK(std::count(poles.begin(), poles.end(), '\n') > 2);
  CHECK(poles == slurp(b / "poles.csv"));
  CHECK(slurp(a / "decay.csv") == slurp(b / "decay.csv"));
  CHECK(slurp(a / "decay_plot.py").find("decay.csv") != std::string::npos);
}

TEST_CASE("suite runs subcommands then criteria") {
  const fs::path dir = scratch("suite");
  std::ofstream(dir / "suite.json.in") << R"({"medium": "slab", "suite": {"run": ["bv-check"], "criteria": [1]}})";
  std::string out;
  CHECK(run({"suite", "--config", (dir / "suite.json.in").string(), "--output-dir", dir.string()}, &out) == exit_pass);
  CHECK(out.find("PASS  criterion 1") != std::string::npos);
  CHECK(fs::exists(dir / "bv_check.json"));
  CHECK(slurp(dir / "suite.json").find("\"exit\": 0") != std::string::npos);
}
