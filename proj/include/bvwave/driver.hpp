#pragma once

#include "bvwave/registry.hpp"
#include "bvwave/resonances.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bvwave {

/// Invalid configuration; lists every violation found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  std::vector<std::string> problems;
};

struct BVCheckSection {
  int pairs = 200;
  double tolerance = 1e-10;
  std::string out = "bv_check.json";
};

/// Defaults: V = 1 - beta (the potential of the rescaled wave problem),
/// alpha from the medium, E = sup V + 1.
struct WeightSection {
  std::optional<PiecewiseFunction<double>> V;
  std::optional<double> E;
  double delta = 1.0;
  int grid_points = 1000;
  int random_media = 0;
  std::vector<double> offsets{0.5, 1.0, 2.0};
  std::string out = "weight.json";
};

struct ResolventSection {
  std::vector<double> re{4, 8, 16, 32, 64}, im{-0.05, 0.0, 0.05};
  double plateau = 2.0, support = 3.0;
  double points_per_wavelength = 24;
  double plateau_factor = 2.0;
  std::string out = "resolvent.csv", plot = "resolvent_plot.py";
};

struct SemiclassicalSection {
  std::optional<PiecewiseFunction<double>> V, alpha;
  double E = 1.0, delta = 1.0;
  std::vector<double> h{0.2, 0.1, 0.05, 0.025, 0.0125}, eps{0.0, 1e-6};
  double half_width = 40.0;
  double points_per_wavelength = 24;
  double plateau_factor = 2.0;
  std::string out = "semiclassical.csv", plot = "semiclassical_plot.py";
};

struct ResonanceSection {
  std::optional<Rect> rect;  // default: default_search_region()
  std::string out = "poles.csv";
};

struct SimulateSection {
  double T = 60.0, R1 = 3.0, dx = 0.0025;
  double sample_interval = 0.05;
  std::optional<double> fit_T0, fit_T1;
  double drift_tolerance = 1e-6;
  std::string out = "decay.csv", plot = "decay_plot.py";
};

struct SuiteSection {
  std::vector<std::string> run;  // subcommands executed before the criteria
  std::vector<int> criteria{1, 2, 3, 4, 5, 6, 7, 8};
  std::string out = "suite.json";
};

struct ExperimentConfig {
  explicit ExperimentConfig(Problem p) : problem(std::move(p)) {}
  Problem problem;
  std::uint64_t seed = 20240611;
  std::filesystem::path output_dir = ".";
  BVCheckSection bv_check;
  WeightSection weight;
  ResolventSection resolvent;
  SemiclassicalSection semiclassical;
  ResonanceSection resonances;
  SimulateSection simulate;
  SuiteSection suite;
};

/// Parses a JSON experiment config; relative file references resolve against base_dir.
/// Throws ConfigError (with line and column for malformed JSON).
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".",
                              const std::string& source = "config");
ExperimentConfig load_config(const std::filesystem::path& file);
/// Config for a registry medium with every section at its defaults.
ExperimentConfig default_config(const std::string& medium);

/// Exit codes of the runners and the command line.
enum Exit { exit_pass = 0, exit_failure = 1, exit_usage = 2 };

int run_bv_check(const ExperimentConfig& c, std::ostream& log);
int run_weight(const ExperimentConfig& c, std::ostream& log);
int run_resolvent_sweep(const ExperimentConfig& c, std::ostream& log);
int run_semiclassical_sweep(const ExperimentConfig& c, std::ostream& log);
int run_resonances(const ExperimentConfig& c, std::ostream& log);
int run_simulate(const ExperimentConfig& c, std::ostream& log);
/// Runs suite.run subcommands, then the acceptance criteria; writes suite.out.
int run_suite(const ExperimentConfig& c, std::ostream& log);

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bvwave
