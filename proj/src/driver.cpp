#include "bvwave/driver.hpp"

#include "bvwave/acceptance.hpp"
#include "bvwave/bv_check.hpp"
#include "bvwave/bv_json.hpp"
#include "bvwave/helmholtz.hpp"
#include "bvwave/wavesim.hpp"
#include "bvwave/weight.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace bvwave {

using json = nlohmann::json;
using PF = PiecewiseFunction<double>;
namespace fs = std::filesystem;

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Collects every problem instead of stopping at the first.
class Reader {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& where, const std::string& what) { errors.push_back(where + ": " + what); }

  void keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
    for (const auto& [k, v] : obj.items())
      if (!allowed.count(k)) fail(where, "unknown key \"" + k + "\"");
  }

  void number(const json& obj, const char* key, double& dst, const std::string& where, bool positive = false) {
    if (!obj.contains(key)) return;
    const json& v = obj[key];
    if (!v.is_number()) return fail(where + "." + key, "expected a number");
    if (positive && !(v.get<double>() > 0.0)) return fail(where + "." + key, "must be positive");
    dst = v.get<double>();
  }
  void number(const json& obj, const char* key, std::optional<double>& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    double d = 0.0;
    number(obj, key, d, where);
    dst = d;
  }

  void integer(const json& obj, const char* key, int& dst, const std::string& where, int min) {
    if (!obj.contains(key)) return;
    const json& v = obj[key];
    if (!v.is_number_integer()) return fail(where + "." + key, "expected an integer");
    if (v.get<long long>() < min) return fail(where + "." + key, "must be at least " + std::to_string(min));
    dst = v.get<int>();
  }

  void numbers(const json& obj, const char* key, std::vector<double>& dst, const std::string& where, bool positive,
               bool nonnegative = false) {
    if (!obj.contains(key)) return;
    const json& v = obj[key];
    if (!v.is_array() || v.empty()) return fail(where + "." + key, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) return fail(where + "." + key, "expected a nonempty array of numbers");
      const double d = x.get<double>();
      if (positive && !(d > 0.0)) return fail(where + "." + key, "entries must be positive");
      if (nonnegative && !(d >= 0.0)) return fail(where + "." + key, "entries must be nonnegative");
      out.push_back(d);
    }
    dst = std::move(out);
  }

  void string(const json& obj, const char* key, std::string& dst, const std::string& where) {
    if (!obj.contains(key)) return;
    if (!obj[key].is_string() || obj[key].get<std::string>().empty())
      return fail(where + "." + key, "expected a nonempty string");
    dst = obj[key].get<std::string>();
  }

  std::optional<PF> function(const json& v, const std::string& where) {
    try {
      return piecewise_from_json<double>(v);
    } catch (const std::exception& e) {
      fail(where, e.what());
      return std::nullopt;
    }
  }
  void function(const json& obj, const char* key, std::optional<PF>& dst, const std::string& where) {
    if (obj.contains(key)) dst = function(obj[key], where + "." + key);
  }

  const json* section(const json& root, const char* key) {
    if (!root.contains(key)) return nullptr;
    if (!root[key].is_object()) {
      fail(key, "expected an object");
      return nullptr;
    }
    return &root[key];
  }
};

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Byte offset to line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto p = what.find("column "); p != std::string::npos)
      if (const auto q = what.find(": ", p); q != std::string::npos) what = what.substr(q + 2);
    throw ConfigError({source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what});
  }
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError({p.string() + ": cannot open"});
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void read_data(Reader& r, const json& v, WaveData& data, const fs::path& base) {
  json obj = v;
  std::string where = "data";
  if (v.is_string()) {
    const fs::path p = base / v.get<std::string>();
    if (!fs::exists(p)) return r.fail(where, "file " + p.string() + " does not exist");
    try {
      obj = parse_json(read_file(p), p.string());
    } catch (const ConfigError& e) {
      for (const auto& s : e.problems) r.errors.push_back(s);
      return;
    }
    where = p.string();
  }
  if (!obj.is_object()) return r.fail(where, "expected an object with w0 and w1");
  r.keys(obj, where, {"w0", "w1"});
  std::optional<PF> w0, w1;
  r.function(obj, "w0", w0, where);
  r.function(obj, "w1", w1, where);
  if (w0) data.w0 = *w0;
  if (w1) data.w1 = *w1;
  try {
    data_radius(data);
  } catch (const std::exception& e) {
    r.fail(where, e.what());
  }
}

fs::path output_path(const ExperimentConfig& c, const std::string& name) {
  const fs::path p(name);
  if (p.is_absolute()) return p;
  return c.output_dir / p;
}

std::ofstream open_output(const ExperimentConfig& c, const std::string& name) {
  const fs::path p = output_path(c, name);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

void write_json(const ExperimentConfig& c, const std::string& name, const json& j) { open_output(c, name) << j.dump(2) << "\n"; }

void write_plot(const ExperimentConfig& c, const std::string& name, const std::string& csv, const std::string& x,
                const std::string& y, const std::string& group, bool logx, bool logy, const std::string& title) {
  if (name.empty()) return;
  std::ofstream out = open_output(c, name);
  out << "import numpy as np\nimport matplotlib.pyplot as plt\n\n"
      << "d = np.genfromtxt(\"" << output_path(c, csv).filename().string() << "\", delimiter=\",\", names=True)\n"
      << "fig, ax = plt.subplots()\n";
  if (group.empty()) {
    out << "ax.plot(d[\"" << x << "\"], d[\"" << y << "\"], \"o-\")\n";
  } else {
    out << "for g in np.unique(d[\"" << group << "\"]):\n"
        << "    s = d[d[\"" << group << "\"] == g]\n"
        << "    ax.plot(s[\"" << x << "\"], s[\"" << y << "\"], \"o-\", label=\"" << group << " = %g\" % g)\n"
        << "ax.legend()\n";
  }
  if (logx) out << "ax.set_xscale(\"log\")\n";
  if (logy) out << "ax.set_yscale(\"log\")\n";
  out << "ax.set_xlabel(\"" << x << "\")\nax.set_ylabel(\"" << y << "\")\nax.set_title(\"" << title << "\")\n"
      << "fig.savefig(\"" << fs::path(name).stem().string() << ".png\", dpi=150)\n";
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

bool within_factor(const std::vector<double>& v, double factor, double& med) {
  med = median(v);
  return std::all_of(v.begin(), v.end(), [&](double x) { return x <= factor * med && x >= med / factor; });
}

PF default_potential(const Medium& m) { return PF(1.0) - m.beta(); }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> p) : std::runtime_error(join(p, "\n")), problems(std::move(p)) {}

ExperimentConfig default_config(const std::string& medium) {
  ExperimentConfig c{registry(medium)};
  return c;
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir, const std::string& source) {
  const json root = parse_json(text, source);
  if (!root.is_object()) throw ConfigError({source + ": top level must be an object"});
  Reader r;
  r.keys(root, "config", {"medium", "data", "seed", "output_dir", "bv_check", "weight", "resolvent_sweep",
                          "semiclassical_sweep", "resonances", "simulate", "suite"});

  std::optional<Problem> problem;
  if (!root.contains("medium")) {
    r.fail("medium", "required (registry name or {\"alpha\": ..., \"beta\": ...})");
  } else if (root["medium"].is_string()) {
    try {
      problem = registry(root["medium"].get<std::string>());
    } catch (const std::exception& e) {
      r.fail("medium", e.what());
    }
  } else if (root["medium"].is_object()) {
    const json& m = root["medium"];
    r.keys(m, "medium", {"alpha", "beta"});
    std::optional<PF> a, b;
    if (!m.contains("alpha") || !m.contains("beta")) r.fail("medium", "needs both alpha and beta");
    r.function(m, "alpha", a, "medium");
    r.function(m, "beta", b, "medium");
    if (a && b) {
      try {
        problem = Problem{"custom", Medium(*a, *b), registry("slab").data};
      } catch (const std::exception& e) {
        r.fail("medium", e.what());
      }
    }
  } else {
    r.fail("medium", "expected a registry name or an object");
  }
  ExperimentConfig c{problem ? *problem : registry("free")};
  if (root.contains("data")) read_data(r, root["data"], c.problem.data, base_dir);
  if (root.contains("seed")) {
    if (!root["seed"].is_number_unsigned()) r.fail("seed", "expected a nonnegative integer");
    else c.seed = root["seed"].get<std::uint64_t>();
  }
  if (root.contains("output_dir")) {
    std::string d;
    r.string(root, "output_dir", d, "config");
    if (!d.empty()) c.output_dir = fs::path(d).is_absolute() ? fs::path(d) : base_dir / d;
  }

  if (const json* s = r.section(root, "bv_check")) {
    r.keys(*s, "bv_check", {"pairs", "tolerance", "out"});
    r.integer(*s, "pairs", c.bv_check.pairs, "bv_check", 1);
    r.number(*s, "tolerance", c.bv_check.tolerance, "bv_check", true);
    r.string(*s, "out", c.bv_check.out, "bv_check");
  }
  if (const json* s = r.section(root, "weight")) {
    r.keys(*s, "weight", {"V", "E", "delta", "grid_points", "random_media", "offsets", "out"});
    r.function(*s, "V", c.weight.V, "weight");
    r.number(*s, "E", c.weight.E, "weight");
    r.number(*s, "delta", c.weight.delta, "weight", true);
    r.integer(*s, "grid_points", c.weight.grid_points, "weight", 2);
    r.integer(*s, "random_media", c.weight.random_media, "weight", 0);
    r.numbers(*s, "offsets", c.weight.offsets, "weight", true);
    r.string(*s, "out", c.weight.out, "weight");
  }
  if (const json* s = r.section(root, "resolvent_sweep")) {
    auto& o = c.resolvent;
    r.keys(*s, "resolvent_sweep",
           {"re", "im", "plateau", "support", "points_per_wavelength", "plateau_factor", "out", "plot"});
    r.numbers(*s, "re", o.re, "resolvent_sweep", true);
    r.numbers(*s, "im", o.im, "resolvent_sweep", false);
    r.number(*s, "plateau", o.plateau, "resolvent_sweep", true);
    r.number(*s, "support", o.support, "resolvent_sweep", true);
    r.number(*s, "points_per_wavelength", o.points_per_wavelength, "resolvent_sweep", true);
    r.number(*s, "plateau_factor", o.plateau_factor, "resolvent_sweep", true);
    r.string(*s, "out", o.out, "resolvent_sweep");
    r.string(*s, "plot", o.plot, "resolvent_sweep");
    if (!(o.support > o.plateau)) r.fail("resolvent_sweep", "support must exceed plateau");
  }
  if (const json* s = r.section(root, "semiclassical_sweep")) {
    auto& o = c.semiclassical;
    r.keys(*s, "semiclassical_sweep",
           {"V", "alpha", "E", "delta", "h", "eps", "half_width", "points_per_wavelength", "plateau_factor", "out", "plot"});
    r.function(*s, "V", o.V, "semiclassical_sweep");
    r.function(*s, "alpha", o.alpha, "semiclassical_sweep");
    r.number(*s, "E", o.E, "semiclassical_sweep", true);
    r.number(*s, "delta", o.delta, "semiclassical_sweep", true);
    r.numbers(*s, "h", o.h, "semiclassical_sweep", true);
    r.numbers(*s, "eps", o.eps, "semiclassical_sweep", false, true);
    r.number(*s, "half_width", o.half_width, "semiclassical_sweep", true);
    r.number(*s, "points_per_wavelength", o.points_per_wavelength, "semiclassical_sweep", true);
    r.number(*s, "plateau_factor", o.plateau_factor, "semiclassical_sweep", true);
    r.string(*s, "out", o.out, "semiclassical_sweep");
    r.string(*s, "plot", o.plot, "semiclassical_sweep");
  }
  if (const json* s = r.section(root, "resonances")) {
    r.keys(*s, "resonances", {"rect", "out"});
    if (s->contains("rect")) {
      std::vector<double> v;
      r.numbers(*s, "rect", v, "resonances", false);
      if (v.size() == 4 && v[0] < v[1] && v[2] < v[3]) c.resonances.rect = Rect{v[0], v[1], v[2], v[3]};
      else r.fail("resonances.rect", "expected [re_min, re_max, im_min, im_max] with min < max");
    }
    r.string(*s, "out", c.resonances.out, "resonances");
  }
  if (const json* s = r.section(root, "simulate")) {
    auto& o = c.simulate;
    r.keys(*s, "simulate", {"T", "R1", "dx", "sample_interval", "fit_T0", "fit_T1", "drift_tolerance", "out", "plot"});
    r.number(*s, "T", o.T, "simulate", true);
    r.number(*s, "R1", o.R1, "simulate", true);
    r.number(*s, "dx", o.dx, "simulate", true);
    r.number(*s, "sample_interval", o.sample_interval, "simulate", true);
    r.number(*s, "fit_T0", o.fit_T0, "simulate");
    r.number(*s, "fit_T1", o.fit_T1, "simulate");
    r.number(*s, "drift_tolerance", o.drift_tolerance, "simulate", true);
    r.string(*s, "out", o.out, "simulate");
    r.string(*s, "plot", o.plot, "simulate");
  }
  if (const json* s = r.section(root, "suite")) {
    r.keys(*s, "suite", {"run", "criteria", "out"});
    static const std::set<std::string> known{"bv-check", "weight", "resolvent-sweep", "semiclassical-sweep",
                                             "resonances", "simulate"};
    if (s->contains("run")) {
      if (!(*s)["run"].is_array()) r.fail("suite.run", "expected an array of subcommand names");
      else
        for (const auto& v : (*s)["run"]) {
          if (!v.is_string() || !known.count(v.get<std::string>())) r.fail("suite.run", "unknown subcommand " + v.dump());
          else c.suite.run.push_back(v.get<std::string>());
        }
    }
    if (s->contains("criteria")) {
      c.suite.criteria.clear();
      if (!(*s)["criteria"].is_array()) r.fail("suite.criteria", "expected an array of criterion numbers");
      else
        for (const auto& v : (*s)["criteria"]) {
          if (!v.is_number_integer() || v.get<int>() < 1 || v.get<int>() > 8) r.fail("suite.criteria", "no criterion " + v.dump());
          else c.suite.criteria.push_back(v.get<int>());
        }
    }
    r.string(*s, "out", c.suite.out, "suite");
  }
  if (!r.errors.empty()) throw ConfigError(r.errors);
  return c;
}

ExperimentConfig load_config(const fs::path& file) {
  if (!fs::exists(file)) throw ConfigError({file.string() + ": config file does not exist"});
  return parse_config(read_file(file), file.parent_path(), file.string());
}

int run_bv_check(const ExperimentConfig& c, std::ostream& log) {
  const BVCheckResult r = run_bv_checks(c.seed, c.bv_check.pairs);
  const bool ok = r.worst() <= c.bv_check.tolerance;
  write_json(c, c.bv_check.out,
             {{"seed", c.seed}, {"pairs", r.pairs}, {"ftc", r.ftc}, {"product", r.product},
              {"product_vs_direct", r.product_vs_direct}, {"chain", r.chain}, {"chain_atoms", r.chain_atoms},
              {"ibp", r.ibp}, {"worst", r.worst()}, {"tolerance", c.bv_check.tolerance}, {"passed", ok}});
  log << "bv-check: " << r.pairs << " pairs, worst identity error " << r.worst() << (ok ? " (pass)" : " (FAIL)") << "\n";
  return ok ? exit_pass : exit_failure;
}

int run_weight(const ExperimentConfig& c, std::ostream& log) {
  const Medium& m = c.problem.medium;
  const PF V = c.weight.V ? *c.weight.V : default_potential(m);
  const double supV = bounds(V).first;
  const double E = c.weight.E ? *c.weight.E : supV + 1.0;
  json j{{"medium", c.problem.name}, {"E", E}, {"delta", c.weight.delta}};
  bool ok = true;
  try {
    const WeightBundle b = build_weight(V, m.alpha(), E, c.weight.delta);
    const double R = std::max(m.R0(), 1.0) + 2.0;
    std::vector<double> grid;
    for (int i = 0; i < c.weight.grid_points; ++i) grid.push_back(-R + 2.0 * R * i / (c.weight.grid_points - 1));
    const LowerBoundReport rep = verify_lower_bounds(b, V, m.alpha(), b.E_min, grid);
    const double rN = b.recursion.r.back();
    ok = rep.passed() && rN <= b.bound * (1.0 + 1e-12) + 1e-12;
    j["k"] = b.k;
    j["sites"] = b.sites;
    j["A"] = b.recursion.A;
    j["B"] = b.recursion.B;
    j["r"] = b.recursion.r;
    j["recursion_bound"] = b.bound;
    j["q2_limit"] = b.q2_limit;
    j["lower_bounds"] = rep.summary();
    j["lower_bounds_passed"] = rep.passed();
    log << "weight: " << b.sites.size() << " sites, r_N = " << rN << " <= " << b.bound << "; " << rep.summary() << "\n";
  } catch (const std::domain_error& e) {
    ok = false;
    j["error"] = e.what();
    log << "weight: " << e.what() << "\n";
  }
  if (c.weight.random_media > 0) {
    const WeightCheckResult w = run_weight_checks(c.seed, c.weight.random_media, c.weight.offsets, c.weight.grid_points);
    ok = ok && w.passed();
    j["random"] = {{"cases", w.cases},           {"max_A", w.max_A},
                   {"max_B", w.max_B},           {"bound_failures", w.bound_failures},
                   {"margin_failures", w.margin_failures}, {"first_failure", w.first_failure}};
    log << "weight: " << w.cases << " random problems, " << w.bound_failures + w.margin_failures << " failures\n";
  }
  j["passed"] = ok;
  write_json(c, c.weight.out, j);
  return ok ? exit_pass : exit_failure;
}

int run_resolvent_sweep(const ExperimentConfig& c, std::ostream& log) {
  const auto& o = c.resolvent;
  Medium m = c.problem.medium;
  if (!m.piecewise_constant()) {
    m = piecewise_constant_approximation(m, 0.01);
    log << "resolvent-sweep: coefficients replaced by cell averages on cells <= 0.01\n";
  }
  NormOptions opt;
  opt.points_per_wavelength = o.points_per_wavelength;
  const auto rows = resolvent_sweep(m, o.re, o.im, plateau_cutoff(o.plateau, o.support), opt);
  std::ofstream out = open_output(c, o.out);
  out << "re_lambda,im_lambda,norm,norm_times_relambda\n";
  std::vector<double> scaled;
  for (const auto& r : rows) {
    out << num(r.re_lambda) << "," << num(r.im_lambda) << "," << num(r.norm) << "," << num(r.norm_times_relambda) << "\n";
    scaled.push_back(r.norm_times_relambda);
  }
  write_plot(c, o.plot, o.out, "re_lambda", "norm_times_relambda", "im_lambda", true, false,
             "|Re lambda| times cutoff resolvent norm");
  double med;
  const bool ok = within_factor(scaled, o.plateau_factor, med);
  log << "resolvent-sweep: " << rows.size() << " probes, |Re lambda| * norm in ["
      << *std::min_element(scaled.begin(), scaled.end()) << ", " << *std::max_element(scaled.begin(), scaled.end())
      << "], median " << med << (ok ? " (plateau)" : " (outside the plateau factor)") << "\n";
  return ok ? exit_pass : exit_failure;
}

int run_semiclassical_sweep(const ExperimentConfig& c, std::ostream& log) {
  const auto& o = c.semiclassical;
  const PF V = o.V ? *o.V : default_potential(c.problem.medium);
  const PF alpha = o.alpha ? *o.alpha : c.problem.medium.alpha();
  SemiclassicalOptions opt;
  opt.half_width = o.half_width;
  opt.points_per_wavelength = o.points_per_wavelength;
  const auto rows = semiclassical_sweep(alpha, V, o.E, o.delta, o.h, o.eps, opt);
  std::ofstream out = open_output(c, o.out);
  out << "h,eps,norm,h_times_norm\n";
  std::vector<double> scaled;
  for (const auto& r : rows) {
    out << num(r.h) << "," << num(r.eps) << "," << num(r.norm) << "," << num(r.h_times_norm) << "\n";
    if (r.eps == o.eps.front()) scaled.push_back(r.h_times_norm);
  }
  write_plot(c, o.plot, o.out, "h", "h_times_norm", "eps", true, false, "h times weighted resolvent norm");
  double med;
  const bool ok = within_factor(scaled, o.plateau_factor, med);
  log << "semiclassical-sweep: " << rows.size() << " probes, h * norm median " << med
      << (ok ? " (plateau)" : " (outside the plateau factor)") << "\n";
  return ok ? exit_pass : exit_failure;
}

int run_resonances(const ExperimentConfig& c, std::ostream& log) {
  const std::vector<Rect> regions = c.resonances.rect ? std::vector<Rect>{*c.resonances.rect} : default_search_region();
  ResonanceSet set;
  try {
    set = find_resonances(c.problem.medium, regions);
  } catch (const BoundaryZero& e) {
    const Rect& s = e.suggestion;
    log << "resonances: " << e.what() << "; suggested rect " << s.re_min << "," << s.re_max << "," << s.im_min << ","
        << s.im_max << "\n";
    return exit_usage;
  }
  std::ofstream out = open_output(c, c.resonances.out);
  out << "re,im,abs_W_residual,certified\n";
  int zero = 0;
  for (const auto& p : set.poles) {
    if (p.lambda == cd(0.0)) {
      ++zero;
      continue;
    }
    out << num(p.lambda.real()) << "," << num(p.lambda.imag()) << "," << num(p.abs_W) << ","
        << (p.certified ? "true" : "false") << "\n";
  }
  log << "resonances: " << set.poles.size() - std::size_t(zero) << " poles"
      << (set.all_certified() ? ", all certified by the argument principle" : ", some NOT certified") << "\n"
      << "resonances: lambda = 0 is a zero of W for every medium (constant solution); "
      << (zero ? "it lies in the region and is omitted from the table" : "it is outside the search region") << "\n";
  return set.all_certified() ? exit_pass : exit_failure;
}

int run_simulate(const ExperimentConfig& c, std::ostream& log) {
  const auto& o = c.simulate;
  SimulationOptions opt;
  opt.dx = o.dx;
  opt.T = o.T;
  opt.R1 = o.R1;
  opt.sample_interval = o.sample_interval;
  opt.fit_T0 = o.fit_T0;
  opt.fit_T1 = o.fit_T1;
  const DecayReport r = simulate(c.problem.medium, c.problem.data, opt);
  std::ofstream out = open_output(c, o.out);
  out << "t,h1_dist,l2_dtw,global_energy\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    out << num(r.times[i]) << "," << num(r.h1_distance[i]) << "," << num(r.l2_dtw[i]) << "," << num(r.global_energy[i]) << "\n";
  write_plot(c, o.plot, o.out, "t", "h1_dist", "", false, true, "local H1 distance to w_inf");
  const bool ok = r.energy_drift() < o.drift_tolerance;
  log << "simulate: w_inf = " << r.w_infinity << ", energy drift " << r.energy_drift() << (ok ? "" : " (FAIL)") << "\n";
  if (r.fit)
    log << "simulate: fitted c = " << r.fit->c << ", C = " << r.fit->C << " on [" << r.fit->T0 << ", " << r.fit->T1 << "]\n";
  else
    log << "simulate: fit refused: " << r.fit_refusal << "\n";
  return ok ? exit_pass : exit_failure;
}

int run_suite(const ExperimentConfig& c, std::ostream& log) {
  json j{{"medium", c.problem.name}, {"subcommands", json::object()}, {"criteria", json::array()}};
  int status = exit_pass;
  for (const auto& name : c.suite.run) {
    int s = exit_usage;
    if (name == "bv-check") s = run_bv_check(c, log);
    else if (name == "weight") s = run_weight(c, log);
    else if (name == "resolvent-sweep") s = run_resolvent_sweep(c, log);
    else if (name == "semiclassical-sweep") s = run_semiclassical_sweep(c, log);
    else if (name == "resonances") s = run_resonances(c, log);
    else if (name == "simulate") s = run_simulate(c, log);
    j["subcommands"][name] = s;
    status = std::max(status, s);
  }
  for (const auto& r : run_acceptance(c.suite.criteria)) {
    log << format_result(r);
    j["criteria"].push_back({{"id", r.id}, {"title", r.title}, {"passed", r.passed}, {"details", r.details}});
    if (!r.passed) status = std::max<int>(status, exit_failure);
  }
  j["exit"] = status;
  write_json(c, c.suite.out, j);
  return status;
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wave propagation in bounded-variation media: checks, sweeps, resonances, simulation"};
  app.require_subcommand(1);
  std::string config, medium, output_dir, out_file, rect, data_file;
  std::optional<double> T, R1, dx;

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config, "experiment config (JSON)");
    s->add_option("--medium", medium, "registry medium (free, slab, two-slab, alpha-jump, random-K-jumps(SEED))");
    s->add_option("--output-dir", output_dir, "directory for reports");
  };
  auto with_out = [&](CLI::App* s) {
    common(s);
    s->add_option("--out", out_file, "main output file");
    return s;
  };
  with_out(app.add_subcommand("bv-check", "randomized BV calculus identities"));
  with_out(app.add_subcommand("weight", "Carleman weight construction and lower-bound verification"));
  with_out(app.add_subcommand("resolvent-sweep", "cutoff resolvent norms over a lambda grid"));
  with_out(app.add_subcommand("semiclassical-sweep", "weighted semiclassical resolvent norms over an h grid"));
  auto* res = with_out(app.add_subcommand("resonances", "zeros of the Wronskian in a rectangle"));
  res->add_option("--rect", rect, "re_min,re_max,im_min,im_max");
  auto* sim = with_out(app.add_subcommand("simulate", "time-domain decay run"));
  sim->add_option("--data", data_file, "Cauchy data JSON {w0, w1}");
  sim->add_option("--T", T, "final time");
  sim->add_option("--R1", R1, "local energy window half-width");
  sim->add_option("--dx", dx, "grid spacing");
  with_out(app.add_subcommand("suite", "subcommands from the config, then the acceptance criteria"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_pass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_pass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return exit_usage;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  ExperimentConfig c{registry("free")};
  try {
    if (!config.empty()) {
      c = load_config(config);
      if (!medium.empty()) c.problem = registry(medium);
    } else if (!medium.empty()) {
      c = default_config(medium);
    } else {
      err << "error: give --config FILE or --medium NAME\n";
      return exit_usage;
    }
    if (!output_dir.empty()) c.output_dir = output_dir;
    if (!data_file.empty()) {
      Reader r;
      if (!fs::exists(data_file)) throw ConfigError({data_file + ": data file does not exist"});
      read_data(r, parse_json(read_file(data_file), data_file), c.problem.data, ".");
      if (!r.errors.empty()) throw ConfigError(r.errors);
    }
    if (T) c.simulate.T = *T;
    if (R1) c.simulate.R1 = *R1;
    if (dx) c.simulate.dx = *dx;
    if (!rect.empty()) {
      std::vector<double> v;
      std::stringstream ss(rect);
      for (std::string tok; std::getline(ss, tok, ',');) v.push_back(std::stod(tok));
      if (v.size() != 4 || !(v[0] < v[1] && v[2] < v[3]))
        throw ConfigError({"--rect: expected re_min,re_max,im_min,im_max with min < max"});
      c.resonances.rect = Rect{v[0], v[1], v[2], v[3]};
    }
    if (!out_file.empty()) {
      if (cmd == "bv-check") c.bv_check.out = out_file;
      else if (cmd == "weight") c.weight.out = out_file;
      else if (cmd == "resolvent-sweep") c.resolvent.out = out_file;
      else if (cmd == "semiclassical-sweep") c.semiclassical.out = out_file;
      else if (cmd == "resonances") c.resonances.out = out_file;
      else if (cmd == "simulate") c.simulate.out = out_file;
      else c.suite.out = out_file;
    }
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems) err << "config error: " << p << "\n";
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }

  try {
    if (cmd == "bv-check") return run_bv_check(c, out);
    if (cmd == "weight") return run_weight(c, out);
    if (cmd == "resolvent-sweep") return run_resolvent_sweep(c, out);
    if (cmd == "semiclassical-sweep") return run_semiclassical_sweep(c, out);
    if (cmd == "resonances") return run_resonances(c, out);
    if (cmd == "simulate") return run_simulate(c, out);
    return run_suite(c, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_usage;
  }
}

}  // namespace bvwave
