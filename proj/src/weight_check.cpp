#include "bvwave/weight.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bvwave {

namespace {
double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
}  // namespace

std::pair<RealFunction, RealFunction> random_weight_problem(std::mt19937_64& rng, int max_jumps) {
  const int n = std::uniform_int_distribution<int>(1, max_jumps)(rng);
  std::vector<double> b;
  while (int(b.size()) < n) {
    const double x = std::uniform_int_distribution<int>(-12, 12)(rng) / 4.0;
    if (std::find(b.begin(), b.end(), x) == b.end()) b.push_back(x);
  }
  std::sort(b.begin(), b.end());
  // Each breakpoint belongs to V, alpha, or both.
  std::vector<double> bv, ba;
  for (double x : b) {
    const int who = std::uniform_int_distribution<int>(0, 2)(rng);
    if (who != 1) bv.push_back(x);
    if (who != 0) ba.push_back(x);
  }
  std::vector<Smooth<double>> pv{Smooth<double>(uniform(rng, -1, 1))};
  for (std::size_t i = 1; i < bv.size(); ++i)
    pv.push_back(Smooth<double>::polynomial({uniform(rng, -1, 1), uniform(rng, -1, 1), uniform(rng, -0.5, 0.5)}));
  if (!bv.empty()) pv.push_back(Smooth<double>(uniform(rng, -1, 1)));
  std::vector<Smooth<double>> pa{Smooth<double>(uniform(rng, 0.5, 2.5))};
  for (std::size_t i = 1; i < ba.size(); ++i) {
    // Linear between positive endpoint values stays positive.
    const double x0 = ba[i - 1], x1 = ba[i], y0 = uniform(rng, 0.5, 2.5), y1 = uniform(rng, 0.5, 2.5);
    const double s = (y1 - y0) / (x1 - x0);
    pa.push_back(Smooth<double>::polynomial({y0 - s * x0, s}));
  }
  if (!ba.empty()) pa.push_back(Smooth<double>(uniform(rng, 0.5, 2.5)));
  return {RealFunction(bv, pv), RealFunction(ba, pa)};
}

WeightCheckResult run_weight_checks(std::uint64_t seed, int media, const std::vector<double>& offsets, int grid_points) {
  std::mt19937_64 rng(seed);
  std::vector<std::pair<RealFunction, RealFunction>> problems{{RealFunction::indicator(-1.0, 1.0, -3.0, 0.0), RealFunction(1.0)}};
  for (int m = 0; m < media; ++m) problems.push_back(random_weight_problem(rng, 8));
  std::vector<double> grid;
  for (int i = 0; i < grid_points; ++i) grid.push_back(-5.0 + 10.0 * i / (grid_points - 1));

  WeightCheckResult res;
  for (std::size_t p = 0; p < problems.size(); ++p) {
    const auto& [V, alpha] = problems[p];
    const double supV = bounds(V).first;
    for (double off : offsets) {
      const double E = supV + off;
      ++res.cases;
      const WeightBundle b = build_weight(V, alpha, E, 1.0);
      for (double A : b.recursion.A) res.max_A = std::max(res.max_A, A);
      for (double B : b.recursion.B) res.max_B = std::max(res.max_B, B);
      if (b.recursion.r.back() > b.bound * (1 + 1e-14)) {
        ++res.bound_failures;
        if (res.first_failure.empty()) {
          std::ostringstream s;
          s << "problem " << p << ", E = " << E << ": r_N = " << b.recursion.r.back() << " exceeds bound " << b.bound;
          res.first_failure = s.str();
        }
      }
      const LowerBoundReport rep = verify_lower_bounds(b, V, alpha, E, grid);
      res.atoms_checked += rep.atoms_energy.size() + rep.atoms_alpha.size();
      res.densities_checked += rep.density_energy.size() + rep.density_alpha.size();
      for (const auto* list : {&rep.atoms_energy, &rep.atoms_alpha, &rep.density_energy, &rep.density_alpha})
        for (const auto& m : *list) {
          res.worst_relative_margin = std::min(res.worst_relative_margin, m.margin / m.scale);
          if (m.margin < -rep.tolerance * m.scale) {
            ++res.margin_failures;
            if (res.first_failure.empty()) {
              std::ostringstream s;
              s << "problem " << p << ", E = " << E << ": margin " << m.margin << " at x = " << m.x;
              res.first_failure = s.str();
            }
          }
        }
    }
  }
  return res;
}

}  // namespace bvwave
