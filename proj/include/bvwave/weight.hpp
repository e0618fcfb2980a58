#pragma once

#include "bvwave/measure.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace bvwave {

using RealFunction = PiecewiseFunction<double>;

/// Sorted union of the points where V or alpha jumps upward.
std::vector<double> positive_jump_sets(const RealFunction& V, const RealFunction& alpha);

struct JumpRecursion {
  std::vector<double> r;  // r[0] = 0, r[j] after site j
  std::vector<double> A, B;
};

/// r_j = r_{j-1} + log max{(1+A_j)/(1-A_j), (1+B_j)/(1-B_j)} over the sites in
/// increasing order; throws std::domain_error if some A_j or B_j leaves [0, 1).
JumpRecursion jump_recursion(const RealFunction& V, const RealFunction& alpha, double E, const std::vector<double>& sites);

/// Closed-form bound on the last recursion value.
double recursion_bound(const RealFunction& V, const RealFunction& alpha, double E, const std::vector<double>& sites);

struct Q2 {
  double k;
  double delta;
  double inf_alpha;
  RealFunction q2;            // nondecreasing, q2(-inf) = 0
  double limit;               // q2(+inf)
  RealFunction positive_rate; // k V'_+ + (2/inf alpha) alpha'_+ + (|x|+1)^{-1-delta}
};

/// Requires E_min > sup V, delta > 0, inf alpha > 0, and piecewise-polynomial V, alpha.
Q2 build_q2(const RealFunction& V, const RealFunction& alpha, double delta, double E_min);

struct WeightBundle {
  double E, E_min, delta, k, inf_alpha, sup_V;
  std::vector<double> sites;  // sites used by q1 (first N of the positive jump set)
  std::vector<double> all_sites;
  JumpRecursion recursion;
  double bound;               // closed-form bound on r_N
  RealFunction q1, q2, w;
  double q2_limit;
  BVMeasure<double> dw;
};

inline constexpr std::size_t all_sites = std::numeric_limits<std::size_t>::max();

WeightBundle build_weight(const RealFunction& V, const RealFunction& alpha, double E, double delta,
                          std::size_t N = all_sites, std::optional<double> E_min = std::nullopt);

struct Margin {
  double x;
  double lhs, rhs, margin;
  double scale;  // magnitude the margin is judged against
};

struct LowerBoundReport {
  std::vector<Margin> atoms_energy, atoms_alpha;      // first and second inequality, atomwise
  std::vector<Margin> density_energy, density_alpha;  // densitywise at grid points
  double tolerance = 1e-12;
  bool passed() const;
  /// Worst (smallest) margin of a list, relative to its scale.
  static const Margin* worst(const std::vector<Margin>& m);
  std::string summary() const;
};

/// Checks d(w(E - V)) >= w^A (E_min - V)^A (|x|+1)^{-1-delta} dx and
/// dw - (alpha^A)^{-1} w^A dalpha >= w^A (|x|+1)^{-1-delta} dx atomwise at every
/// jump of V, alpha, w and densitywise at the grid points (both one-sided values).
LowerBoundReport verify_lower_bounds(const WeightBundle& b, const RealFunction& V, const RealFunction& alpha,
                                     double E_min, const std::vector<double>& grid);

}  // namespace bvwave

#include <cstdint>
#include <random>

namespace bvwave {

/// Random potential and positive conductivity with at most max_jumps breakpoints in total.
std::pair<RealFunction, RealFunction> random_weight_problem(std::mt19937_64& rng, int max_jumps);

struct WeightCheckResult {
  int cases = 0;
  double max_A = 0.0, max_B = 0.0;
  int bound_failures = 0;
  int margin_failures = 0;
  double worst_relative_margin = 0.0;  // most negative margin/scale seen (0 if none negative)
  std::size_t atoms_checked = 0, densities_checked = 0;
  std::string first_failure;
  bool passed() const { return bound_failures == 0 && margin_failures == 0 && max_A < 1 && max_B < 1; }
};

/// Slab potential plus `media` random problems, each at E = sup V + offset for
/// every offset, checked on `grid_points` points of [-5, 5].
WeightCheckResult run_weight_checks(std::uint64_t seed, int media, const std::vector<double>& offsets, int grid_points);

}  // namespace bvwave
