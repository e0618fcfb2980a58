#pragma once

#include "bvwave/measure.hpp"

#include <cstdint>
#include <random>

namespace bvwave {

/// Random real piecewise polynomial with constant tails, breakpoints in
/// [-lo_hi, lo_hi] on a coarse lattice so pairs share some breakpoints.
PiecewiseFunction<double> random_piecewise(std::mt19937_64& rng, int max_breaks = 6, int max_degree = 3,
                                           double half_width = 3.0);

/// Continuous test function vanishing outside (a, b), with interior kinks.
PiecewiseFunction<double> random_test_function(std::mt19937_64& rng, double a, double b);

/// Worst errors over the randomized identities of the BV calculus.
struct BVCheckResult {
  int pairs = 0;
  double ftc = 0.0;      // int_(a,b] df against f^R(b) - f^R(a)
  double product = 0.0;  // int_(a,b] d(fg) against (fg)^R(b) - (fg)^R(a)
  double product_vs_direct = 0.0;  // product rule measure against d(fg) atom/density-wise
  double chain = 0.0;    // int_(a,b] d(e^f) against e^{f^R(b)} - e^{f^R(a)}
  double chain_atoms = 0.0;  // exp_measure atoms against jumps of e^f
  double ibp = 0.0;      // integration-by-parts residual
  double worst() const;
};

BVCheckResult run_bv_checks(std::uint64_t seed, int pairs);

}  // namespace bvwave
