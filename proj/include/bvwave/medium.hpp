#pragma once

#include "bvwave/piecewise.hpp"

#include <vector>

namespace bvwave {

/// Coefficients (alpha, beta) of beta w_tt = (alpha w_x)_x: positive, constant
/// (alpha0, beta0) outside [-R0, R0].
class Medium {
 public:
  Medium(PiecewiseFunction<double> alpha, PiecewiseFunction<double> beta);

  const PiecewiseFunction<double>& alpha() const { return alpha_; }
  const PiecewiseFunction<double>& beta() const { return beta_; }
  double alpha0() const { return alpha0_; }
  double beta0() const { return beta0_; }
  /// Smallest R with both coefficients constant on |x| > R.
  double R0() const { return R0_; }
  double inf_alpha() const { return inf_alpha_; }
  double sup_alpha() const { return sup_alpha_; }
  double inf_beta() const { return inf_beta_; }
  double sup_beta() const { return sup_beta_; }
  bool piecewise_constant() const { return alpha_.is_piecewise_constant() && beta_.is_piecewise_constant(); }
  bool normalized() const { return alpha0_ == 1.0 && beta0_ == 1.0; }
  /// Sorted union of the coefficient breakpoints.
  std::vector<double> interfaces() const;
  /// Slowest and fastest wave speeds sqrt(alpha/beta) bounds.
  double c_min() const;
  double c_max() const;

 private:
  PiecewiseFunction<double> alpha_, beta_;
  double alpha0_, beta0_, R0_;
  double inf_alpha_, sup_alpha_, inf_beta_, sup_beta_;
};

/// Piecewise-constant medium with cell averages on subintervals no wider than
/// max_width; piecewise-constant media are returned unchanged.
Medium piecewise_constant_approximation(const Medium& m, double max_width);

}  // namespace bvwave
