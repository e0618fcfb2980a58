#include "bvwave/medium.hpp"

#include <cmath>
#include <stdexcept>

namespace bvwave {

namespace {

double tail_value(const PiecewiseFunction<double>& f, const char* name) {
  if (!f.is_piecewise_polynomial()) throw std::invalid_argument(std::string(name) + " must be piecewise polynomial");
  if (!f.left_tail().is_constant() || !f.right_tail().is_constant() ||
      f.left_tail().constant_value() != f.right_tail().constant_value())
    throw std::invalid_argument(std::string(name) + " must take the same constant value on both tails");
  return f.left_tail().constant_value();
}

}  // namespace

Medium::Medium(PiecewiseFunction<double> alpha, PiecewiseFunction<double> beta)
    : alpha_(std::move(alpha).simplified()), beta_(std::move(beta).simplified()) {
  alpha0_ = tail_value(alpha_, "alpha");
  beta0_ = tail_value(beta_, "beta");
  std::tie(sup_alpha_, inf_alpha_) = bounds(alpha_);
  std::tie(sup_beta_, inf_beta_) = bounds(beta_);
  if (!(inf_alpha_ > 0) || !(inf_beta_ > 0)) throw std::invalid_argument("alpha and beta must be bounded below by a positive constant");
  R0_ = 0.0;
  for (double x : interfaces()) R0_ = std::max(R0_, std::abs(x));
}

std::vector<double> Medium::interfaces() const { return PiecewiseFunction<double>::merge(alpha_.breakpoints(), beta_.breakpoints()); }

double Medium::c_min() const { return std::sqrt(inf_alpha_ / sup_beta_); }
double Medium::c_max() const { return std::sqrt(sup_alpha_ / inf_beta_); }

Medium piecewise_constant_approximation(const Medium& m, double max_width) {
  if (m.piecewise_constant()) return m;
  if (!(max_width > 0)) throw std::invalid_argument("max_width must be positive");
  auto flatten = [&](const PiecewiseFunction<double>& f) {
    const auto& br = f.breakpoints();
    std::vector<double> cuts;
    std::vector<double> values{f.left_tail().constant_value()};
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
      const double a = br[i], b = br[i + 1];
      const int n = std::max(1, int(std::ceil((b - a) / max_width)));
      for (int s = 0; s < n; ++s) {
        const double lo = a + (b - a) * s / n, hi = a + (b - a) * (s + 1) / n;
        cuts.push_back(lo);
        values.push_back(integrate(f, lo, hi) / (hi - lo));
      }
    }
    if (!br.empty()) cuts.push_back(br.back());
    values.push_back(f.right_tail().constant_value());
    if (br.empty()) values.pop_back();
    return PiecewiseFunction<double>::piecewise_constant(cuts, values);
  };
  return Medium(flatten(m.alpha()), flatten(m.beta()));
}

}  // namespace bvwave
