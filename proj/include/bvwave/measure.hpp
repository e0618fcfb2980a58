#pragma once

#include "bvwave/piecewise.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace bvwave {

template <class Scalar>
struct Atom {
  double x;
  Scalar mass;
};

/// Finite sum of point masses plus an absolutely continuous part with a
/// piecewise density.
template <class Scalar>
class BVMeasure {
 public:
  BVMeasure() = default;
  BVMeasure(std::vector<Atom<Scalar>> atoms, PiecewiseFunction<Scalar> density) : density_(std::move(density)) {
    std::sort(atoms.begin(), atoms.end(), [](const Atom<Scalar>& a, const Atom<Scalar>& b) { return a.x < b.x; });
    for (const auto& a : atoms) {
      if (!atoms_.empty() && atoms_.back().x == a.x)
        atoms_.back().mass += a.mass;
      else
        atoms_.push_back(a);
    }
    atoms_.erase(std::remove_if(atoms_.begin(), atoms_.end(), [](const Atom<Scalar>& a) { return a.mass == Scalar(0); }),
                 atoms_.end());
  }

  const std::vector<Atom<Scalar>>& atoms() const { return atoms_; }
  const PiecewiseFunction<Scalar>& density() const { return density_; }

  Scalar mass_at(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x, [](const Atom<Scalar>& a, double v) { return a.x < v; });
    return it != atoms_.end() && it->x == x ? it->mass : Scalar(0);
  }

  friend BVMeasure operator+(const BVMeasure& a, const BVMeasure& b) {
    std::vector<Atom<Scalar>> at = a.atoms_;
    at.insert(at.end(), b.atoms_.begin(), b.atoms_.end());
    return {std::move(at), a.density_ + b.density_};
  }
  friend BVMeasure operator*(Scalar c, const BVMeasure& m) {
    std::vector<Atom<Scalar>> at = m.atoms_;
    for (auto& a : at) a.mass *= c;
    return {std::move(at), c * m.density_};
  }
  friend BVMeasure operator-(const BVMeasure& a, const BVMeasure& b) { return a + Scalar(-1) * b; }

 private:
  std::vector<Atom<Scalar>> atoms_;
  PiecewiseFunction<Scalar> density_;
};

template <class Scalar>
Limits<Scalar> eval_limits(const PiecewiseFunction<Scalar>& f, double x) {
  return f.limits(x);
}

/// df: jumps f^R - f^L as atoms, piecewise derivative as density.
template <class Scalar>
BVMeasure<Scalar> derivative_measure(const PiecewiseFunction<Scalar>& f) {
  std::vector<Atom<Scalar>> atoms;
  for (double x : f.breakpoints()) atoms.push_back({x, f.jump(x)});
  return {std::move(atoms), f.derivative()};
}

/// mu over the interval from a to b, endpoints included per the flags.
template <class Scalar>
Scalar integrate_measure(const BVMeasure<Scalar>& mu, double a, double b, bool include_left = false,
                         bool include_right = true) {
  if (!(a < b)) throw std::invalid_argument("integrate_measure needs a < b");
  Scalar total = integrate(mu.density(), a, b);
  for (const auto& at : mu.atoms())
    if ((at.x > a && at.x < b) || (include_left && at.x == a) || (include_right && at.x == b)) total += at.mass;
  return total;
}

/// h^A * mu: atoms weighted by the average of h, density multiplied by h.
template <class Scalar>
BVMeasure<Scalar> weighted_by_average(const PiecewiseFunction<Scalar>& h, const BVMeasure<Scalar>& mu) {
  std::vector<Atom<Scalar>> atoms = mu.atoms();
  for (auto& a : atoms) a.mass *= h(a.x);
  return {std::move(atoms), h * mu.density()};
}

/// f^A dg + g^A df with the derivative measures supplied by the caller.
template <class Scalar>
BVMeasure<Scalar> product_rule(const PiecewiseFunction<Scalar>& f, const BVMeasure<Scalar>& df,
                               const PiecewiseFunction<Scalar>& g, const BVMeasure<Scalar>& dg) {
  return weighted_by_average(f, dg) + weighted_by_average(g, df);
}

template <class Scalar>
BVMeasure<Scalar> product_measure(const PiecewiseFunction<Scalar>& f, const PiecewiseFunction<Scalar>& g) {
  return product_rule(f, derivative_measure(f), g, derivative_measure(g));
}

/// The pure step function carrying the jumps of f (zero on the left tail).
template <class Scalar>
PiecewiseFunction<Scalar> jump_part(const PiecewiseFunction<Scalar>& f) {
  std::vector<Scalar> values{Scalar(0)};
  for (double x : f.breakpoints()) values.push_back(values.back() + f.jump(x));
  return PiecewiseFunction<Scalar>::piecewise_constant(f.breakpoints(), values);
}

/// d(e^f) for real f, through e^f = e^{f_cont} e^{f_jump}: the continuous
/// chain rule for the first factor, the jump chain rule for the second, and
/// the product rule to combine them.
inline BVMeasure<double> exp_measure(const PiecewiseFunction<double>& f) {
  const PiecewiseFunction<double> fj = jump_part(f);
  const PiecewiseFunction<double> fc = (f - fj).simplified();
  const PiecewiseFunction<double> ec = fc.exp();
  const BVMeasure<double> dec({}, fc.map([](const Smooth<double>& p) { return p.exp() * p.derivative(); }));
  const PiecewiseFunction<double> ej = fj.exp();
  std::vector<Atom<double>> atoms;
  const auto& br = fj.breakpoints();
  for (std::size_t k = 0; k < br.size(); ++k)
    atoms.push_back({br[k], ej.pieces()[k + 1].constant_value() - ej.pieces()[k].constant_value()});
  const BVMeasure<double> dej(std::move(atoms), PiecewiseFunction<double>());
  return product_rule(ec, dec, ej, dej);
}

/// |int_(a,b] phi df + int_(a,b] phi' f dx| for phi continuous, phi(a) = phi(b) = 0.
template <class Scalar>
double ibp_residual(const PiecewiseFunction<Scalar>& f, const PiecewiseFunction<Scalar>& phi, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("ibp_residual needs a < b");
  double scale = 1.0;
  for (double x : phi.breakpoints()) scale = std::max(scale, std::abs(phi.left_limit(x)));
  const double tol = 1e-12 * scale;
  if (std::abs(phi.left_limit(a)) > tol || std::abs(phi.right_limit(a)) > tol || std::abs(phi.left_limit(b)) > tol ||
      std::abs(phi.right_limit(b)) > tol)
    throw std::invalid_argument("test function must vanish at both endpoints");
  for (double x : phi.breakpoints())
    if (x > a && x < b && std::abs(phi.jump(x)) > tol) throw std::invalid_argument("test function must be continuous");
  const BVMeasure<Scalar> df = derivative_measure(f);
  Scalar lhs = integrate(phi * df.density(), a, b);
  for (const auto& at : df.atoms())
    if (at.x > a && at.x <= b) lhs += phi(at.x) * at.mass;
  const Scalar rhs = integrate(phi.derivative() * f, a, b);
  return std::abs(lhs + rhs);
}

}  // namespace bvwave
