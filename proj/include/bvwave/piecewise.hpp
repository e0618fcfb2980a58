#pragma once

#include "bvwave/quadrature.hpp"
#include "bvwave/smooth.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace bvwave {

template <class Scalar>
struct Limits {
  Scalar left, right, average;
};

/// Function on the real line with finitely many breakpoints and a closed-form
/// smooth piece on each open interval.  pieces[0] lives on (-inf, b_0),
/// pieces[i] on (b_{i-1}, b_i), pieces.back() on (b_last, inf).  Values at the
/// breakpoints are not stored: functions agreeing a.e. compare equal.
template <class Scalar>
class PiecewiseFunction {
 public:
  using Piece = Smooth<Scalar>;
  using Coeffs = typename Piece::Coeffs;

  PiecewiseFunction() : pieces_{Piece()} {}
  PiecewiseFunction(Scalar c) : pieces_{Piece(c)} {}
  PiecewiseFunction(std::vector<double> breakpoints, std::vector<Piece> pieces)
      : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.size() != breaks_.size() + 1)
      throw std::invalid_argument("piecewise function needs one more piece than breakpoints");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i] > breaks_[i - 1])) throw std::invalid_argument("breakpoints must be strictly increasing");
  }

  static PiecewiseFunction step(double x, Scalar left, Scalar right) { return {{x}, {Piece(left), Piece(right)}}; }
  static PiecewiseFunction indicator(double a, double b, Scalar inside = Scalar(1), Scalar outside = Scalar(0)) {
    return {{a, b}, {Piece(outside), Piece(inside), Piece(outside)}};
  }
  /// Constant values on each interval, tails included (values.size() == breaks.size() + 1).
  static PiecewiseFunction piecewise_constant(std::vector<double> breaks, const std::vector<Scalar>& values) {
    std::vector<Piece> p(values.begin(), values.end());
    return {std::move(breaks), std::move(p)};
  }

  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const Piece& left_tail() const { return pieces_.front(); }
  const Piece& right_tail() const { return pieces_.back(); }

  /// Indices of the pieces just left and right of x (equal away from breakpoints).
  std::pair<std::size_t, std::size_t> pieces_at(double x) const {
    auto it = std::lower_bound(breaks_.begin(), breaks_.end(), x);
    const std::size_t j = std::size_t(it - breaks_.begin());
    if (it != breaks_.end() && *it == x) return {j, j + 1};
    return {j, j};
  }

  Scalar left_limit(double x) const { return pieces_[pieces_at(x).first](x); }
  Scalar right_limit(double x) const { return pieces_[pieces_at(x).second](x); }
  Limits<Scalar> limits(double x) const {
    const auto [l, r] = pieces_at(x);
    const Scalar a = pieces_[l](x), b = pieces_[r](x);
    return {a, b, (a + b) / Scalar(2)};
  }
  /// The average of the one-sided limits (equal to f(x) off the breakpoints).
  Scalar operator()(double x) const { return limits(x).average; }
  Scalar jump(double x) const {
    const auto [l, r] = pieces_at(x);
    return pieces_[r](x) - pieces_[l](x);
  }

  bool is_piecewise_polynomial() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.is_polynomial(); });
  }
  bool is_piecewise_constant() const {
    return std::all_of(pieces_.begin(), pieces_.end(), [](const Piece& p) { return p.is_constant(); });
  }

  /// Same function with extra breakpoints inserted.
  PiecewiseFunction refined(const std::vector<double>& extra) const {
    std::vector<double> b = merge(breaks_, extra);
    return {b, pieces_on(b)};
  }

  /// The piece in force on each interval of a finer partition.
  std::vector<Piece> pieces_on(const std::vector<double>& finer) const {
    std::vector<Piece> out;
    out.reserve(finer.size() + 1);
    for (std::size_t i = 0; i <= finer.size(); ++i) out.push_back(pieces_[interval_index(finer, i)]);
    return out;
  }

  /// Pointwise derivative of the pieces (the absolutely continuous density).
  PiecewiseFunction derivative() const { return map([](const Piece& p) { return p.derivative(); }); }
  PiecewiseFunction exp() const { return map([](const Piece& p) { return p.exp(); }); }
  /// x -> f(s*x), s > 0.
  PiecewiseFunction rescaled(double s) const {
    if (!(s > 0)) throw std::invalid_argument("rescaling factor must be positive");
    std::vector<double> b(breaks_.size());
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = breaks_[i] / s;
    std::vector<Piece> p;
    for (const auto& q : pieces_) p.push_back(q.rescaled(s));
    return {std::move(b), std::move(p)};
  }

  template <class F>
  PiecewiseFunction map(F&& f) const {
    std::vector<Piece> p;
    p.reserve(pieces_.size());
    for (const auto& q : pieces_) p.push_back(f(q));
    return {breaks_, std::move(p)};
  }

  /// Drops breakpoints across which the function is the same polynomial.
  PiecewiseFunction simplified() const {
    std::vector<double> b;
    std::vector<Piece> p{pieces_.front()};
    for (std::size_t i = 0; i < breaks_.size(); ++i) {
      const Piece& next = pieces_[i + 1];
      if (p.back().is_polynomial() && next.is_polynomial() && same(p.back().coefficients(), next.coefficients())) continue;
      b.push_back(breaks_[i]);
      p.push_back(next);
    }
    return {std::move(b), std::move(p)};
  }

  template <class F>
  static PiecewiseFunction combine(const PiecewiseFunction& f, const PiecewiseFunction& g, F&& op) {
    std::vector<double> b = merge(f.breaks_, g.breaks_);
    std::vector<Piece> pf = f.pieces_on(b), pg = g.pieces_on(b), out;
    out.reserve(pf.size());
    for (std::size_t i = 0; i < pf.size(); ++i) out.push_back(op(pf[i], pg[i]));
    return {std::move(b), std::move(out)};
  }

  friend PiecewiseFunction operator+(const PiecewiseFunction& f, const PiecewiseFunction& g) {
    return combine(f, g, [](const Piece& a, const Piece& b) { return a + b; });
  }
  friend PiecewiseFunction operator-(const PiecewiseFunction& f, const PiecewiseFunction& g) {
    return combine(f, g, [](const Piece& a, const Piece& b) { return a - b; });
  }
  friend PiecewiseFunction operator*(const PiecewiseFunction& f, const PiecewiseFunction& g) {
    return combine(f, g, [](const Piece& a, const Piece& b) { return a * b; });
  }
  friend PiecewiseFunction operator-(const PiecewiseFunction& f) { return Scalar(-1) * f; }
  friend PiecewiseFunction operator*(Scalar c, const PiecewiseFunction& f) {
    return f.map([c](const Piece& p) { return Piece(c) * p; });
  }

  static std::vector<double> merge(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out;
    out.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  // Piece of *this covering interval i of the partition `finer` (a superset of breaks_).
  std::size_t interval_index(const std::vector<double>& finer, std::size_t i) const {
    if (finer.empty()) return 0;
    const double x = i == 0 ? finer.front() - 1.0 : i == finer.size() ? finer.back() + 1.0 : 0.5 * (finer[i - 1] + finer[i]);
    return std::size_t(std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
  }
  static bool same(const Coeffs& a, const Coeffs& b) { return a.size() == b.size() && a == b; }

  std::vector<double> breaks_;
  std::vector<Piece> pieces_;
};

/// Lebesgue integral of f over [a, b]: exact for polynomial pieces, adaptive
/// Gauss-Legendre otherwise.
template <class Scalar>
Scalar integrate(const PiecewiseFunction<Scalar>& f, double a, double b) {
  if (!(a < b)) return Scalar(0);
  Scalar total(0);
  const auto& br = f.breakpoints();
  std::vector<double> cuts{a};
  for (double x : br)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const auto& piece = f.pieces()[f.pieces_at(0.5 * (lo + hi)).first];
    if (piece.is_polynomial()) {
      const auto F = piece.antiderivative();
      total += F(hi) - F(lo);
    } else {
      total += integrate_adaptive<Scalar>(piece, lo, hi);
    }
  }
  return total;
}

/// Sum of the absolute jumps plus the integral of |f'| over [a, b], for real
/// piecewise polynomials.
double total_variation(const PiecewiseFunction<double>& f, double a, double b);

/// Real roots of a real polynomial strictly inside (a, b), ascending.
std::vector<double> real_roots(const Eigen::VectorXd& coeffs, double a, double b);

/// sup and inf of a real piecewise polynomial with constant tails.
std::pair<double, double> bounds(const PiecewiseFunction<double>& f);

}  // namespace bvwave
