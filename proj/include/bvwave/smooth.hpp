#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <initializer_list>
#include <memory>
#include <stdexcept>
#include <variant>

namespace bvwave {

/// Closed-form smooth function of one real variable: polynomials, powers of an
/// affine argument, exponentials, and their sums and products.  Used as the
/// restriction of a piecewise function to one interval.
template <class Scalar>
class Smooth {
 public:
  using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Smooth() : Smooth(Scalar(0)) {}
  Smooth(Scalar c) : node_(make(Poly{Coeffs::Constant(1, c)})) {}

  static Smooth polynomial(Coeffs c) {
    if (c.size() == 0) c = Coeffs::Zero(1);
    return Smooth(make(Poly{trim(std::move(c))}));
  }

  static Smooth polynomial(std::initializer_list<Scalar> c) {
    Coeffs v(Eigen::Index(c.size()));
    Eigen::Index i = 0;
    for (Scalar x : c) v(i++) = x;
    return polynomial(std::move(v));
  }

  /// scale * (shift + slope*x)^exponent; the base must stay positive where used.
  static Smooth power(double shift, double slope, double exponent, Scalar scale = Scalar(1)) {
    if (exponent == 0.0 || scale == Scalar(0)) return Smooth(scale);
    return Smooth(make(Power{shift, slope, exponent, scale}));
  }

  Smooth exp() const {
    if (is_constant()) return Smooth(std::exp(constant_value()));
    return Smooth(make(ExpNode{node_}));
  }

  Scalar operator()(double x) const { return eval(*node_, x); }

  bool is_polynomial() const { return std::holds_alternative<Poly>(node_->v); }
  const Coeffs& coefficients() const {
    if (!is_polynomial()) throw std::logic_error("piece is not a polynomial");
    return std::get<Poly>(node_->v).c;
  }
  bool is_constant() const { return is_polynomial() && coefficients().size() == 1; }
  bool is_zero() const { return is_constant() && coefficients()(0) == Scalar(0); }
  Scalar constant_value() const {
    if (!is_constant()) throw std::logic_error("piece is not constant");
    return coefficients()(0);
  }

  Smooth derivative() const { return Smooth(differentiate(node_)); }

  /// Antiderivative vanishing at x = 0; polynomial pieces only.
  Smooth antiderivative() const {
    const Coeffs& c = coefficients();
    Coeffs a = Coeffs::Zero(c.size() + 1);
    for (Eigen::Index n = 0; n < c.size(); ++n) a(n + 1) = c(n) / Scalar(double(n + 1));
    return polynomial(std::move(a));
  }

  /// x -> f(s*x).
  Smooth rescaled(double s) const { return Smooth(rescale(node_, s)); }

  friend Smooth operator+(const Smooth& a, const Smooth& b) {
    if (a.is_polynomial() && b.is_polynomial()) return polynomial(add(a.coefficients(), b.coefficients()));
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    return Smooth(make(SumNode{a.node_, b.node_}));
  }
  friend Smooth operator*(const Smooth& a, const Smooth& b) {
    if (a.is_polynomial() && b.is_polynomial()) return polynomial(multiply(a.coefficients(), b.coefficients()));
    if (a.is_zero() || b.is_zero()) return Smooth();
    if (a.is_constant() && a.constant_value() == Scalar(1)) return b;
    if (b.is_constant() && b.constant_value() == Scalar(1)) return a;
    return Smooth(make(ProductNode{a.node_, b.node_}));
  }
  friend Smooth operator-(const Smooth& a) { return Smooth(Scalar(-1)) * a; }
  friend Smooth operator-(const Smooth& a, const Smooth& b) { return a + (-b); }

 private:
  struct Node;
  using Ptr = std::shared_ptr<const Node>;
  struct Poly { Coeffs c; };
  struct Power { double shift, slope, exponent; Scalar scale; };
  struct ExpNode { Ptr arg; };
  struct SumNode { Ptr a, b; };
  struct ProductNode { Ptr a, b; };
  struct Node { std::variant<Poly, Power, ExpNode, SumNode, ProductNode> v; };

  explicit Smooth(Ptr p) : node_(std::move(p)) {}

  template <class T>
  static Ptr make(T t) { return std::make_shared<const Node>(Node{std::move(t)}); }

  static Coeffs trim(Coeffs c) {
    Eigen::Index n = c.size();
    while (n > 1 && c(n - 1) == Scalar(0)) --n;
    return c.head(n);
  }
  static Coeffs add(const Coeffs& a, const Coeffs& b) {
    Coeffs r = Coeffs::Zero(std::max(a.size(), b.size()));
    r.head(a.size()) += a;
    r.head(b.size()) += b;
    return r;
  }
  static Coeffs multiply(const Coeffs& a, const Coeffs& b) {
    Coeffs r = Coeffs::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      for (Eigen::Index j = 0; j < b.size(); ++j) r(i + j) += a(i) * b(j);
    return r;
  }

  static Scalar eval(const Node& n, double x) {
    return std::visit(
        [x](const auto& t) -> Scalar {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, Poly>) {
            Scalar acc(0);
            for (Eigen::Index i = t.c.size(); i-- > 0;) acc = acc * x + t.c(i);
            return acc;
          } else if constexpr (std::is_same_v<T, Power>) {
            return t.scale * std::pow(t.shift + t.slope * x, t.exponent);
          } else if constexpr (std::is_same_v<T, ExpNode>) {
            return std::exp(eval(*t.arg, x));
          } else if constexpr (std::is_same_v<T, SumNode>) {
            return eval(*t.a, x) + eval(*t.b, x);
          } else {
            return eval(*t.a, x) * eval(*t.b, x);
          }
        },
        n.v);
  }

  static Ptr differentiate(const Ptr& p) {
    return std::visit(
        [&p](const auto& t) -> Ptr {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, Poly>) {
            if (t.c.size() == 1) return Smooth().node_;
            Coeffs d(t.c.size() - 1);
            for (Eigen::Index n = 1; n < t.c.size(); ++n) d(n - 1) = Scalar(double(n)) * t.c(n);
            return polynomial(std::move(d)).node_;
          } else if constexpr (std::is_same_v<T, Power>) {
            return power(t.shift, t.slope, t.exponent - 1.0, t.scale * t.exponent * t.slope).node_;
          } else if constexpr (std::is_same_v<T, ExpNode>) {
            return (Smooth(p) * Smooth(differentiate(t.arg))).node_;
          } else if constexpr (std::is_same_v<T, SumNode>) {
            return (Smooth(differentiate(t.a)) + Smooth(differentiate(t.b))).node_;
          } else {
            Smooth a(t.a), b(t.b);
            return (Smooth(differentiate(t.a)) * b + a * Smooth(differentiate(t.b))).node_;
          }
        },
        p->v);
  }

  static Ptr rescale(const Ptr& p, double s) {
    return std::visit(
        [s](const auto& t) -> Ptr {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, Poly>) {
            Coeffs c = t.c;
            double f = 1.0;
            for (Eigen::Index n = 0; n < c.size(); ++n, f *= s) c(n) *= f;
            return polynomial(std::move(c)).node_;
          } else if constexpr (std::is_same_v<T, Power>) {
            return power(t.shift, t.slope * s, t.exponent, t.scale).node_;
          } else if constexpr (std::is_same_v<T, ExpNode>) {
            return make(ExpNode{rescale(t.arg, s)});
          } else if constexpr (std::is_same_v<T, SumNode>) {
            return make(SumNode{rescale(t.a, s), rescale(t.b, s)});
          } else {
            return make(ProductNode{rescale(t.a, s), rescale(t.b, s)});
          }
        },
        p->v);
  }

  Ptr node_;
};

}  // namespace bvwave
