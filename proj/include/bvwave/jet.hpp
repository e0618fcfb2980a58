#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>

namespace bvwave {

/// Forward-mode dual number over the complex field: value and derivative with
/// respect to one complex variable.  Holomorphic operations only.
struct Jet {
  using cd = std::complex<double>;
  cd v{0.0}, d{0.0};

  Jet() = default;
  Jet(double x) : v(x) {}
  Jet(cd x, cd dx = 0.0) : v(x), d(dx) {}
  static Jet variable(cd x) { return {x, 1.0}; }

  Jet& operator+=(const Jet& o) { v += o.v; d += o.d; return *this; }
  Jet& operator-=(const Jet& o) { v -= o.v; d -= o.d; return *this; }
  Jet& operator*=(const Jet& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Jet& operator/=(const Jet& o) { d = (d * o.v - v * o.d) / (o.v * o.v); v /= o.v; return *this; }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }
  friend Jet operator-(const Jet& a) { return {-a.v, -a.d}; }
  friend bool operator==(const Jet& a, const Jet& b) { return a.v == b.v && a.d == b.d; }
  friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }
};

inline Jet exp(const Jet& a) { const auto e = std::exp(a.v); return {e, e * a.d}; }
inline Jet sin(const Jet& a) { return {std::sin(a.v), std::cos(a.v) * a.d}; }
inline Jet cos(const Jet& a) { return {std::cos(a.v), -std::sin(a.v) * a.d}; }

inline std::complex<double> value_of(const std::complex<double>& z) { return z; }
inline std::complex<double> value_of(const Jet& z) { return z.v; }

/// sin(z)/z, entire, with a series near 0.
template <class T>
T sinc(const T& z) {
  using std::sin;
  if (std::abs(value_of(z)) < 1e-3) {
    const T z2 = z * z;
    return T(1.0) - z2 * (T(1.0 / 6) - z2 * (T(1.0 / 120) - z2 * T(1.0 / 5040)));
  }
  return sin(z) / z;
}

}  // namespace bvwave

namespace Eigen {
template <>
struct NumTraits<bvwave::Jet> : GenericNumTraits<std::complex<double>> {
  using Real = double;
  using NonInteger = bvwave::Jet;
  using Literal = bvwave::Jet;
  using Nested = bvwave::Jet;
  enum { IsComplex = 1, IsInteger = 0, IsSigned = 1, RequireInitialization = 1, ReadCost = 4, AddCost = 4, MulCost = 12 };
};
}  // namespace Eigen
