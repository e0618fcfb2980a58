#pragma once

#include "bvwave/jet.hpp"
#include "bvwave/linalg.hpp"
#include "bvwave/medium.hpp"
#include "bvwave/quadrature.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace bvwave {

using cd = std::complex<double>;

/// Piecewise-constant coefficients of -(alpha u')' - rho u = 0 described by the
/// local wavenumber k_j (rho_j = alpha_j k_j^2) on each layer.  Layer 0 is
/// (-inf, interfaces[0]), the last layer (interfaces.back(), inf).
template <class T>
struct LayerStack {
  std::vector<double> interfaces;
  std::vector<double> alpha;
  std::vector<T> k;

  std::size_t layer_of(double x) const {
    return std::size_t(std::lower_bound(interfaces.begin(), interfaces.end(), x) - interfaces.begin());
  }
};

template <class T>
using Cauchy = Eigen::Matrix<T, 2, 1>;

/// Map of the Cauchy vector (u, alpha u') across distance d inside one layer.
/// Entries are entire in k^2, so no branch enters here.
template <class T>
Eigen::Matrix<T, 2, 2> layer_propagator(const T& k, double alpha, double d) {
  using std::cos;
  const T kd = k * T(d);
  const T c = cos(kd), s = T(d) * sinc(kd);  // sin(kd)/k
  Eigen::Matrix<T, 2, 2> P;
  P(0, 0) = c;
  P(0, 1) = s / T(alpha);
  P(1, 0) = -T(alpha) * k * k * s;
  P(1, 1) = c;
  return P;
}

/// The outgoing solutions: u_+ = e^{ikx} right of the last interface, u_- =
/// e^{-ikx} left of the first, continued through the layers with u and
/// alpha u' continuous.
template <class T>
class OutgoingPair {
 public:
  explicit OutgoingPair(LayerStack<T> s) : s_(std::move(s)) {
    const std::size_t n = s_.interfaces.size();
    if (s_.alpha.size() != n + 1 || s_.k.size() != n + 1) throw std::invalid_argument("layer data size mismatch");
    plus_.resize(n);
    minus_.resize(n);
    if (n == 0) return;
    plus_[n - 1] = tail(n, s_.interfaces[n - 1], +1);
    for (std::size_t j = n - 1; j-- > 0;)
      plus_[j] = layer_propagator(s_.k[j + 1], s_.alpha[j + 1], s_.interfaces[j] - s_.interfaces[j + 1]) * plus_[j + 1];
    minus_[0] = tail(0, s_.interfaces[0], -1);
    for (std::size_t j = 1; j < n; ++j)
      minus_[j] = layer_propagator(s_.k[j], s_.alpha[j], s_.interfaces[j] - s_.interfaces[j - 1]) * minus_[j - 1];
  }

  const LayerStack<T>& layers() const { return s_; }

  Cauchy<T> plus(double x) const {
    const std::size_t n = s_.interfaces.size(), j = s_.layer_of(x);
    if (j == n) return tail(n, x, +1);
    return layer_propagator(s_.k[j], s_.alpha[j], x - s_.interfaces[j]) * plus_[j];
  }
  Cauchy<T> minus(double x) const {
    const std::size_t j = s_.layer_of(x);
    if (j == 0) return tail(0, x, -1);
    return layer_propagator(s_.k[j], s_.alpha[j], x - s_.interfaces[j - 1]) * minus_[j - 1];
  }

  /// alpha (u_- u_+' - u_-' u_+) evaluated at x.
  T wronskian_at(double x) const {
    const Cauchy<T> m = minus(x), p = plus(x);
    return m(0) * p(1) - m(1) * p(0);
  }
  T wronskian() const { return wronskian_at(s_.interfaces.empty() ? 0.0 : s_.interfaces.front()); }

 private:
  // e^{sign i k x} on layer j with its flux.
  Cauchy<T> tail(std::size_t j, double x, int sign) const {
    using std::exp;
    const T ik = T(cd(0.0, sign)) * s_.k[j];
    const T e = exp(ik * T(x));
    return Cauchy<T>(e, T(s_.alpha[j]) * ik * e);
  }

  LayerStack<T> s_;
  std::vector<Cauchy<T>> plus_, minus_;
};

/// Layers of -(alpha u')' - lambda^2 beta u: k_j = lambda sqrt(beta_j/alpha_j).
template <class T>
LayerStack<T> wave_layers(const Medium& m, const T& lambda) {
  if (!m.piecewise_constant()) throw std::invalid_argument("exact solver needs a piecewise-constant medium");
  LayerStack<T> s;
  s.interfaces = m.interfaces();
  const auto pa = m.alpha().pieces_on(s.interfaces), pb = m.beta().pieces_on(s.interfaces);
  for (std::size_t j = 0; j < pa.size(); ++j) {
    const double a = pa[j].constant_value(), b = pb[j].constant_value();
    s.alpha.push_back(a);
    s.k.push_back(lambda * T(std::sqrt(b / a)));
  }
  return s;
}

/// Layers of -h^2 (alpha u')' + (V - E - i eps) u: k_j = sqrt((E + i eps - V_j)/alpha_j)/h,
/// principal branch (outgoing for V_j < E, decaying otherwise).
LayerStack<cd> semiclassical_layers(const PiecewiseFunction<double>& alpha, const PiecewiseFunction<double>& V, double E,
                                    double eps, double h);

struct TransferState {
  Eigen::Matrix2cd matrix;
  double from, to;
  cd lambda;
};

/// Transfer matrix of the Cauchy vector from `from` to `to`.
TransferState transfer(const Medium& m, cd lambda, double from, double to);

std::vector<cd> piece_wavenumbers(const Medium& m, cd lambda);
OutgoingPair<cd> outgoing_solutions(const Medium& m, cd lambda);
cd wronskian(const Medium& m, cd lambda);

/// Reflection and transmission read from u_+ = t^{-1}(e^{ik_L x} + r e^{-ik_L x}) on the left tail.
struct Scattering {
  cd r, t;
};
Scattering scattering_coefficients(const Medium& m, double lambda);

class NearResonance : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws NearResonance when |W| < 1e-12 max(1, |lambda|).
void check_invertible(cd W, cd lambda);

/// G(x, y) = -u_-(min) u_+(max) / W, the kernel of (-(alpha u')' - rho)^{-1}.
cd greens_kernel(const OutgoingPair<cd>& sol, cd W, double x, double y);

struct GreensOptions {
  int order = 16;
  double points_per_wavelength = 24;
  double max_panel = 0.25;
};

/// u = R(lambda) f = int G(x, y) f(y) beta(y) dy at the requested points, for f
/// supported in [a, b] (smooth between f_breaks).
Eigen::VectorXcd greens_apply(const Medium& m, cd lambda, const std::function<cd(double)>& f, double a, double b,
                              const std::vector<double>& points, const std::vector<double>& f_breaks = {},
                              const GreensOptions& opt = {});

/// Nystrom operator s_n G(x_n, x_m) s_m applied in O(N) through the
/// rank-one structure of G on either side of the diagonal.
class SemiseparableKernel {
 public:
  SemiseparableKernel(const OutgoingPair<cd>& sol, cd W, const Eigen::VectorXd& nodes, Eigen::VectorXcd scale);
  Eigen::Index size() const { return left_.size(); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& v) const;
  Eigen::MatrixXcd dense() const;

 private:
  Eigen::VectorXcd left_, right_, scale_;  // u_-, u_+ at nodes
  cd factor_;
};

/// C^1 cutoff: 1 on [-plateau, plateau], cubic ramps down to 0 at +-support.
PiecewiseFunction<double> plateau_cutoff(double plateau, double support);

struct NormOptions {
  int order = 16;
  double points_per_wavelength = 24;
  double max_panel = 0.5;
  double rel_tol = 1e-8;
};

struct NormEstimate {
  double norm;
  Eigen::Index nodes;
  int iterations;
  bool converged;
};

/// ||chi R(lambda) chi|| on the beta-weighted space by Nystrom on composite
/// Gauss-Legendre panels aligned to interfaces and the breakpoints of chi.
NormEstimate cutoff_resolvent_norm(const Medium& m, cd lambda, const PiecewiseFunction<double>& chi,
                                   const NormOptions& opt = {});

struct SemiclassicalOptions {
  int order = 16;
  double points_per_wavelength = 24;
  double max_panel = 0.5;
  double half_width = 40.0;  // weighted norm evaluated on [-L, L]
  double rel_tol = 1e-8;
};

/// ||(|x|+1)^{-(1+delta)/2} (P(h) - i eps)^{-1} (|x|+1)^{-(1+delta)/2}|| in L^2.
NormEstimate semiclassical_norm(const PiecewiseFunction<double>& alpha, const PiecewiseFunction<double>& V, double E,
                                double delta, double h, double eps, const SemiclassicalOptions& opt = {});

struct SemiclassicalRow {
  double h, eps, norm, h_times_norm;
};
std::vector<SemiclassicalRow> semiclassical_sweep(const PiecewiseFunction<double>& alpha, const PiecewiseFunction<double>& V,
                                                  double E, double delta, const std::vector<double>& h_list,
                                                  const std::vector<double>& eps_list, const SemiclassicalOptions& opt = {});

struct ResolventRow {
  double re_lambda, im_lambda, norm, norm_times_relambda;
};
std::vector<ResolventRow> resolvent_sweep(const Medium& m, const std::vector<double>& re_list,
                                          const std::vector<double>& im_list, const PiecewiseFunction<double>& chi,
                                          const NormOptions& opt = {});

/// Wave problem at lambda rewritten as P(h) with h = 1/|Re lambda|, V = 1 - beta, E = 1.
struct SemiclassicalForm {
  double h;
  PiecewiseFunction<double> V;
  double E;
  double imag_squared;  // (Im lambda)^2 / (Re lambda)^2
  double imag_linear;   // 2 Im lambda / Re lambda
};
SemiclassicalForm rescale_wave_to_semiclassical(const Medium& m, cd lambda);

/// Worker count for parameter sweeps: BVWAVE_THREADS, else hardware concurrency.
unsigned sweep_threads();

/// Runs job(i) for i in [0, n) on sweep_threads() workers.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job);

}  // namespace bvwave
