#include "bvwave/helmholtz.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace bvwave {

namespace {

// Panel width giving at least `ppw` nodes per local wavelength.
std::function<double(double)> wavelength_width(const LayerStack<cd>& s, int order, double ppw, double max_panel) {
  return [&s, order, ppw, max_panel](double x) {
    const double k = std::abs(s.k[s.layer_of(x)]);
    if (k == 0.0) return max_panel;
    return std::min(max_panel, order * (2.0 * M_PI / k) / ppw);
  };
}

std::vector<double> inside(const std::vector<double>& v, double a, double b) {
  std::vector<double> out;
  for (double x : v)
    if (x > a && x < b) out.push_back(x);
  return out;
}

NormEstimate top_norm(const SemiseparableKernel& K, double rel_tol) {
  const SingularEstimate s = top_singular_value([&K](const Eigen::VectorXcd& v) { return K.apply(v); },
                                                [&K](const Eigen::VectorXcd& v) { return K.apply_adjoint(v); }, K.size(),
                                                rel_tol);
  return {s.sigma, K.size(), s.iterations, s.converged};
}

}  // namespace

LayerStack<cd> semiclassical_layers(const PiecewiseFunction<double>& alpha, const PiecewiseFunction<double>& V, double E,
                                    double eps, double h) {
  if (!alpha.is_piecewise_constant() || !V.is_piecewise_constant())
    throw std::invalid_argument("exact solver needs piecewise-constant alpha and V");
  if (!(h > 0)) throw std::invalid_argument("h must be positive");
  LayerStack<cd> s;
  s.interfaces = PiecewiseFunction<double>::merge(alpha.simplified().breakpoints(), V.simplified().breakpoints());
  const auto pa = alpha.pieces_on(s.interfaces), pv = V.pieces_on(s.interfaces);
  for (std::size_t j = 0; j < pa.size(); ++j) {
    const double a = pa[j].constant_value();
    if (!(a > 0)) throw std::invalid_argument("alpha must be positive");
    s.alpha.push_back(a);
    s.k.push_back(std::sqrt(cd(E - pv[j].constant_value(), eps) / a) / h);
  }
  return s;
}

TransferState transfer(const Medium& m, cd lambda, double from, double to) {
  const LayerStack<cd> s = wave_layers(m, lambda);
  const auto& I = s.interfaces;
  Eigen::Matrix2cd M = Eigen::Matrix2cd::Identity();
  double x = from;
  while (x != to) {
    std::size_t j;
    double next;
    if (to > x) {
      j = std::size_t(std::upper_bound(I.begin(), I.end(), x) - I.begin());
      next = j < I.size() ? std::min(to, I[j]) : to;
    } else {
      j = std::size_t(std::lower_bound(I.begin(), I.end(), x) - I.begin());
      next = j > 0 ? std::max(to, I[j - 1]) : to;
    }
    M = layer_propagator(s.k[j], s.alpha[j], next - x) * M;
    x = next;
  }
  return {M, from, to, lambda};
}

std::vector<cd> piece_wavenumbers(const Medium& m, cd lambda) { return wave_layers(m, lambda).k; }

OutgoingPair<cd> outgoing_solutions(const Medium& m, cd lambda) { return OutgoingPair<cd>(wave_layers(m, lambda)); }

cd wronskian(const Medium& m, cd lambda) { return outgoing_solutions(m, lambda).wronskian(); }

Scattering scattering_coefficients(const Medium& m, double lambda) {
  const OutgoingPair<cd> sol = outgoing_solutions(m, lambda);
  const auto& s = sol.layers();
  const double x = s.interfaces.empty() ? 0.0 : s.interfaces.front();
  const Cauchy<cd> c = sol.plus(x);
  const cd k = s.k.front(), e = std::exp(cd(0, 1) * k * x);
  const cd du = c(1) / (s.alpha.front() * cd(0, 1) * k);
  const cd A = 0.5 * (c(0) + du) / e, B = 0.5 * (c(0) - du) * e;
  return {B / A, 1.0 / A};
}

void check_invertible(cd W, cd lambda) {
  if (std::abs(W) < 1e-12 * std::max(1.0, std::abs(lambda))) {
    std::ostringstream msg;
    msg << "Wronskian " << std::abs(W) << " too small at lambda = " << lambda << " (near a resonance)";
    throw NearResonance(msg.str());
  }
}

cd greens_kernel(const OutgoingPair<cd>& sol, cd W, double x, double y) {
  const double lo = std::min(x, y), hi = std::max(x, y);
  return -sol.minus(lo)(0) * sol.plus(hi)(0) / W;
}

Eigen::VectorXcd greens_apply(const Medium& m, cd lambda, const std::function<cd(double)>& f, double a, double b,
                              const std::vector<double>& points, const std::vector<double>& f_breaks,
                              const GreensOptions& opt) {
  const OutgoingPair<cd> sol = outgoing_solutions(m, lambda);
  const cd W = sol.wronskian();
  check_invertible(W, lambda);
  std::vector<double> breaks = inside(m.interfaces(), a, b);
  for (const auto* v : {&f_breaks, &points})
    for (double x : inside(*v, a, b)) breaks.push_back(x);
  const PanelGrid grid = PanelGrid::covering(a, b, breaks,
                                             wavelength_width(sol.layers(), opt.order, opt.points_per_wavelength, opt.max_panel),
                                             opt.order);
  const Eigen::Index n = grid.size();
  Eigen::VectorXcd gm(n), gp(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double y = grid.nodes()(i);
    const cd src = m.beta()(y) * f(y);
    gm(i) = sol.minus(y)(0) * src;
    gp(i) = sol.plus(y)(0) * src;
  }
  const Eigen::VectorXcd Im = grid.edge_cumulative(gm), Ip = grid.edge_cumulative(gp);
  const cd total_m = Im(Im.size() - 1), total_p = Ip(Ip.size() - 1);
  const auto& edges = grid.edges();
  Eigen::VectorXcd u(Eigen::Index(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double x = points[i];
    if (x <= a) {
      u(Eigen::Index(i)) = -sol.minus(x)(0) * total_p / W;
    } else if (x >= b) {
      u(Eigen::Index(i)) = -sol.plus(x)(0) * total_m / W;
    } else {
      const auto e = std::size_t(std::lower_bound(edges.begin(), edges.end(), x) - edges.begin());
      const cd left = Im(Eigen::Index(e)), right = total_p - Ip(Eigen::Index(e));
      u(Eigen::Index(i)) = -(sol.plus(x)(0) * left + sol.minus(x)(0) * right) / W;
    }
  }
  return u;
}

SemiseparableKernel::SemiseparableKernel(const OutgoingPair<cd>& sol, cd W, const Eigen::VectorXd& nodes, Eigen::VectorXcd scale)
    : left_(nodes.size()), right_(nodes.size()), scale_(std::move(scale)), factor_(-1.0 / W) {
  for (Eigen::Index i = 0; i < nodes.size(); ++i) {
    if (i > 0 && !(nodes(i) > nodes(i - 1))) throw std::invalid_argument("nodes must increase");
    left_(i) = sol.minus(nodes(i))(0);
    right_(i) = sol.plus(nodes(i))(0);
  }
}

Eigen::VectorXcd SemiseparableKernel::apply(const Eigen::VectorXcd& v) const {
  const Eigen::Index n = size();
  const Eigen::VectorXcd w = scale_.cwiseProduct(v);
  Eigen::VectorXcd y(n);
  cd acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += left_(i) * w(i);
    y(i) = right_(i) * acc;
  }
  acc = 0.0;
  for (Eigen::Index i = n; i-- > 0;) {
    y(i) += left_(i) * acc;
    acc += right_(i) * w(i);
  }
  return factor_ * scale_.cwiseProduct(y);
}

Eigen::VectorXcd SemiseparableKernel::apply_adjoint(const Eigen::VectorXcd& v) const {
  // The kernel is complex symmetric, so K^H = conj o K o conj.
  return apply(v.conjugate()).conjugate();
}

Eigen::MatrixXcd SemiseparableKernel::dense() const {
  const Eigen::Index n = size();
  Eigen::MatrixXcd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index lo = std::min(i, j), hi = std::max(i, j);
      K(i, j) = factor_ * scale_(i) * scale_(j) * left_(lo) * right_(hi);
    }
  return K;
}

PiecewiseFunction<double> plateau_cutoff(double plateau, double support) {
  if (!(plateau > 0 && support > plateau)) throw std::invalid_argument("need 0 < plateau < support");
  using S = Smooth<double>;
  const double w = support - plateau;
  auto ramp = [](const S& t) { return S(3.0) * t * t - S(2.0) * t * t * t; };
  const S up = ramp(S::polynomial({support / w, 1.0 / w}));    // t = (x + support)/w
  const S down = ramp(S::polynomial({support / w, -1.0 / w}));  // t = (support - x)/w
  return {{-support, -plateau, plateau, support}, {S(0.0), up, S(1.0), down, S(0.0)}};
}

NormEstimate cutoff_resolvent_norm(const Medium& m, cd lambda, const PiecewiseFunction<double>& chi, const NormOptions& opt) {
  const auto& cb = chi.breakpoints();
  if (cb.empty() || !chi.left_tail().is_zero() || !chi.right_tail().is_zero())
    throw std::invalid_argument("cutoff must be compactly supported");
  const OutgoingPair<cd> sol = outgoing_solutions(m, lambda);
  const cd W = sol.wronskian();
  check_invertible(W, lambda);
  const double a = cb.front(), b = cb.back();
  std::vector<double> breaks = cb;
  for (double x : inside(m.interfaces(), a, b)) breaks.push_back(x);
  const PanelGrid grid = PanelGrid::covering(
      a, b, breaks, wavelength_width(sol.layers(), opt.order, opt.points_per_wavelength, opt.max_panel), opt.order);
  Eigen::VectorXcd s(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid.nodes()(i);
    s(i) = chi(x) * std::sqrt(m.beta()(x) * grid.weights()(i));
  }
  return top_norm(SemiseparableKernel(sol, W, grid.nodes(), s), opt.rel_tol);
}

NormEstimate semiclassical_norm(const PiecewiseFunction<double>& alpha, const PiecewiseFunction<double>& V, double E,
                                double delta, double h, double eps, const SemiclassicalOptions& opt) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  if (!(eps >= 0)) throw std::invalid_argument("eps must be nonnegative");
  const OutgoingPair<cd> sol(semiclassical_layers(alpha, V, E, eps, h));
  const cd W = sol.wronskian();
  check_invertible(W, 1.0 / h);
  const double L = opt.half_width;
  std::vector<double> breaks = inside(sol.layers().interfaces, -L, L);
  breaks.push_back(0.0);
  const PanelGrid grid = PanelGrid::covering(
      -L, L, breaks, wavelength_width(sol.layers(), opt.order, opt.points_per_wavelength, opt.max_panel), opt.order);
  Eigen::VectorXcd s(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const double x = grid.nodes()(i);
    s(i) = std::pow(std::abs(x) + 1.0, -0.5 * (1.0 + delta)) * std::sqrt(grid.weights()(i)) / h;
  }
  return top_norm(SemiseparableKernel(sol, W, grid.nodes(), s), opt.rel_tol);
}

std::vector<SemiclassicalRow> semiclassical_sweep(const PiecewiseFunction<double>& alpha, const PiecewiseFunction<double>& V,
                                                  double E, double delta, const std::vector<double>& h_list,
                                                  const std::vector<double>& eps_list, const SemiclassicalOptions& opt) {
  std::vector<SemiclassicalRow> rows(h_list.size() * eps_list.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const double h = h_list[i / eps_list.size()], eps = eps_list[i % eps_list.size()];
    const double n = semiclassical_norm(alpha, V, E, delta, h, eps, opt).norm;
    rows[i] = {h, eps, n, h * n};
  });
  return rows;
}

std::vector<ResolventRow> resolvent_sweep(const Medium& m, const std::vector<double>& re_list,
                                          const std::vector<double>& im_list, const PiecewiseFunction<double>& chi,
                                          const NormOptions& opt) {
  std::vector<ResolventRow> rows(re_list.size() * im_list.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const double re = re_list[i / im_list.size()], im = im_list[i % im_list.size()];
    const double n = cutoff_resolvent_norm(m, cd(re, im), chi, opt).norm;
    rows[i] = {re, im, n, std::abs(re) * n};
  });
  return rows;
}

SemiclassicalForm rescale_wave_to_semiclassical(const Medium& m, cd lambda) {
  if (lambda.real() == 0.0) throw std::invalid_argument("Re lambda must be nonzero");
  if (!m.normalized()) throw std::invalid_argument("rescaling needs a normalized medium (alpha0 = beta0 = 1)");
  const double re = lambda.real(), im = lambda.imag();
  return {1.0 / std::abs(re), (PiecewiseFunction<double>(1.0) - m.beta()).simplified(), 1.0, im * im / (re * re),
          2.0 * im / re};
}

unsigned sweep_threads() {
  if (const char* env = std::getenv("BVWAVE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return unsigned(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& job) {
  const unsigned T = std::min<std::size_t>(sweep_threads(), n);
  if (T <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < T; ++t)
    pool.emplace_back([&] {
      for (std::size_t i; (i = next++) < n;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace bvwave
