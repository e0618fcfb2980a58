#include "bvwave/wavesim.hpp"

#include "bvwave/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bvwave {

namespace {

double support_radius(const PiecewiseFunction<double>& f) {
  if (!f.pieces().front().is_zero() || !f.pieces().back().is_zero())
    throw std::invalid_argument("wave data must be compactly supported");
  const auto& b = f.breakpoints();
  return b.empty() ? 0.0 : std::max(std::abs(b.front()), std::abs(b.back()));
}

// (1/(b-a)) int_a^b 1/alpha, inverted.
double harmonic_mean(const PiecewiseFunction<double>& alpha, double a, double b) {
  std::vector<double> cuts{a};
  for (double x : alpha.breakpoints())
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  const GaussRule& g = gauss_legendre(8);
  double inv = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i], hi = cuts[i + 1], m = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    const auto& piece = alpha.pieces()[alpha.pieces_at(m).first];
    if (piece.is_constant()) {
      inv += (hi - lo) / piece.constant_value();
      continue;
    }
    for (Eigen::Index k = 0; k < g.nodes.size(); ++k) inv += r * g.weights(k) / piece(m + r * g.nodes(k));
  }
  return (b - a) / inv;
}

std::vector<double> jump_points(const Medium& m) {
  std::vector<double> out;
  for (double x : m.interfaces())
    if (m.alpha().jump(x) != 0.0 || m.beta().jump(x) != 0.0) out.push_back(x);
  return out;
}

// Trapezoid weights over the nodes of [lo, hi] (inclusive indices).
double trapezoid_sq(const Eigen::VectorXd& f, Eigen::Index lo, Eigen::Index hi, double dx) {
  double s = 0.0;
  for (Eigen::Index i = lo; i <= hi; ++i) s += (i == lo || i == hi ? 0.5 : 1.0) * f(i) * f(i);
  return s * dx;
}

double h1_norm_sq(const Eigen::VectorXd& f, double dx) {
  const Eigen::Index n = f.size();
  double grad = 0.0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) grad += (f(i + 1) - f(i)) * (f(i + 1) - f(i));
  return trapezoid_sq(f, 0, n - 1, dx) + grad / dx;
}

}  // namespace

double data_radius(const WaveData& d) { return std::max(support_radius(d.w0), support_radius(d.w1)); }

double w_infinity(const PiecewiseFunction<double>& w1, const PiecewiseFunction<double>& beta, double alpha0, double beta0) {
  const double R = support_radius(w1);
  if (R == 0.0) return 0.0;
  return integrate(w1 * beta, -R, R) / (2.0 * std::sqrt(alpha0 * beta0));
}

WaveState::WaveState(const Medium& m, const WaveData& data, double dx, double T, double cfl, double L)
    : m_(m), dx_(dx) {
  if (!(dx > 0.0) || !(T >= 0.0)) throw std::invalid_argument("dx must be positive and T nonnegative");
  if (!(cfl > 0.0 && cfl <= 0.9)) throw std::invalid_argument("CFL number must lie in (0, 0.9]");
  for (double x : jump_points(m)) {
    if (std::abs(x / dx - std::round(x / dx)) > 1e-9) {
      std::ostringstream os;
      os << "coefficient jump at " << x << " is not a grid node for dx = " << dx;
      throw std::invalid_argument(os.str());
    }
  }
  const double speed = std::sqrt(m.sup_alpha() / m.inf_beta());
  const double needed = data_radius(data) + m.R0() + speed * T;
  if (L == 0.0) L = needed + 1.0;
  if (L < needed) throw std::invalid_argument("domain too small for a reflection-free run");
  half_ = Eigen::Index(std::ceil(L / dx - 1e-9));
  const Eigen::Index n = 2 * half_ + 1;

  const long nsteps = T > 0.0 ? long(std::ceil(T / (cfl * dx / speed) - 1e-9)) : 1;
  dt_ = T > 0.0 ? T / double(nsteps) : cfl * dx / speed;

  beta_.resize(n);
  alpha_.resize(n - 1);
  w_.resize(n);
  Eigen::VectorXd w1(n);
  const PiecewiseFunction<double> mass = data.w1 * m.beta();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x(i), a = xi - 0.5 * dx, b = xi + 0.5 * dx;
    const double bint = integrate(m.beta(), a, b);
    beta_(i) = bint / dx;
    // Mass-consistent projection: the discrete int beta w1 is exact.
    w1(i) = integrate(mass, a, b) / bint;
    w_(i) = data.w0(xi);
    if (i + 1 < n) alpha_(i) = harmonic_mean(m.alpha(), xi, xi + dx);
  }
  w_(0) = w_(n - 1) = 0.0;
  w1(0) = w1(n - 1) = 0.0;
  v_ = w1 - 0.5 * dt_ * apply_stiffness(w_).cwiseQuotient(beta_);
}

Eigen::VectorXd WaveState::apply_stiffness(const Eigen::VectorXd& w) const {
  const Eigen::Index n = w.size();
  Eigen::VectorXd r(n);
  const double s = 1.0 / (dx_ * dx_);
  r(0) = r(n - 1) = 0.0;
  double left = alpha_(0) * (w(1) - w(0));
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double right = alpha_(i) * (w(i + 1) - w(i));
    r(i) = (right - left) * s;
    left = right;
  }
  return r;
}

void WaveState::step() {
  const double courant = dt_ / dx_ * std::sqrt(alpha_.maxCoeff() / beta_.minCoeff());
  if (courant > 0.9 + 1e-12) throw std::runtime_error("CFL condition violated");
  const Eigen::Index n = w_.size();
  const double s = dt_ / (dx_ * dx_);
  double left = alpha_(0) * (w_(1) - w_(0));
  for (Eigen::Index i = 1; i + 1 < n; ++i) {
    const double right = alpha_(i) * (w_(i + 1) - w_(i));
    v_(i) += s * (right - left) / beta_(i);
    left = right;
  }
  w_ += dt_ * v_;
  ++n_;
}

long WaveState::steps_to(double T) const { return long(std::llround(T / dt_)) - n_; }

Eigen::Index WaveState::index_of(double xq) const {
  const Eigen::Index i = Eigen::Index(std::llround(xq / dx_)) + half_;
  if (i < 0 || i >= size()) throw std::out_of_range("point outside the grid");
  return i;
}

Eigen::VectorXd WaveState::v_integer() const {
  return v_ + 0.5 * dt_ * apply_stiffness(w_).cwiseQuotient(beta_);
}

double WaveState::sample(double xq) const {
  const double u = xq / dx_ + double(half_);
  if (u < 0.0 || u > double(size() - 1)) throw std::out_of_range("point outside the grid");
  const Eigen::Index i = std::min(Eigen::Index(std::floor(u)), size() - 2);
  const double f = u - double(i);
  return (1.0 - f) * w_(i) + f * w_(i + 1);
}

namespace {

double stiffness_energy(const WaveState& s) {
  const auto& w = s.w();
  const auto& a = s.alpha_faces();
  double e = 0.0;
  for (Eigen::Index i = 0; i + 1 < w.size(); ++i) e += a(i) * (w(i + 1) - w(i)) * (w(i + 1) - w(i));
  return 0.5 * e / s.dx();
}

}  // namespace

double global_energy(const WaveState& s) {
  const Eigen::VectorXd next = s.v_half() + s.dt() * s.apply_stiffness(s.w()).cwiseQuotient(s.beta_nodes());
  const double kinetic = 0.5 * s.dx() * (s.beta_nodes().array() * next.array() * s.v_half().array()).sum();
  return kinetic + stiffness_energy(s);
}

double diagnostic_energy(const WaveState& s) {
  const Eigen::VectorXd v = s.v_integer();
  return 0.5 * s.dx() * (s.beta_nodes().array() * v.array().square()).sum() + stiffness_energy(s);
}

LocalEnergy local_energy(const WaveState& s, double R1, double w_inf) {
  if (!(R1 > 0.0 && R1 < s.L())) throw std::invalid_argument("R1 must lie inside the grid");
  const Eigen::Index lo = s.index_of(-R1), hi = s.index_of(R1);
  const Eigen::VectorXd d = s.w().segment(lo, hi - lo + 1).array() - w_inf;
  const Eigen::VectorXd v = s.v_integer().segment(lo, hi - lo + 1);
  return {std::sqrt(h1_norm_sq(d, s.dx())), std::sqrt(trapezoid_sq(v, 0, v.size() - 1, s.dx()))};
}

double grid_noise(const WaveState& s, double R1, double w_inf) {
  const Eigen::Index lo = s.index_of(-R1), hi = s.index_of(R1);
  const Eigen::VectorXd d = s.w().segment(lo, hi - lo + 1).array() - w_inf;
  Eigen::VectorXd sm = d, tmp(d.size());
  const Eigen::Index n = d.size();
  for (int pass = 0; pass < 8; ++pass) {
    tmp(0) = sm(0);
    tmp(n - 1) = sm(n - 1);
    for (Eigen::Index i = 1; i + 1 < n; ++i) tmp(i) = 0.25 * sm(i - 1) + 0.5 * sm(i) + 0.25 * sm(i + 1);
    sm.swap(tmp);
  }
  return std::sqrt(h1_norm_sq(d - sm, s.dx()));
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& series, double T0, double T1,
                   const std::vector<double>& noise) {
  if (t.size() != series.size() || (!noise.empty() && noise.size() != t.size()))
    throw std::invalid_argument("series lengths differ");
  if (t.empty() || !(T0 < T1)) throw FitRefused("empty fit window", {T0, T1});
  const double floor = 1e-12 * series.front();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= T0 - 1e-12 && t[i] <= T1 + 1e-12) idx.push_back(i);
  if (idx.size() < 3) throw FitRefused("fewer than three samples in the fit window", {T0, T1});

  // Longest prefix of the window above the floor and the noise.
  std::size_t good = 0;
  while (good < idx.size()) {
    const std::size_t i = idx[good];
    if (!(series[i] > floor) || (!noise.empty() && series[i] < 10.0 * noise[i])) break;
    ++good;
  }
  if (good < idx.size()) {
    const double T1s = good > 0 ? t[idx[good - 1]] : T0;
    std::ostringstream os;
    os << "series reaches the " << (series[idx[good]] > floor ? "grid noise" : "numerical floor") << " at t = "
       << t[idx[good]] << "; try the window [" << T0 << ", " << T1s << "]";
    throw FitRefused(os.str(), {T0, T1s});
  }

  const Eigen::Index n = Eigen::Index(idx.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    A(k, 0) = 1.0;
    A(k, 1) = t[idx[std::size_t(k)]];
    y(k) = std::log(series[idx[std::size_t(k)]]);
  }
  const Eigen::Vector2d p = A.colPivHouseholderQr().solve(y);
  const double c = -p(1);
  if (!(c > 0.0)) throw FitRefused("no decaying trend in the fit window", {T0, T1});
  return {c, std::exp(p(0)), (A * p - y).cwiseAbs().maxCoeff(), T0, T1};
}

double DecayReport::energy_drift() const {
  double drift = 0.0;
  for (double e : global_energy) drift = std::max(drift, std::abs(e - global_energy.front()));
  return global_energy.front() > 0.0 ? drift / global_energy.front() : drift;
}

std::pair<double, double> default_fit_window(const DecayReport& r, double R1, const Medium& m) {
  const double T0 = 2.0 * (R1 + m.R0()) / m.c_min();
  double T1 = T0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (r.times[i] < T0) continue;
    if (r.h1_distance[i] < 10.0 * r.noise[i] || !(r.h1_distance[i] > 1e-12 * r.h1_distance.front())) break;
    T1 = r.times[i];
  }
  return {T0, T1};
}

DecayReport simulate(const Medium& m, const WaveData& data, const SimulationOptions& opt) {
  DecayReport r(WaveState(m, data, opt.dx, opt.T, opt.cfl, opt.L));
  WaveState& s = r.final_state;
  r.w_infinity = w_infinity(data.w1, m.beta(), m.alpha0(), m.beta0());
  const long every = std::max(1L, long(std::llround(opt.sample_interval / s.dt())));
  const long total = s.steps_to(opt.T);
  auto record = [&] {
    const LocalEnergy e = local_energy(s, opt.R1, r.w_infinity);
    r.times.push_back(s.t());
    r.h1_distance.push_back(e.h1_dist);
    r.l2_dtw.push_back(e.l2_dtw);
    r.global_energy.push_back(global_energy(s));
    r.noise.push_back(grid_noise(s, opt.R1, r.w_infinity));
  };
  record();
  for (long done = 0; done < total;) {
    const long k = std::min(every, total - done);
    s.advance(k);
    done += k;
    record();
  }

  auto [T0, T1] = default_fit_window(r, opt.R1, m);
  if (opt.fit_T0) T0 = *opt.fit_T0;
  if (opt.fit_T1) T1 = *opt.fit_T1;
  try {
    if (T1 - T0 < 2.0) {
      std::ostringstream os;
      os << "decay series reaches the grid noise before t = " << T0 + 2.0 << " (signal ends near t = " << T1
         << "); no exponential window";
      throw FitRefused(os.str(), {T0, T1});
    }
    r.fit = fit_decay(r.times, r.h1_distance, T0, T1, r.noise);
  } catch (const FitRefused& e) {
    r.fit_refusal = e.what();
  }
  return r;
}

Medium unit_tail_medium(const Medium& m) {
  const double s = std::sqrt(m.alpha0());
  return Medium((1.0 / m.alpha0()) * m.alpha().rescaled(s), (1.0 / m.beta0()) * m.beta().rescaled(s));
}

WaveData unit_tail_data(const Medium& m, const WaveData& d) {
  const double s = std::sqrt(m.alpha0());
  return {d.w0.rescaled(s), std::sqrt(m.beta0()) * d.w1.rescaled(s)};
}

ScalingCheck scaling_reduction_check(const Medium& m, const WaveData& d, double dx, double T,
                                     const std::vector<double>& probes, double cfl) {
  const Medium mu = unit_tail_medium(m);
  const WaveData du = unit_tail_data(m, d);
  const double Tu = T / std::sqrt(m.beta0());
  WaveState w(m, d, dx, T, cfl), u(mu, du, dx, Tu, cfl);
  w.advance(w.steps_to(T));
  u.advance(u.steps_to(Tu));
  double worst = 0.0;
  for (double x : probes) worst = std::max(worst, std::abs(u.sample(x) - w.sample(std::sqrt(m.alpha0()) * x)));
  return {worst, w_infinity(d.w1, m.beta(), m.alpha0(), m.beta0()), w_infinity(du.w1, mu.beta(), 1.0, 1.0)};
}

}  // namespace bvwave
