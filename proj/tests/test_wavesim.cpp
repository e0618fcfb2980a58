#include <doctest.h>

#include "bvwave/wavesim.hpp"

#include <cmath>

using namespace bvwave;
using PF = PiecewiseFunction<double>;

namespace {

Medium free_medium() { return Medium(PF(1.0), PF(1.0)); }
Medium slab() { return Medium(PF(1.0), PF::indicator(-1.0, 1.0, 4.0, 1.0)); }

// (1 - ((x - c)/r)^2)^4 on (c - r, c + r): C^3 and compactly supported.
PF bump(double c, double r, double height = 1.0) {
  const double k = height / std::pow(r, 8);
  const PF::Piece q = PF::Piece::polynomial({r * r - c * c, 2.0 * c, -1.0}), q2 = q * q;
  return {{c - r, c + r}, {PF::Piece(0.0), PF::Piece(k) * q2 * q2, PF::Piece(0.0)}};
}

double l2_error_vs_dalembert(double dx) {
  const PF w0 = bump(0.0, 1.0);
  WaveState s(free_medium(), {w0, PF(0.0)}, dx, 2.0);
  s.advance(s.steps_to(2.0));
  double e = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double x = s.x(i), exact = 0.5 * (w0(x - 2.0) + w0(x + 2.0));
    e += (s.w()(i) - exact) * (s.w()(i) - exact) * dx;
  }
  return std::sqrt(e);
}

}  // namespace

TEST_CASE("limit constant") {
  CHECK(w_infinity(PF::indicator(-1.0, 1.0), slab().beta(), 1.0, 1.0) == doctest::Approx(4.0));
  CHECK(w_infinity(PF(0.0), slab().beta(), 1.0, 1.0) == 0.0);
  CHECK(w_infinity(PF::indicator(-1.0, 1.0), PF(1.0), 4.0, 1.0) == doctest::Approx(0.5));
  CHECK_THROWS(w_infinity(PF(1.0), PF(1.0), 1.0, 1.0));
}

TEST_CASE("grid construction") {
  WaveState s(slab(), {PF(0.0), PF::indicator(-1.0, 1.0)}, 0.01, 10.0);
  CHECK(s.L() >= 1.0 + 1.0 + 10.0);
  CHECK(s.dt() <= 0.9 * 0.01 * std::sqrt(1.0 / 1.0) + 1e-15);
  CHECK(s.steps_to(10.0) * s.dt() == doctest::Approx(10.0));
  CHECK(s.beta_nodes()(s.index_of(-1.0)) == doctest::Approx(2.5));
  CHECK(s.beta_nodes()(s.index_of(0.0)) == 4.0);
  // discrete mass equals int beta w1
  CHECK((s.beta_nodes().array() * s.v_integer().array()).sum() * s.dx() == doctest::Approx(8.0).epsilon(1e-13));
  CHECK_THROWS(WaveState(slab(), {}, 0.3, 1.0));
  CHECK_THROWS(WaveState(slab(), {}, 0.01, 1.0, 0.95));
  CHECK_THROWS(WaveState(slab(), {PF(1.0), PF(0.0)}, 0.01, 1.0));
}

TEST_CASE("free propagation matches d'Alembert to second order") {
  const double e1 = l2_error_vs_dalembert(0.01), e2 = l2_error_vs_dalembert(0.005);
  CHECK(e1 < 1e-3);
  CHECK(e1 / e2 > 3.5);
  CHECK(e1 / e2 < 4.5);

  WaveState zero(slab(), {}, 0.01, 5.0);
  zero.advance(zero.steps_to(5.0));
  CHECK(zero.w().cwiseAbs().maxCoeff() == 0.0);
  CHECK(global_energy(zero) == 0.0);
}

TEST_CASE("transmission through an impedance jump") {
  // right-moving pulse w = f(x - t) hits beta = 4 (Z = 2) at x = -1
  const PF f = bump(-3.0, 0.3);
  WaveState s(slab(), {f, -1.0 * f.derivative()}, 0.002, 3.2);
  s.advance(s.steps_to(3.2));
  double peak = 0.0;
  for (double x = -0.99; x < 0.99; x += 0.002) peak = std::max(peak, s.sample(x));
  CHECK(peak == doctest::Approx(2.0 / 3.0).epsilon(0.01));
  double reflected = 0.0;
  for (double x = -6.0; x < -1.5; x += 0.002) reflected = std::min(reflected, s.sample(x));
  CHECK(reflected == doctest::Approx(-1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("energy") {
  const WaveData pulse{bump(0.0, 1.0), bump(0.3, 0.5, 0.7)};
  WaveState s(free_medium(), pulse, 0.01, 50.0);
  const double e0 = global_energy(s);
  double drift = 0.0;
  while (s.t() < 50.0 - 1e-9) {
    s.advance(500);
    drift = std::max(drift, std::abs(global_energy(s) - e0));
  }
  CHECK(drift < 1e-6 * e0);

  // the integer-level energy is only second-order accurate
  auto diag_drift = [&](double cfl) {
    WaveState r(slab(), pulse, 0.01, 4.0, cfl);
    const double d0 = diagnostic_energy(r);
    double d = 0.0;
    while (r.steps_to(4.0) > 0) {
      r.step();
      d = std::max(d, std::abs(diagnostic_energy(r) - d0));
    }
    return d;
  };
  const double ratio = diag_drift(0.8) / diag_drift(0.4);
  CHECK(ratio > 3.0);
  CHECK(ratio < 5.0);
}

TEST_CASE("local energy") {
  const PF w0 = bump(0.5, 1.0), w1 = bump(-0.2, 0.8, 2.0);
  WaveState s(free_medium(), {w0, w1}, 0.001, 1.0);
  const LocalEnergy e = local_energy(s, 3.0, 0.0);
  const PF dw0 = w0.derivative();
  const double h1 = std::sqrt(integrate(w0 * w0 + dw0 * dw0, -3.0, 3.0)), l2 = std::sqrt(integrate(w1 * w1, -3.0, 3.0));
  CHECK(e.h1_dist == doctest::Approx(h1).epsilon(1e-5));
  CHECK(e.l2_dtw == doctest::Approx(l2).epsilon(1e-5));
  WaveState z(free_medium(), {}, 0.01, 1.0);
  CHECK(local_energy(z, 1.5, 0.0).h1_dist == 0.0);
  CHECK(local_energy(z, 1.5, 0.0).l2_dtw == 0.0);
}

TEST_CASE("finite speed and linearity") {
  const WaveData a{bump(0.2, 0.8), bump(-0.1, 0.5)}, b{bump(-0.4, 0.5, -2.0), bump(0.3, 0.6, 0.5)};
  const double T = 5.0;
  WaveState sa(slab(), a, 0.005, T, 0.9, 15.0), sb(slab(), b, 0.005, T, 0.9, 15.0),
      sab(slab(), {a.w0 + 3.0 * b.w0, a.w1 + 3.0 * b.w1}, 0.005, T, 0.9, 15.0);
  sa.advance(sa.steps_to(T));
  sb.advance(sb.steps_to(T));
  sab.advance(sab.steps_to(T));
  const Eigen::VectorXd lin = sa.w() + 3.0 * sb.w();
  CHECK((sab.w() - lin).cwiseAbs().maxCoeff() < 1e-12 * lin.cwiseAbs().maxCoeff());

  const double edge = data_radius(a) + slab().R0() + slab().c_max() * T;
  double outside = 0.0;
  for (Eigen::Index i = 0; i < sa.size(); ++i)
    if (std::abs(sa.x(i)) > edge) outside = std::max(outside, std::abs(sa.w()(i)));
  CHECK(outside < 1e-10);
}

TEST_CASE("decay fit") {
  std::vector<double> t, y, small;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(0.1 * i);
    y.push_back(2.5 * std::exp(-0.3 * t.back()));
    small.push_back(1e-12 * y.back());
  }
  const DecayFit f = fit_decay(t, y, 2.0, 18.0);
  CHECK(std::abs(f.c - 0.3) < 1e-10);
  CHECK(f.C == doctest::Approx(2.5));
  CHECK(fit_decay(t, y, 2.0, 18.0, small).c == doctest::Approx(0.3));

  std::vector<double> flat(y.size(), 1.0);
  CHECK_THROWS_AS(fit_decay(t, flat, 2.0, 18.0), FitRefused);
  std::vector<double> floored = y;
  for (std::size_t i = 100; i < floored.size(); ++i) floored[i] = 0.0;
  try {
    fit_decay(t, floored, 2.0, 18.0);
    FAIL("expected refusal");
  } catch (const FitRefused& e) {
    CHECK(e.suggestion.second == doctest::Approx(9.9));
    CHECK(fit_decay(t, floored, e.suggestion.first, e.suggestion.second).c == doctest::Approx(0.3));
  }
  std::vector<double> noisy(y.size(), 1e-2);
  CHECK_THROWS_AS(fit_decay(t, y, 2.0, 18.0, noisy), FitRefused);
}

TEST_CASE("slab decay against the resonance gap") {
  const WaveData data{PF(0.0), PF::indicator(-1.0, 1.0)};
  SimulationOptions opt;
  opt.dx = 0.005;
  opt.T = 40.0;
  const DecayReport r = simulate(slab(), data, opt);
  CHECK(r.w_infinity == doctest::Approx(4.0));
  CHECK(r.energy_drift() < 1e-6);
  REQUIRE(r.fit.has_value());
  CHECK(r.fit->c == doctest::Approx(std::log(3.0) / 4.0).epsilon(0.1));
  CHECK(r.fit->T0 == doctest::Approx(16.0));

  const auto& s = r.final_state;
  const Eigen::Index lo = s.index_of(-3.0), hi = s.index_of(3.0);
  const double mean = s.w().segment(lo, hi - lo + 1).mean();
  CHECK(std::abs(mean - r.w_infinity) < std::max(1e-3, 10.0 * r.fit->C * std::exp(-r.fit->c * opt.T)));

  const DecayReport f = simulate(free_medium(), data, opt);
  CHECK_FALSE(f.fit.has_value());
  CHECK(!f.fit_refusal.empty());
  CHECK(std::abs(f.final_state.w()(f.final_state.index_of(0.0)) - 1.0) < 1e-3);
}

TEST_CASE("change of variables to unit tails") {
  const WaveData d{PF(0.0), bump(0.0, 1.0)};
  const std::vector<double> probes{-2.5, -1.3, -0.51, -0.2, 0.0, 0.33, 0.5, 1.7, 2.4};
  const ScalingCheck same = scaling_reduction_check(slab(), d, 0.01, 2.0, probes);
  CHECK(same.discrepancy == 0.0);

  const Medium stiff(PF(4.0), PF::indicator(-1.0, 1.0, 4.0, 1.0));
  const Medium unit = unit_tail_medium(stiff);
  CHECK(unit.alpha0() == 1.0);
  CHECK(unit.beta()(0.4) == 4.0);
  CHECK(unit.beta()(0.6) == 1.0);
  const ScalingCheck c1 = scaling_reduction_check(stiff, d, 0.01, 2.0, probes);
  const ScalingCheck c2 = scaling_reduction_check(stiff, d, 0.005, 2.0, probes);
  CHECK(c1.w_inf_general == doctest::Approx(c1.w_inf_unit).epsilon(1e-14));
  CHECK(c1.discrepancy < 1e-3);
  CHECK(c1.discrepancy / c2.discrepancy > 3.0);

  // beta0 != 1 rescales time as well
  const Medium heavy(PF(1.0), PF::indicator(-1.0, 1.0, 2.0, 4.0));
  const ScalingCheck c3 = scaling_reduction_check(heavy, d, 0.005, 2.0, probes);
  CHECK(c3.discrepancy < 1e-3);
  CHECK(c3.w_inf_general == doctest::Approx(c3.w_inf_unit).epsilon(1e-14));
}
