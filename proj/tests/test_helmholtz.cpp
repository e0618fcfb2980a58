#include <doctest.h>

#include "bvwave/helmholtz.hpp"

#include <cmath>
#include <random>

using namespace bvwave;
using PF = PiecewiseFunction<double>;

namespace {

const cd I(0.0, 1.0);

Medium free_medium() { return Medium(PF(1.0), PF(1.0)); }
Medium slab() { return Medium(PF(1.0), PF::indicator(-1.0, 1.0, 4.0, 1.0)); }

Medium random_medium(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> val(0.5, 3.0);
  std::vector<double> b{-1.7, -0.4, 0.3, 1.1, 1.9};
  std::vector<double> a{1.0}, be{1.0};
  for (std::size_t i = 1; i < b.size(); ++i) {
    a.push_back(val(rng));
    be.push_back(val(rng));
  }
  a.push_back(1.0);
  be.push_back(1.0);
  return Medium(PF::piecewise_constant(b, a), PF::piecewise_constant(b, be));
}

// Composite Simpson on [a, b] with n (even) intervals.
template <class F>
cd simpson(const F& f, double a, double b, int n) {
  const double h = (b - a) / n;
  cd s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("piece wavenumbers") {
  for (cd k : piece_wavenumbers(free_medium(), 2.0)) CHECK(k == cd(2.0));
  auto ks = piece_wavenumbers(slab(), 1.0);
  REQUIRE(ks.size() == 3);
  CHECK(ks[0] == cd(1.0));
  CHECK(ks[1] == cd(2.0));
  CHECK(ks[2] == cd(1.0));
  CHECK(std::abs(piece_wavenumbers(slab(), I)[1] - 2.0 * I) < 1e-15);
}

TEST_CASE("transfer matrices") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    Medium m = random_medium(rng);
    const cd lam(0.3 + t, -0.2 + 0.05 * t);
    auto ac = transfer(m, lam, -2.5, 2.2), ab = transfer(m, lam, -2.5, 0.0), bc = transfer(m, lam, 0.0, 2.2);
    CHECK(std::abs(ac.matrix.determinant() - 1.0) < 1e-10);
    CHECK((ac.matrix - bc.matrix * ab.matrix).norm() < 1e-10 * ac.matrix.norm());
    auto back = transfer(m, lam, 2.2, -2.5);
    CHECK((back.matrix * ac.matrix - Eigen::Matrix2cd::Identity()).norm() < 1e-9);
    // The transfer matrix moves u_+ consistently.
    auto sol = outgoing_solutions(m, lam);
    CHECK((ac.matrix * sol.plus(-2.5) - sol.plus(2.2)).norm() < 1e-10 * sol.plus(2.2).norm());
  }
}

TEST_CASE("outgoing solutions and Wronskian") {
  const cd lam(1.3, 0.2);
  auto f = outgoing_solutions(free_medium(), lam);
  CHECK(std::abs(f.plus(0.7)(0) - std::exp(I * lam * 0.7)) < 1e-15);
  CHECK(std::abs(f.minus(-0.7)(0) - std::exp(I * lam * 0.7)) < 1e-15);
  CHECK(std::abs(wronskian(free_medium(), lam) - 2.0 * I * lam) < 1e-14);
  auto up = outgoing_solutions(free_medium(), 2.0 * I);
  CHECK(std::abs(up.plus(1.0)(0) - std::exp(-2.0)) < 1e-15);

  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    Medium m = random_medium(rng);
    const cd l(0.5 + 0.7 * t, -0.1 * t);
    auto sol = outgoing_solutions(m, l);
    const cd W = sol.wronskian();
    for (double x : {-3.0, -1.7, -1.0, -0.4, 0.0, 0.3, 1.1, 1.5, 1.9, 4.0})
      CHECK(std::abs(sol.wronskian_at(x) - W) < 1e-10 * std::abs(W));
  }
  CHECK(wronskian(slab(), 0.0) == cd(0.0));
  CHECK(wronskian(random_medium(rng), 0.0) == cd(0.0));
}

TEST_CASE("flux conservation") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 10; ++t) {
    Medium m = t == 0 ? slab() : random_medium(rng);
    for (double lam : {0.1, 0.9, 3.7, 12.0}) {
      auto sc = scattering_coefficients(m, lam);
      CHECK(std::abs(std::norm(sc.r) + std::norm(sc.t) - 1.0) < 1e-10);
    }
  }
  // Single interface oracle is not available with equal tails; slab at lambda with
  // 2 lambda * 2 = pi (quarter-wave layer) reflects r = (Z^2-1)/(Z^2+1) with Z = 2.
  auto sc = scattering_coefficients(slab(), M_PI / 8.0);
  CHECK(std::abs(sc.r) == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("Green's function against closed forms and brute-force quadrature") {
  // lambda = i, f = 1 on [-1, 1]: u(0) = int e^{-|y|}/2 = 1 - 1/e.
  auto u = greens_apply(free_medium(), I, [](double) { return cd(1.0); }, -1.0, 1.0, {0.0, 2.0});
  CHECK(std::abs(u(0) - (1.0 - std::exp(-1.0))) < 1e-13);
  CHECK(std::abs(u(1) - 0.5 * (std::exp(-1.0) - std::exp(-3.0))) < 1e-13);

  const cd lam(2.5, 0.4);
  auto gauss = [](double y) { return cd(std::exp(-4.0 * y * y)); };
  std::vector<double> pts{-4.0, -1.3, -0.2, 0.0, 0.9, 3.5};
  auto ug = greens_apply(free_medium(), lam, gauss, -5.0, 5.0, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double x = pts[i];
    auto kern = [&](double y) { return I / (2.0 * lam) * std::exp(I * lam * std::abs(x - y)) * gauss(y); };
    const cd ref = simpson(kern, -5.0, x, 4000) + simpson(kern, x, 5.0, 4000);
    CHECK(std::abs(ug(Eigen::Index(i)) - ref) < 1e-10);
  }

  // linearity
  auto f1 = [](double y) { return cd(std::cos(y), 0.3); };
  auto f2 = [](double y) { return cd(y * y, -y); };
  auto sum = greens_apply(slab(), lam, [&](double y) { return f1(y) + f2(y); }, -2.0, 2.0, pts);
  const Eigen::VectorXcd parts = greens_apply(slab(), lam, f1, -2.0, 2.0, pts) + greens_apply(slab(), lam, f2, -2.0, 2.0, pts);
  CHECK((sum - parts).norm() < 1e-12 * sum.norm());
}

TEST_CASE("Green's function solves the equation") {
  // Five-point second difference of u at points away from interfaces:
  // -alpha u'' - lambda^2 beta u = beta f.
  const Medium m = slab();
  for (cd lam : {cd(0.0, 1.0), cd(3.0, 0.0), cd(2.0, -0.2)}) {
    auto f = [](double y) { return cd(std::exp(-(y - 0.3) * (y - 0.3) * 3.0)); };
    const double h = 0.002;
    for (double x0 : {-1.5, -0.5, 0.2, 0.6, 1.6}) {
      std::vector<double> p;
      for (int k = -2; k <= 2; ++k) p.push_back(x0 + k * h);
      auto u = greens_apply(m, lam, f, -4.0, 4.0, p);
      const cd d2 = (-u(0) + 16.0 * u(1) - 30.0 * u(2) + 16.0 * u(3) - u(4)) / (12.0 * h * h);
      const double beta = m.beta()(x0);
      const cd res = -d2 - lam * lam * beta * u(2) - beta * f(x0);
      CHECK(std::abs(res) < 1e-7 * std::max(1.0, std::abs(d2)));
    }
  }
}

TEST_CASE("Nystrom operator and norm estimation") {
  const Medium m = slab();
  const cd lam(3.0, 0.1);
  auto sol = outgoing_solutions(m, lam);
  const cd W = sol.wronskian();
  PanelGrid g = PanelGrid::covering(-3.0, 3.0, {-1.0, 1.0}, [](double) { return 0.5; }, 8);
  Eigen::VectorXcd s = (g.weights().array().sqrt()).cast<cd>();
  SemiseparableKernel K(sol, W, g.nodes(), s);
  const Eigen::MatrixXcd D = K.dense();
  CHECK((D - D.transpose()).norm() < 1e-12 * D.norm());
  Eigen::VectorXcd v = Eigen::VectorXcd::Random(K.size());
  CHECK((K.apply(v) - D * v).norm() < 1e-12 * (D * v).norm());
  CHECK((K.apply_adjoint(v) - D.adjoint() * v).norm() < 1e-12 * (D * v).norm());
  // symmetric kernel entries straight from the kernel function
  CHECK(std::abs(greens_kernel(sol, W, -0.3, 1.7) - greens_kernel(sol, W, 1.7, -0.3)) < 1e-15);
  CHECK(std::abs(D(3, 40) - s(3) * s(40) * greens_kernel(sol, W, g.nodes()(3), g.nodes()(40))) < 1e-13);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(D);
  auto est = top_singular_value([&](const Eigen::VectorXcd& x) { return K.apply(x); },
                                [&](const Eigen::VectorXcd& x) { return K.apply_adjoint(x); }, K.size());
  CHECK(est.converged);
  CHECK(est.sigma == doctest::Approx(svd.singularValues()(0)).epsilon(1e-8));
}

TEST_CASE("cutoff resolvent norm") {
  const PF chi = plateau_cutoff(2.0, 3.0);
  CHECK(chi(0.0) == 1.0);
  CHECK(chi(2.5) == doctest::Approx(0.5));
  CHECK(chi.jump(2.0) == 0.0);
  CHECK(chi.derivative().jump(3.0) == doctest::Approx(0.0));

  std::vector<double> scaled;
  for (double lam : {2.0, 4.0, 8.0, 16.0, 20.0}) scaled.push_back(lam * cutoff_resolvent_norm(free_medium(), lam, chi).norm);
  const double mx = *std::max_element(scaled.begin(), scaled.end()), mn = *std::min_element(scaled.begin(), scaled.end());
  CHECK(mx / mn < 1.25);

  for (double re : {3.0, 7.0, 15.0})
    CHECK(cutoff_resolvent_norm(free_medium(), cd(re, 0.5), chi).norm <= cutoff_resolvent_norm(free_medium(), re, chi).norm);

  NormOptions fine;
  fine.points_per_wavelength = 48;
  const double n1 = cutoff_resolvent_norm(slab(), 9.0, chi).norm, n2 = cutoff_resolvent_norm(slab(), 9.0, chi, fine).norm;
  CHECK(std::abs(n1 - n2) < 0.01 * n2);

  // a pole of the continuation refuses inversion
  const cd pole(M_PI / 4.0, -std::log(3.0) / 4.0);
  CHECK_THROWS_AS(cutoff_resolvent_norm(slab(), pole, chi), NearResonance);
}

TEST_CASE("semiclassical norms") {
  SemiclassicalOptions opt;
  opt.half_width = 20.0;
  std::vector<double> hs{0.2, 0.1, 0.05, 0.025};
  auto rows = semiclassical_sweep(PF(1.0), PF(0.0), 1.0, 1.0, hs, {0.0}, opt);
  std::vector<double> v;
  for (auto& r : rows) v.push_back(r.h_times_norm);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  const double med = 0.5 * (sorted[1] + sorted[2]);
  for (double x : v) {
    CHECK(x <= 2.0 * med);
    CHECK(x >= 0.5 * med);
  }

  SemiclassicalOptions small;
  small.half_width = 5.0;
  for (double h : {0.5, 0.2}) CHECK(semiclassical_norm(PF(1.0), PF(0.0), 1.0, 1.0, h, 1.0, small).norm <= 1.0);

  const PF V = PF::indicator(-1.0, 1.0, -3.0, 0.0);
  auto slab_rows = semiclassical_sweep(PF(1.0), V, 1.0, 1.0, hs, {0.0, 1e-6}, opt);
  for (std::size_t i = 0; i < slab_rows.size(); i += 2) {
    CHECK(slab_rows[i].h_times_norm < 10.0);
    CHECK(std::abs(slab_rows[i].norm - slab_rows[i + 1].norm) < 1e-3 * slab_rows[i].norm);
  }
}

TEST_CASE("wave problem as a semiclassical problem") {
  auto r = rescale_wave_to_semiclassical(slab(), 10.0);
  CHECK(r.h == doctest::Approx(0.1));
  CHECK(r.E == 1.0);
  CHECK(r.V(0.0) == -3.0);
  CHECK(r.V(2.0) == 0.0);
  CHECK(r.V.breakpoints() == std::vector<double>{-1.0, 1.0});
  CHECK(rescale_wave_to_semiclassical(free_medium(), 3.0).V.breakpoints().empty());
  auto c = rescale_wave_to_semiclassical(slab(), cd(10.0, 0.1));
  CHECK(c.imag_squared == doctest::Approx(1e-4));
  CHECK(c.imag_linear == doctest::Approx(0.02));
  CHECK_THROWS(rescale_wave_to_semiclassical(slab(), cd(0.0, 1.0)));

  // For real lambda the two kernels agree: G_wave = h^2 G_P with h = 1/lambda.
  const double lam = 6.0;
  auto wave = outgoing_solutions(slab(), lam);
  OutgoingPair<cd> semi(semiclassical_layers(PF(1.0), r.V, 1.0, 0.0, 1.0 / lam));
  const cd Ww = wave.wronskian(), Ws = semi.wronskian();
  for (auto [x, y] : {std::pair{-0.5, 0.7}, std::pair{-2.0, 1.5}, std::pair{0.1, 0.2}})
    CHECK(std::abs(greens_kernel(wave, Ww, x, y) - greens_kernel(semi, Ws, x, y)) < 1e-12);
}
