#include <doctest.h>

#include "bvwave/bv_check.hpp"
#include "bvwave/bv_json.hpp"
#include "bvwave/measure.hpp"

#include <cmath>

using namespace bvwave;
using PF = PiecewiseFunction<double>;
using S = Smooth<double>;

namespace {

PF heaviside() { return PF::step(0.0, 0.0, 1.0); }
PF slab_beta() { return PF::indicator(-1.0, 1.0, 4.0, 1.0); }

// Tent of height 1 at c, support [c - r, c + r].
PF tent(double c, double r) {
  return {{c - r, c, c + r},
          {S(0.0), S::polynomial({1.0 - c / r, 1.0 / r}), S::polynomial({1.0 + c / r, -1.0 / r}), S(0.0)}};
}

}  // namespace

TEST_CASE("one-sided limits") {
  auto l = eval_limits(heaviside(), 0.0);
  CHECK(l.left == 0.0);
  CHECK(l.right == 1.0);
  CHECK(l.average == 0.5);

  auto c = eval_limits(PF(7.0), 3.3);
  CHECK(c.left == 7.0);
  CHECK(c.average == 7.0);

  // x^2 on (-1, 1), 5 on [1, inf)
  PF f({-1.0, 1.0}, {S(1.0), S::polynomial({0.0, 0.0, 1.0}), S(5.0)});
  auto m = eval_limits(f, 1.0);
  CHECK(m.left == doctest::Approx(1.0));
  CHECK(m.right == 5.0);
  CHECK(m.average == doctest::Approx(3.0));
  CHECK(f(0.5) == doctest::Approx(0.25));
}

TEST_CASE("derivative measures") {
  auto h = derivative_measure(heaviside());
  REQUIRE(h.atoms().size() == 1);
  CHECK(h.atoms()[0].x == 0.0);
  CHECK(h.atoms()[0].mass == 1.0);
  CHECK(h.density()(0.3) == 0.0);

  PF ramp({-1.0, 1.0}, {S(-1.0), S::polynomial({0.0, 1.0}), S(1.0)});
  auto r = derivative_measure(ramp);
  CHECK(r.atoms().empty());
  CHECK(r.density()(0.2) == 1.0);
  CHECK(r.density()(1.5) == 0.0);

  auto s = derivative_measure(slab_beta());
  REQUIRE(s.atoms().size() == 2);
  CHECK(s.mass_at(-1.0) == 3.0);
  CHECK(s.mass_at(1.0) == -3.0);
  CHECK(s.mass_at(0.0) == 0.0);
}

TEST_CASE("integrate_measure endpoint conventions") {
  BVMeasure<double> delta({{0.0, 1.0}}, PF());
  CHECK(integrate_measure(delta, -1.0, 1.0) == 1.0);
  CHECK(integrate_measure(delta, 0.0, 1.0) == 0.0);
  CHECK(integrate_measure(delta, 0.0, 1.0, true, true) == 1.0);
  CHECK(integrate_measure(delta, -1.0, 0.0, false, false) == 0.0);

  BVMeasure<double> leb({}, PF::indicator(0.0, 2.0));
  CHECK(integrate_measure(leb, 0.0, 2.0) == doctest::Approx(2.0));

  CHECK(integrate_measure(derivative_measure(slab_beta()), -2.0, 0.0) == 3.0);
  CHECK_THROWS_AS(integrate_measure(delta, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("product rule") {
  auto hh = product_measure(heaviside(), heaviside());
  CHECK(hh.mass_at(0.0) == 1.0);

  PF g({-1.0, 2.0}, {S(0.0), S::polynomial({1.0, 0.0, 3.0}), S(13.0)});
  auto cg = product_measure(PF(2.5), g);
  auto dg = derivative_measure(g);
  CHECK(cg.mass_at(-1.0) == doctest::Approx(2.5 * dg.mass_at(-1.0)));
  CHECK(cg.density()(0.7) == doctest::Approx(2.5 * dg.density()(0.7)));

  // d(x * 1_{x>0}) = 1_{x>0} dx, no atom
  PF x({}, {S::polynomial({0.0, 1.0})});
  auto xp = product_measure(heaviside(), x);
  CHECK(xp.mass_at(0.0) == 0.0);
  CHECK(xp.density()(0.5) == 1.0);
  CHECK(xp.density()(-0.5) == 0.0);
}

TEST_CASE("exponential chain rule") {
  const double r = 0.7;
  auto e = exp_measure(PF::step(0.4, 0.0, r));
  REQUIRE(e.atoms().size() == 1);
  CHECK(e.mass_at(0.4) == doctest::Approx(std::exp(r) - 1.0).epsilon(1e-14));

  auto z = exp_measure(PF(0.0));
  CHECK(z.atoms().empty());
  CHECK(z.density()(1.0) == 0.0);

  PF ramp({0.0, 1.0}, {S(0.0), S::polynomial({0.0, 1.0}), S(1.0)});
  auto er = exp_measure(ramp);
  CHECK(er.atoms().empty());
  CHECK(er.density()(0.3) == doctest::Approx(std::exp(0.3)));
  CHECK(er.density()(1.3) == 0.0);

  // mixed jump + continuous part: atom e^{f_cont}(e^{r_k} - e^{r_{k-1}}) and ftc across
  PF mixed({-1.0, 0.5, 2.0}, {S(0.2), S::polynomial({0.0, 0.5}), S::polynomial({1.0, -0.25, 0.1}), S(-0.3)});
  auto em = exp_measure(mixed);
  for (double x : mixed.breakpoints())
    CHECK(em.mass_at(x) == doctest::Approx(std::exp(mixed.right_limit(x)) - std::exp(mixed.left_limit(x))).epsilon(1e-13));
  CHECK(integrate_measure(em, -2.0, 3.0) == doctest::Approx(std::exp(-0.3) - std::exp(0.2)).epsilon(1e-13));
}

TEST_CASE("integration by parts") {
  CHECK(ibp_residual(heaviside(), tent(0.0, 1.0), -1.0, 1.0) < 1e-14);
  CHECK(ibp_residual(PF(3.0), tent(0.3, 0.7), -0.4, 1.0) < 1e-14);
  PF x({}, {S::polynomial({0.0, 1.0})});
  CHECK(ibp_residual(x, tent(1.0, 1.0), 0.0, 2.0) < 1e-14);

  CHECK_THROWS_AS(ibp_residual(x, tent(1.0, 1.0), 0.5, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(ibp_residual(x, heaviside(), -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("pointwise operations merge breakpoints") {
  PF a = PF::step(0.0, 1.0, 2.0), b = PF::step(1.0, 3.0, 5.0);
  PF s = a + b, p = a * b;
  CHECK(s.breakpoints().size() == 2);
  CHECK(s(-1.0) == 4.0);
  CHECK(s(0.5) == 5.0);
  CHECK(p(2.0) == 10.0);
  CHECK(p.jump(0.0) == 3.0);
  CHECK((a - a).simplified().breakpoints().empty());
}

TEST_CASE("total variation and bounds") {
  PF f({-1.0, 1.0}, {S(0.0), S::polynomial({0.0, 0.0, 1.0}), S(-2.0)});
  // jumps 1 and 3, x^2 on (-1,1) varies by 2
  CHECK(total_variation(f, -5.0, 5.0) == doctest::Approx(6.0));
  auto [hi, lo] = bounds(f);
  CHECK(hi == doctest::Approx(1.0));
  CHECK(lo == doctest::Approx(-2.0));
  auto roots = real_roots((Eigen::VectorXd(4) << -6.0, 11.0, -6.0, 1.0).finished(), 0.0, 10.0);
  REQUIRE(roots.size() == 3);
  CHECK(roots[0] == doctest::Approx(1.0));
  CHECK(roots[2] == doctest::Approx(3.0));
}

TEST_CASE("json round trip") {
  PF f({-1.0, 1.0}, {S(1.0), S::polynomial({0.0, 0.0, 1.0}), S(5.0)});
  auto j = to_json(f);
  CHECK(j["tails"][1] == 5.0);
  PF g = piecewise_from_json<double>(j);
  CHECK(g(0.5) == f(0.5));
  CHECK(g.breakpoints() == f.breakpoints());

  auto mj = to_json(derivative_measure(slab_beta()));
  CHECK(mj["atoms"][0][1] == 3.0);
  auto mu = measure_from_json<double>(mj);
  CHECK(mu.mass_at(1.0) == -3.0);

  PiecewiseFunction<std::complex<double>> c = PiecewiseFunction<std::complex<double>>::step(0.0, 0.0, {1.0, 2.0});
  auto cj = to_json(c);
  CHECK(piecewise_from_json<std::complex<double>>(cj).jump(0.0) == std::complex<double>(1.0, 2.0));

  CHECK_THROWS(piecewise_from_json<double>(nlohmann::json::parse(R"({"breakpoints":[0,1],"pieces":[],"tails":[0,0]})")));
  CHECK_THROWS(piecewise_from_json<double>(nlohmann::json::parse(R"({"breakpoints":[],"pieces":[],"tails":[0,1]})")));
}

TEST_CASE("complex-valued functions") {
  using C = std::complex<double>;
  PiecewiseFunction<C> f = PiecewiseFunction<C>::indicator(0.0, 1.0, C(0.0, 2.0));
  PiecewiseFunction<C> g({}, {Smooth<C>::polynomial({C(0.0), C(1.0, 1.0)})});
  auto d = product_measure(f, g);
  CHECK(std::abs(integrate_measure(d, -1.0, 2.0)) < 1e-15);  // fg vanishes at both ends
  CHECK(std::abs(d.mass_at(1.0) - C(0.0, -2.0) * C(1.0, 1.0)) < 1e-15);
}

TEST_CASE("randomized identities") {
  auto r = run_bv_checks(20240611, 40);
  CHECK(r.ftc < 1e-12);
  CHECK(r.product < 1e-11);
  CHECK(r.product_vs_direct < 1e-11);
  CHECK(r.chain < 1e-11);
  CHECK(r.chain_atoms < 1e-12);
  CHECK(r.ibp < 1e-12);
}

TEST_CASE("adaptive quadrature with a cancelling integral") {
  // odd integrand: exact value 0, so a purely relative stopping rule never terminates
  auto f = [](double x) { return std::sin(x) * std::exp(x * x); };
  const double v = integrate_adaptive<double>(f, -3.0, 3.0);
  CHECK(std::abs(v) < 1e-13 * 2.0 * std::exp(9.0));
  auto g = [](double x) { return std::exp(-x) * std::cos(5.0 * x); };
  const double exact = (1.0 + std::exp(-2.0) * (5.0 * std::sin(10.0) - std::cos(10.0))) / 26.0;
  CHECK(integrate_adaptive<double>(g, 0.0, 2.0) == doctest::Approx(exact).epsilon(1e-13));
}
