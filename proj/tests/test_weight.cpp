#include <doctest.h>

#include "bvwave/weight.hpp"

#include <cmath>

using namespace bvwave;
using PF = PiecewiseFunction<double>;
using S = Smooth<double>;

namespace {

PF slab_V() { return PF::indicator(-1.0, 1.0, -3.0, 0.0); }

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(a + (b - a) * i / (n - 1));
  return g;
}

}  // namespace

TEST_CASE("positive jump sets") {
  CHECK(positive_jump_sets(slab_V(), PF(1.0)) == std::vector<double>{1.0});
  CHECK(positive_jump_sets(PF(0.3), PF(2.0)).empty());
  CHECK(positive_jump_sets(PF::step(0.0, 0.0, 2.0), PF::step(0.0, 1.0, 2.0)) == std::vector<double>{0.0});
}

TEST_CASE("jump recursion") {
  auto r = jump_recursion(slab_V(), PF(1.0), 1.0, {1.0});
  REQUIRE(r.r.size() == 2);
  CHECK(r.A[0] == doctest::Approx(0.6));
  CHECK(r.B[0] == 0.0);
  CHECK(r.r[1] == doctest::Approx(std::log(4.0)));

  CHECK(jump_recursion(slab_V(), PF(1.0), 1.0, {}).r == std::vector<double>{0.0});

  auto b = jump_recursion(PF(0.0), PF::step(0.0, 1.0, 2.0), 0.5, {0.0});
  CHECK(b.B[0] == doctest::Approx(1.0 / 3.0));
  CHECK(b.r[1] == doctest::Approx(std::log(2.0)));

  CHECK_THROWS_AS(jump_recursion(slab_V(), PF(1.0), -0.5, {1.0}), std::domain_error);
}

TEST_CASE("q2 closed form") {
  auto q = build_q2(slab_V(), PF(1.0), 1.0, 1.0);
  CHECK(q.k == doctest::Approx(1.0));
  CHECK(q.q2(0.0) == doctest::Approx(1.0));
  CHECK(q.limit == doctest::Approx(2.0));
  CHECK(q.q2(-1e9) == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(q.q2(1e9) == doctest::Approx(2.0));
  // derivative of q2 equals the rate (|x|+1)^{-2}
  CHECK(q.q2.derivative()(2.0) == doctest::Approx(1.0 / 9.0));

  // V = x on (0,1), 0 left, 1 right: sup V = 1, E_min = 2 gives k = 1 and the
  // continuous part adds exactly 1 across (0, 1)
  PF V({0.0, 1.0}, {S(0.0), S::polynomial({0.0, 1.0}), S(1.0)});
  auto qv = build_q2(V, PF(1.0), 1.0, 2.0);
  CHECK(qv.k == doctest::Approx(1.0));
  auto profile = [](double x) { return x <= 0 ? 1.0 / (1.0 - x) : 2.0 - 1.0 / (1.0 + x); };
  CHECK(qv.q2(1.0) - profile(1.0) - (qv.q2(0.0) - profile(0.0)) == doctest::Approx(1.0));
  CHECK(qv.limit == doctest::Approx(3.0));

  // only the increasing part of a hump contributes
  PF hump({-1.0, 1.0}, {S(0.0), S::polynomial({1.0, 0.0, -1.0}), S(0.0)});
  auto qh = build_q2(hump, PF(1.0), 1.0, 2.0);
  CHECK(qh.limit == doctest::Approx(1.0 + 2.0));

  CHECK_THROWS_AS(build_q2(slab_V(), PF(1.0), 1.0, -3.0), std::domain_error);
}

TEST_CASE("slab weight") {
  auto b = build_weight(slab_V(), PF(1.0), 1.0, 1.0);
  REQUIRE(b.dw.atoms().size() == 1);
  CHECK(b.dw.atoms()[0].x == 1.0);
  CHECK(b.dw.atoms()[0].mass == doctest::Approx(3.0 * std::exp(b.q2(1.0))));
  CHECK(b.recursion.r.back() <= b.bound);
  auto rep = verify_lower_bounds(b, slab_V(), PF(1.0), 1.0, grid(-5, 5, 1001));
  CHECK(rep.passed());
  // dw agrees with the chain rule applied to q1 + q2
  auto e = exp_measure(b.q1 + b.q2);
  CHECK(e.mass_at(1.0) == doctest::Approx(b.dw.mass_at(1.0)).epsilon(1e-13));
  for (double x : grid(-4, 4, 81)) CHECK(e.density()(x + 1e-3) == doctest::Approx(b.dw.density()(x + 1e-3)).epsilon(1e-12));
}

TEST_CASE("degenerate and truncated weights") {
  auto c = build_weight(PF(0.5), PF(2.0), 1.0, 1.0);
  CHECK(c.dw.atoms().empty());
  CHECK(c.w(0.0) == doctest::Approx(std::exp(1.0)));
  auto rep = verify_lower_bounds(c, PF(0.5), PF(2.0), 1.0, grid(-3, 3, 61));
  CHECK(rep.passed());
  for (const auto& m : rep.density_energy) CHECK(std::abs(m.margin) <= 1e-12 * m.scale);

  auto t = build_weight(slab_V(), PF(1.0), 1.0, 1.0, 0);
  CHECK(t.sites.empty());
  CHECK(t.dw.atoms().empty());
  CHECK(t.w(3.0) == doctest::Approx(std::exp(t.q2(3.0))));
  // the dropped site is still covered by the right-hand side atom
  CHECK(verify_lower_bounds(t, slab_V(), PF(1.0), 1.0, grid(-3, 3, 61)).passed());
}

TEST_CASE("alpha jump margin") {
  PF alpha = PF::step(0.0, 1.0, 2.0);
  auto b = build_weight(PF(0.0), alpha, 1.0, 1.0);
  auto rep = verify_lower_bounds(b, PF(0.0), alpha, 1.0, grid(-3, 3, 61));
  CHECK(rep.passed());
  const double r1 = std::log(2.0);
  const double expected = std::exp(b.q2(0.0)) * ((std::exp(r1) - 1.0) - (1.0 / 1.5) * (std::exp(r1) + 1.0) / 2.0);
  bool found = false;
  for (const auto& m : rep.atoms_alpha)
    if (m.x == 0.0) {
      found = true;
      CHECK(m.margin == doctest::Approx(expected).epsilon(1e-12));
      CHECK(m.margin >= -1e-15);
    }
  CHECK(found);
}

TEST_CASE("monotone weight bounded uniformly in N") {
  PF V = PF::piecewise_constant({-2, -1, 0.5, 1.5}, {0.0, 0.4, -0.3, 0.2, 0.0});
  PF alpha = PF::piecewise_constant({-1.5, 0.0, 1.0}, {1.0, 1.6, 0.7, 1.0});
  double prev_max = 0.0;
  const auto all = build_weight(V, alpha, 1.0, 1.0);
  const double cap = std::exp(all.bound + all.q2_limit);
  for (std::size_t N = 0; N <= all.all_sites.size(); ++N) {
    auto b = build_weight(V, alpha, 1.0, 1.0, N);
    double mx = 0.0, last = 0.0;
    for (double x : grid(-4, 4, 801)) {
      const double w = b.w(x);
      CHECK(w >= 1.0);
      CHECK(w >= last - 1e-14);
      last = w;
      mx = std::max(mx, w);
    }
    CHECK(mx >= prev_max - 1e-14);
    CHECK(mx <= cap);
    prev_max = mx;
  }
}

TEST_CASE("randomized media keep nonnegative margins") {
  auto r = run_weight_checks(99, 12, {0.1, 1.0}, 201);
  CHECK(r.cases == 26);
  CHECK(r.max_A < 1.0);
  CHECK(r.max_B < 1.0);
  CHECK(r.bound_failures == 0);
  CHECK(r.margin_failures == 0);
  INFO(r.first_failure);
  CHECK(r.passed());
}
