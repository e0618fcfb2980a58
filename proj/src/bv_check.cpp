#include "bvwave/bv_check.hpp"

#include <algorithm>
#include <cmath>

namespace bvwave {

namespace {

double uniform(std::mt19937_64& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
int pick(std::mt19937_64& rng, int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

std::vector<double> lattice_points(std::mt19937_64& rng, int n, double half_width) {
  // Quarter-unit lattice: shared breakpoints between members of a pair are common.
  std::vector<double> pts;
  const int m = int(std::round(4 * half_width));
  while (int(pts.size()) < n) {
    const double x = pick(rng, -m, m) / 4.0;
    if (std::find(pts.begin(), pts.end(), x) == pts.end()) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

double rel(double err, double scale) { return err / std::max(1.0, std::abs(scale)); }

}  // namespace

double BVCheckResult::worst() const { return std::max({ftc, product, product_vs_direct, chain, chain_atoms, ibp}); }

PiecewiseFunction<double> random_piecewise(std::mt19937_64& rng, int max_breaks, int max_degree, double half_width) {
  const int n = pick(rng, 0, max_breaks);
  std::vector<double> b = lattice_points(rng, n, half_width);
  std::vector<Smooth<double>> p;
  p.emplace_back(uniform(rng, -2, 2));
  for (int i = 1; i < n; ++i) {
    Eigen::VectorXd c(pick(rng, 0, max_degree) + 1);
    for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = uniform(rng, -1, 1);
    // Occasionally continue the previous piece continuously.
    if (pick(rng, 0, 3) == 0) c(0) += p.back()(b[i - 1]) - Smooth<double>::polynomial(c)(b[i - 1]);
    p.push_back(Smooth<double>::polynomial(c));
  }
  if (n > 0) p.emplace_back(uniform(rng, -2, 2));
  return {b, p};
}

PiecewiseFunction<double> random_test_function(std::mt19937_64& rng, double a, double b) {
  // (x - a)(b - x)(c0 + c1 x) on [a, m], continued linearly-corrected on [m, b].
  const double m = a + (b - a) * uniform(rng, 0.2, 0.8);
  const double c0 = uniform(rng, -1, 1), c1 = uniform(rng, -1, 1), c2 = uniform(rng, -1, 1);
  const Smooth<double> left = Smooth<double>::polynomial({-a * b, a + b, -1.0}) * Smooth<double>::polynomial({c0, c1});
  // Right piece: (x - m)(b - x)*c2 + left(m)*(b - x)/(b - m), continuous at m, zero at b.
  const double lm = left(m);
  const Smooth<double> right = Smooth<double>::polynomial({-m * b, m + b, -1.0}) * Smooth<double>(c2) +
                               Smooth<double>::polynomial({lm * b / (b - m), -lm / (b - m)});
  return {{a, m, b}, {Smooth<double>(0.0), left, right, Smooth<double>(0.0)}};
}

BVCheckResult run_bv_checks(std::uint64_t seed, int pairs) {
  std::mt19937_64 rng(seed);
  BVCheckResult r;
  r.pairs = pairs;
  for (int t = 0; t < pairs; ++t) {
    const auto f = random_piecewise(rng);
    const auto g = random_piecewise(rng);
    const auto fg = f * g;
    const auto df = derivative_measure(f);
    const auto dfg = product_measure(f, g);
    const auto dexp = exp_measure(f);
    // Test lattice of endpoints, hitting breakpoints of f and g.
    std::vector<double> pts{-3.5, -3.0, -1.25, -0.5, 0.0, 0.75, 1.5, 2.25, 3.0, 3.5};
    for (double x : f.breakpoints()) pts.push_back(x);
    for (double x : g.breakpoints()) pts.push_back(x);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    // Errors are measured relative to the size of the functions involved, since
    // interval integrals can cancel far below the magnitudes being summed.
    double sf = 1.0, sfg = 1.0, sexp = 1.0;
    for (double x = -3.5; x <= 3.5; x += 1.0 / 64) {
      for (double v : {f.left_limit(x), f.right_limit(x)}) {
        sf = std::max(sf, std::abs(v));
        sexp = std::max(sexp, std::exp(v));
      }
      sfg = std::max({sfg, std::abs(fg.left_limit(x)), std::abs(fg.right_limit(x))});
    }
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j) {
        const double a = pts[i], b = pts[j];
        const double fa = f.right_limit(a), fb = f.right_limit(b);
        const double ga = g.right_limit(a), gb = g.right_limit(b);
        r.ftc = std::max(r.ftc, rel(std::abs(integrate_measure(df, a, b) - (fb - fa)), sf));
        r.product = std::max(r.product, rel(std::abs(integrate_measure(dfg, a, b) - (fb * gb - fa * ga)), sfg));
        r.chain = std::max(r.chain, rel(std::abs(integrate_measure(dexp, a, b) - (std::exp(fb) - std::exp(fa))), sexp));
      }
    // Product rule against d(fg) computed directly from the product function.
    const auto direct = derivative_measure(fg);
    std::vector<double> sites = PiecewiseFunction<double>::merge(f.breakpoints(), g.breakpoints());
    for (double x : sites) {
      r.product_vs_direct = std::max(r.product_vs_direct, rel(std::abs(dfg.mass_at(x) - direct.mass_at(x)), direct.mass_at(x)));
      const double jump = std::exp(f.right_limit(x)) - std::exp(f.left_limit(x));
      r.chain_atoms = std::max(r.chain_atoms, rel(std::abs(dexp.mass_at(x) - jump), sexp));
    }
    for (double x : pts) {
      for (double y : {x - 1e-3, x + 1e-3}) {
        const double d = direct.density()(y);
        r.product_vs_direct = std::max(r.product_vs_direct, rel(std::abs(dfg.density()(y) - d), d));
      }
    }
    const auto phi = random_test_function(rng, -2.0 - 0.25 * pick(rng, 0, 4), 1.0 + 0.25 * pick(rng, 0, 8));
    const double a = phi.breakpoints().front(), b = phi.breakpoints().back();
    r.ibp = std::max(r.ibp, ibp_residual(f, phi, a, b));
  }
  return r;
}

}  // namespace bvwave
