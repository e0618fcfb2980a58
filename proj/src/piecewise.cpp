#include "bvwave/piecewise.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace bvwave {

namespace {

Eigen::VectorXd trimmed(const Eigen::VectorXd& c) {
  Eigen::Index n = c.size();
  const double scale = c.cwiseAbs().maxCoeff();
  while (n > 1 && std::abs(c(n - 1)) <= 1e-14 * scale) --n;
  return c.head(n);
}

double horner(const Eigen::VectorXd& c, double x) {
  double acc = 0.0;
  for (Eigen::Index i = c.size(); i-- > 0;) acc = acc * x + c(i);
  return acc;
}

}  // namespace

std::vector<double> real_roots(const Eigen::VectorXd& coeffs, double a, double b) {
  std::vector<double> out;
  if (coeffs.size() == 0 || coeffs.cwiseAbs().maxCoeff() == 0.0) return out;
  const Eigen::VectorXd c = trimmed(coeffs);
  const Eigen::Index deg = c.size() - 1;
  std::vector<double> cand;
  if (deg == 0) return out;
  if (deg == 1) {
    cand.push_back(-c(0) / c(1));
  } else {
    // Companion matrix of the monic polynomial.
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(deg, deg);
    for (Eigen::Index i = 1; i < deg; ++i) C(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < deg; ++i) C(i, deg - 1) = -c(i) / c(deg);
    Eigen::EigenSolver<Eigen::MatrixXd> es(C, false);
    for (Eigen::Index i = 0; i < deg; ++i) {
      const auto z = es.eigenvalues()(i);
      if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z))) cand.push_back(z.real());
    }
    Eigen::VectorXd d(deg);
    for (Eigen::Index n = 1; n <= deg; ++n) d(n - 1) = n * c(n);
    for (double& x : cand)
      for (int it = 0; it < 4; ++it) {
        const double dp = horner(d, x);
        if (dp == 0.0) break;
        x -= horner(c, x) / dp;
      }
  }
  for (double x : cand)
    if (x > a && x < b) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end(), [](double u, double v) { return std::abs(u - v) <= 1e-12 * std::max(1.0, std::abs(u)); }),
            out.end());
  return out;
}

double total_variation(const PiecewiseFunction<double>& f, double a, double b) {
  if (!(a < b)) return 0.0;
  double tv = 0.0;
  for (double x : f.breakpoints())
    if (x > a && x < b) tv += std::abs(f.jump(x));
  std::vector<double> cuts{a};
  for (double x : f.breakpoints())
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const auto& p = f.pieces()[f.pieces_at(0.5 * (cuts[i] + cuts[i + 1])).first];
    const Eigen::VectorXd& c = p.coefficients();
    std::vector<double> pts{cuts[i]};
    if (c.size() > 2) {
      Eigen::VectorXd d(c.size() - 1);
      for (Eigen::Index n = 1; n < c.size(); ++n) d(n - 1) = n * c(n);
      for (double r : real_roots(d, cuts[i], cuts[i + 1])) pts.push_back(r);
    }
    pts.push_back(cuts[i + 1]);
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) tv += std::abs(p(pts[k + 1]) - p(pts[k]));
  }
  return tv;
}

std::pair<double, double> bounds(const PiecewiseFunction<double>& f) {
  double hi = -std::numeric_limits<double>::infinity(), lo = -hi;
  auto visit = [&](double v) {
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  };
  const auto& br = f.breakpoints();
  const auto& pc = f.pieces();
  if (!pc.front().is_constant() || !pc.back().is_constant())
    throw std::invalid_argument("bounds need constant tails");
  visit(pc.front().constant_value());
  visit(pc.back().constant_value());
  for (std::size_t i = 1; i + 1 < pc.size(); ++i) {
    const double a = br[i - 1], b = br[i];
    const auto& p = pc[i];
    visit(p(a));
    visit(p(b));
    const Eigen::VectorXd& c = p.coefficients();
    if (c.size() > 2) {
      Eigen::VectorXd d(c.size() - 1);
      for (Eigen::Index n = 1; n < c.size(); ++n) d(n - 1) = n * c(n);
      for (double r : real_roots(d, a, b)) visit(p(r));
    }
  }
  return {hi, lo};
}

}  // namespace bvwave
