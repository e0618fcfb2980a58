#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

namespace bvwave {

struct GaussRule {
  Eigen::VectorXd nodes;    // on [-1, 1], ascending
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule of the given order (1..64), cached.
const GaussRule& gauss_legendre(int order);

namespace detail {

// Gauss-Legendre sums of f and |f| on [lo, hi].
template <class Scalar, class F>
std::pair<Scalar, double> gauss_sum(const F& f, double lo, double hi) {
  const GaussRule& g = gauss_legendre(20);
  Scalar s(0);
  double m = 0.0;
  const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
  for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
    const Scalar v = f(c + r * g.nodes(i));
    s += g.weights(i) * v;
    m += g.weights(i) * std::abs(v);
  }
  return {Scalar(r) * s, r * m};
}

template <class Scalar, class F>
Scalar adapt(const F& f, double a, double b, Scalar whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const auto [left, ml] = gauss_sum<Scalar>(f, a, mid);
  const auto [right, mr] = gauss_sum<Scalar>(f, mid, b);
  const Scalar halves = left + right;
  const double err = std::abs(halves - whole);
  // The second test is the rounding floor of the sums themselves.
  if (depth >= 30 || err <= tol || err <= 1e-14 * (ml + mr)) return halves;
  return adapt<Scalar>(f, a, mid, left, tol, depth + 1) + adapt<Scalar>(f, mid, b, right, tol, depth + 1);
}

}  // namespace detail

/// Adaptive Gauss-Legendre integral of a smooth function on [a, b], accurate to
/// rel_tol times the integral of |f|.
template <class Scalar, class F>
Scalar integrate_adaptive(const F& f, double a, double b, double rel_tol = 1e-15) {
  const auto [whole, mag] = detail::gauss_sum<Scalar>(f, a, b);
  return detail::adapt<Scalar>(f, a, b, whole, rel_tol * mag, 0);
}

/// Composite Gauss-Legendre panels on [edges.front(), edges.back()].
class PanelGrid {
 public:
  PanelGrid(std::vector<double> edges, int order);

  /// Panels cover [a, b], include every break inside, and each panel is at
  /// most max_width(midpoint of its segment) wide.
  static PanelGrid covering(double a, double b, std::vector<double> breaks,
                            const std::function<double(double)>& max_width, int order);

  const std::vector<double>& edges() const { return edges_; }
  int order() const { return order_; }
  Eigen::Index panels() const { return Eigen::Index(edges_.size()) - 1; }
  Eigen::Index size() const { return nodes_.size(); }
  const Eigen::VectorXd& nodes() const { return nodes_; }
  const Eigen::VectorXd& weights() const { return weights_; }

  /// Running integral from the left end to each node, spectral within a panel.
  Eigen::VectorXcd cumulative(const Eigen::VectorXcd& g) const;
  /// Running integral from the left end to each panel edge.
  Eigen::VectorXcd edge_cumulative(const Eigen::VectorXcd& g) const;

 private:
  std::vector<double> edges_;
  int order_;
  Eigen::VectorXd nodes_, weights_;
  Eigen::MatrixXcd cumulative_matrix_;  // on [-1, 1]
};

}  // namespace bvwave
