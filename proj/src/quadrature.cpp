#include "bvwave/quadrature.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace bvwave {

namespace {

// Legendre P_n and P_n' at x by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

GaussRule build_rule(int n) {
  // Golub-Welsch for starting values, Newton on P_n to polish.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) J(k, k - 1) = J(k - 1, k) = k / std::sqrt(4.0 * k * k - 1.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J, Eigen::EigenvaluesOnly);
  GaussRule r;
  r.nodes = es.eigenvalues();
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = r.nodes(i);
    if (n > 1) {
      for (int it = 0; it < 3; ++it) {
        auto [p, dp] = legendre(n, x);
        x -= p / dp;
      }
      auto [p, dp] = legendre(n, x);
      (void)p;
      r.nodes(i) = x;
      r.weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
    } else {
      r.nodes(i) = 0.0;
      r.weights(i) = 2.0;
    }
  }
  return r;
}

Eigen::MatrixXd build_cumulative(const GaussRule& g) {
  // S = Q V^{-1}: V(i,j) = P_j(t_i), Q(i,j) = int_{-1}^{t_i} P_j.
  const Eigen::Index n = g.nodes.size();
  Eigen::MatrixXd V(n, n), Q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = g.nodes(i);
    std::vector<double> P(n + 1);
    P[0] = 1.0;
    if (n >= 1) P[1] = t;
    for (Eigen::Index k = 2; k <= n; ++k) P[k] = ((2.0 * k - 1.0) * t * P[k - 1] - (k - 1.0) * P[k - 2]) / double(k);
    for (Eigen::Index j = 0; j < n; ++j) {
      V(i, j) = P[j];
      Q(i, j) = j == 0 ? t + 1.0 : (P[j + 1] - P[j - 1]) / (2.0 * j + 1.0);
    }
  }
  return Q * V.inverse();
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1 || order > 64) throw std::invalid_argument("Gauss-Legendre order must be in [1, 64]");
  static std::array<std::unique_ptr<GaussRule>, 65> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  if (!cache[order]) cache[order] = std::make_unique<GaussRule>(build_rule(order));
  return *cache[order];
}

PanelGrid::PanelGrid(std::vector<double> edges, int order) : edges_(std::move(edges)), order_(order) {
  if (edges_.size() < 2) throw std::invalid_argument("panel grid needs at least one panel");
  for (std::size_t i = 1; i < edges_.size(); ++i)
    if (!(edges_[i] > edges_[i - 1])) throw std::invalid_argument("panel edges must increase");
  const GaussRule& g = gauss_legendre(order);
  const Eigen::Index P = panels();
  nodes_.resize(P * order);
  weights_.resize(P * order);
  for (Eigen::Index p = 0; p < P; ++p) {
    const double m = 0.5 * (edges_[p] + edges_[p + 1]), r = 0.5 * (edges_[p + 1] - edges_[p]);
    nodes_.segment(p * order, order) = (m + r * g.nodes.array()).matrix();
    weights_.segment(p * order, order) = r * g.weights;
  }
  cumulative_matrix_ = build_cumulative(g).cast<std::complex<double>>();
}

PanelGrid PanelGrid::covering(double a, double b, std::vector<double> breaks,
                              const std::function<double(double)>& max_width, int order) {
  if (!(a < b)) throw std::invalid_argument("panel grid needs a < b");
  breaks.push_back(a);
  breaks.push_back(b);
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts;
  for (double x : breaks)
    if (x >= a && x <= b && (cuts.empty() || x > cuts.back())) cuts.push_back(x);
  std::vector<double> edges{cuts.front()};
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    const double lo = cuts[s], hi = cuts[s + 1];
    const double w = max_width(0.5 * (lo + hi));
    const int n = std::max(1, int(std::ceil((hi - lo) / w - 1e-9)));
    for (int k = 1; k < n; ++k) edges.push_back(lo + (hi - lo) * k / n);
    edges.push_back(hi);
  }
  return PanelGrid(std::move(edges), order);
}

Eigen::VectorXcd PanelGrid::cumulative(const Eigen::VectorXcd& g) const {
  Eigen::VectorXcd out(g.size());
  std::complex<double> base = 0.0;
  for (Eigen::Index p = 0; p < panels(); ++p) {
    const double r = 0.5 * (edges_[p + 1] - edges_[p]);
    const auto seg = g.segment(p * order_, order_);
    out.segment(p * order_, order_) = ((r * (cumulative_matrix_ * seg)).array() + base).matrix();
    base += seg.cwiseProduct(weights_.segment(p * order_, order_)).sum();
  }
  return out;
}

Eigen::VectorXcd PanelGrid::edge_cumulative(const Eigen::VectorXcd& g) const {
  Eigen::VectorXcd out(panels() + 1);
  out(0) = 0.0;
  for (Eigen::Index p = 0; p < panels(); ++p)
    out(p + 1) = out(p) + g.segment(p * order_, order_).cwiseProduct(weights_.segment(p * order_, order_)).sum();
  return out;
}

}  // namespace bvwave
