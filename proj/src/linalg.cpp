#include "bvwave/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace bvwave {

SingularEstimate top_singular_value(const LinearMap& A, const LinearMap& AH, Eigen::Index n, double rel_tol,
                                    int max_iterations, int restart) {
  if (n <= 0) throw std::invalid_argument("empty operator");
  SingularEstimate out;
  Eigen::VectorXcd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start(i) = std::complex<double>(1.0 + 0.5 * std::sin(1.3 * i), 0.25 * std::cos(0.7 * i));
  start.normalize();

  int total = 0;
  while (total < max_iterations) {
    const int m = int(std::min<Eigen::Index>(restart, n));
    Eigen::MatrixXcd Q(n, m + 1);
    Eigen::VectorXd a(m), b(m);
    Q.col(0) = start;
    int steps = 0;
    double theta = 0.0;
    Eigen::VectorXd ritz;
    bool done = false;
    for (int j = 0; j < m; ++j) {
      Eigen::VectorXcd w = AH(A(Q.col(j)));
      ++total;
      a(j) = Q.col(j).dot(w).real();
      // Full reorthogonalization, twice.
      for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).adjoint() * w);
      b(j) = w.norm();
      steps = j + 1;
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
      for (int i = 0; i < steps; ++i) {
        T(i, i) = a(i);
        if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = b(i);
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      theta = es.eigenvalues()(steps - 1);
      ritz = es.eigenvectors().col(steps - 1);
      const double residual = b(j) * std::abs(ritz(steps - 1));
      if (theta <= 0.0) {
        out.sigma = 0.0;
        out.iterations = total;
        out.converged = true;
        return out;
      }
      if (residual <= rel_tol * theta || b(j) <= 1e-300 || steps == n) {
        done = true;
        break;
      }
      Q.col(j + 1) = w / b(j);
      if (total >= max_iterations) break;
    }
    out.sigma = std::sqrt(theta);
    out.iterations = total;
    if (done) {
      out.converged = true;
      return out;
    }
    start = Q.leftCols(steps) * ritz.cast<std::complex<double>>();
    start.normalize();
  }
  return out;
}

}  // namespace bvwave
