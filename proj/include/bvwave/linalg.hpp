#pragma once

#include <Eigen/Dense>

#include <functional>

namespace bvwave {

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct SingularEstimate {
  double sigma = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest singular value of A from matrix-free products with A and A^H:
/// Lanczos on A^H A with full reorthogonalization, restarted from the Ritz
/// vector every `restart` steps.  Converged when the Ritz residual is below
/// rel_tol times the Ritz value.
SingularEstimate top_singular_value(const LinearMap& A, const LinearMap& AH, Eigen::Index n, double rel_tol = 1e-8,
                                    int max_iterations = 600, int restart = 60);

}  // namespace bvwave
