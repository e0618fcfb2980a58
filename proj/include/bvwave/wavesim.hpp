#pragma once

#include "bvwave/medium.hpp"

#include <Eigen/Core>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bvwave {

/// Cauchy data w(.,0) = w0, w_t(.,0) = w1, both compactly supported.
struct WaveData {
  PiecewiseFunction<double> w0{0.0}, w1{0.0};
};

/// Smallest R with both data functions vanishing outside [-R, R].
double data_radius(const WaveData& d);

/// (2 sqrt(alpha0 beta0))^{-1} int w1 beta.
double w_infinity(const PiecewiseFunction<double>& w1, const PiecewiseFunction<double>& beta, double alpha0, double beta0);

/// Staggered leapfrog for beta w_tt = (alpha w_x)_x on nodes x_i = i dx,
/// |x_i| <= L.  Holds w at the integer level n and v = w_t at level n - 1/2.
class WaveState {
 public:
  /// Grid for a run up to time T: dt = T / ceil(T / (cfl dx sqrt(inf beta / sup alpha))),
  /// L defaults to R_data + R0 + c_max T plus a unit margin.  Every coefficient
  /// jump must sit on a node.
  WaveState(const Medium& m, const WaveData& data, double dx, double T, double cfl = 0.9, double L = 0.0);

  void step();
  void advance(long steps) {
    for (long i = 0; i < steps; ++i) step();
  }

  const Medium& medium() const { return m_; }
  double dx() const { return dx_; }
  double dt() const { return dt_; }
  double t() const { return double(n_) * dt_; }
  long steps() const { return n_; }
  long steps_to(double T) const;
  double L() const { return double(half_) * dx_; }
  Eigen::Index size() const { return w_.size(); }
  double x(Eigen::Index i) const { return double(i - half_) * dx_; }
  Eigen::Index index_of(double x) const;

  const Eigen::VectorXd& w() const { return w_; }
  /// w_t at level n - 1/2.
  const Eigen::VectorXd& v_half() const { return v_; }
  /// w_t at the integer level, the mean of the two adjacent half levels.
  Eigen::VectorXd v_integer() const;
  const Eigen::VectorXd& beta_nodes() const { return beta_; }
  const Eigen::VectorXd& alpha_faces() const { return alpha_; }

  /// Linear interpolation of w at x.
  double sample(double x) const;

  /// D_-(alpha D_+ w) with the ends held fixed.
  Eigen::VectorXd apply_stiffness(const Eigen::VectorXd& w) const;

 private:
  Medium m_;
  double dx_, dt_;
  Eigen::Index half_;
  long n_ = 0;
  Eigen::VectorXd w_, v_, beta_, alpha_;
};

/// 1/2 <beta v^{n+1/2}, v^{n-1/2}> + 1/2 sum alpha (D_+ w)^2 dx: exactly
/// conserved by the scheme.
double global_energy(const WaveState& s);
/// 1/2 sum beta v_n^2 dx + 1/2 sum alpha (D_+ w)^2 dx with the integer-level v.
double diagnostic_energy(const WaveState& s);

struct LocalEnergy {
  double h1_dist, l2_dtw;
};
/// H^1 distance of w to the constant w_inf and L^2 norm of w_t over [-R1, R1].
LocalEnergy local_energy(const WaveState& s, double R1, double w_inf);

/// H^1 norm over [-R1, R1] of the grid-scale part of w - w_inf (w minus
/// eight passes of the [1, 2, 1]/4 filter).
double grid_noise(const WaveState& s, double R1, double w_inf);

class FitRefused : public std::runtime_error {
 public:
  FitRefused(const std::string& what, std::pair<double, double> suggestion)
      : std::runtime_error(what), suggestion(suggestion) {}
  std::pair<double, double> suggestion;
};

struct DecayFit {
  double c, C, residual;
  double T0, T1;
};

/// Least squares of log(series) against t on [T0, T1].  Refuses windows
/// reaching the floor 1e-12 series[0], tails whose series is below 10 x noise
/// (when given), and windows without a decaying trend.
DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& series, double T0, double T1,
                   const std::vector<double>& noise = {});

struct SimulationOptions {
  double dx = 0.005;
  double T = 60.0;
  double R1 = 3.0;
  double cfl = 0.9;
  double sample_interval = 0.05;
  double L = 0.0;                      // 0: smallest reflection-free domain
  std::optional<double> fit_T0, fit_T1;  // default: 2 (R1 + R0) / c_min, last time with SNR >= 10
};

struct DecayReport {
  explicit DecayReport(WaveState s) : final_state(std::move(s)) {}

  std::vector<double> times, h1_distance, l2_dtw, global_energy, noise;
  double w_infinity = 0.0;
  std::optional<DecayFit> fit;
  std::string fit_refusal;
  WaveState final_state;

  double energy_drift() const;
};

DecayReport simulate(const Medium& m, const WaveData& data, const SimulationOptions& opt);

/// Default fit window for a decay series: starts after the direct transit
/// 2 (R1 + R0) / c_min and ends at the last sample of the run of samples with
/// h1 >= 10 x noise.
std::pair<double, double> default_fit_window(const DecayReport& r, double R1, const Medium& m);

/// Medium (alpha(sqrt(alpha0) x)/alpha0, beta(sqrt(alpha0) x)/beta0) with unit tails.
Medium unit_tail_medium(const Medium& m);
/// u0 = w0(sqrt(alpha0) x), u1 = sqrt(beta0) w1(sqrt(alpha0) x).
WaveData unit_tail_data(const Medium& m, const WaveData& d);

struct ScalingCheck {
  double discrepancy;      // max over probes of |u(x, T/sqrt(beta0)) - w(sqrt(alpha0) x, T)|
  double w_inf_general, w_inf_unit;
};
/// Runs the general medium to time T and the unit-tail medium to T / sqrt(beta0)
/// with the same dx, comparing at probes given in the unit-tail coordinates.
ScalingCheck scaling_reduction_check(const Medium& m, const WaveData& d, double dx, double T,
                                     const std::vector<double>& probes, double cfl = 0.9);

}  // namespace bvwave
