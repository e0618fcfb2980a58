#pragma once

#include "bvwave/helmholtz.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bvwave {

/// Axis-aligned rectangle [re_min, re_max] x [im_min, im_max] in the lambda plane.
struct Rect {
  double re_min, re_max, im_min, im_max;

  bool contains(cd z) const {
    return z.real() > re_min && z.real() < re_max && z.imag() > im_min && z.imag() < im_max;
  }
  cd center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
};

/// W(lambda), dW/dlambda and the size of the two products whose difference is W.
struct WronskianValue {
  cd W, dW;
  double scale;
};
WronskianValue evaluate_wronskian(const Medium& m, cd lambda);

/// Raised when W vanishes (numerically) on the contour.
class BoundaryZero : public std::runtime_error {
 public:
  BoundaryZero(const std::string& what, Rect suggestion) : std::runtime_error(what), suggestion(suggestion) {}
  Rect suggestion;
};

struct CountOptions {
  double max_phase_step = 0.7853981633974483;  // pi/4
  double zero_threshold = 1e-9;                // |W| / scale on the contour
  int max_depth = 40;
};

/// Winding number of W around the rectangle.
int count_zeros(const Medium& m, const Rect& rect, const CountOptions& opt = {});

enum class NewtonStatus { converged, diverged, trivial_zero };

struct Pole {
  cd lambda;
  double abs_W = 0.0;       // |W(lambda)|
  double relative = 0.0;    // |W| / scale
  int iterations = 0;
  NewtonStatus status = NewtonStatus::diverged;
  bool certified = false;   // counted by the argument principle in its leaf
};

/// Newton on W from seed.  Leaving the disc of the given radius around the
/// seed, or 50 iterations without convergence, reports divergence; landing on
/// lambda = 0 (always a zero of W) reports trivial_zero.
Pole refine_pole(const Medium& m, cd seed, double radius = 1e300, int max_iterations = 50);

struct SearchOptions {
  CountOptions count;
  double min_size = 1e-3;  // stop subdividing below this side length
  int max_depth = 16;
};

struct ResonanceSet {
  std::vector<Rect> regions;
  std::vector<Pole> poles;                              // sorted by Re, then Im
  std::vector<std::pair<Rect, int>> count_certificate;  // leaf rectangles and winding numbers
  bool all_certified() const;
};

/// Zeros of W in the rectangles.  lambda = 0 is reported (exactly, without
/// root finding) when it lies inside a rectangle.
ResonanceSet find_resonances(const Medium& m, const std::vector<Rect>& regions, const SearchOptions& opt = {});

/// [0.05, 25] x [-3, -1e-4] and its mirror image under lambda -> -conj(lambda).
std::vector<Rect> default_search_region();

struct ResidueRow {
  cd lambda;
  double error;  // || lambda chi R chi f - (i / (2 sqrt(alpha0 beta0))) <chi, f>_beta chi ||_{L^2}
};

/// Leading-order behaviour of chi R(lambda) chi near the pole at 0, for f
/// smooth between f_breaks.
std::vector<ResidueRow> residue_at_zero_check(const Medium& m, const PiecewiseFunction<double>& chi,
                                              const std::function<double(double)>& f,
                                              const std::vector<cd>& lambdas, const std::vector<double>& f_breaks = {});

/// Smallest |Im lambda| over the nonzero poles found in the regions.
double decay_rate_prediction(const Medium& m, const std::vector<Rect>& regions, const SearchOptions& opt = {});

}  // namespace bvwave
