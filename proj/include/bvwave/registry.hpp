#pragma once

#include "bvwave/wavesim.hpp"

#include <string>

namespace bvwave {

struct Problem {
  std::string name;
  Medium medium;
  WaveData data;
};

/// Canonical media: "free", "slab" (beta = 4 on (-1, 1)), "two-slab" (beta = 4
/// on (-2, -1) and (1, 2)), "alpha-jump" (alpha = 2 on (-1, 1)) and
/// "random-K-jumps(SEED)" (K interfaces on the 1/8 lattice in [-2, 2]).  The
/// data are w0 = 0, w1 = 1 on (-1, 1).
Problem registry(const std::string& name);

}  // namespace bvwave
