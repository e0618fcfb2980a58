#include "bvwave/registry.hpp"

#include <algorithm>
#include <random>
#include <regex>
#include <set>
#include <stdexcept>

namespace bvwave {

namespace {

using PF = PiecewiseFunction<double>;

// Uniform in [0, 1) from the raw engine output, identical on every platform.
double unit(std::mt19937_64& rng) { return double(rng() >> 11) * 0x1.0p-53; }

Medium random_jumps(int k, std::uint64_t seed) {
  if (k < 1 || k > 32) throw std::invalid_argument("random media take 1 to 32 jumps");
  std::mt19937_64 rng(seed);
  std::set<int> slots;
  while (int(slots.size()) < k) slots.insert(int(unit(rng) * 33.0) - 16);
  std::vector<double> b;
  for (int s : slots) b.push_back(s / 8.0);
  std::vector<double> a{1.0}, be{1.0};
  for (int i = 1; i < k; ++i) {
    a.push_back(0.5 + std::round(40.0 * unit(rng)) / 16.0);
    be.push_back(0.5 + std::round(40.0 * unit(rng)) / 16.0);
  }
  a.push_back(1.0);
  be.push_back(1.0);
  return Medium(PF::piecewise_constant(b, a), PF::piecewise_constant(b, be));
}

}  // namespace

Problem registry(const std::string& name) {
  const WaveData data{PF(0.0), PF::indicator(-1.0, 1.0)};
  if (name == "free") return {name, Medium(PF(1.0), PF(1.0)), data};
  if (name == "slab") return {name, Medium(PF(1.0), PF::indicator(-1.0, 1.0, 4.0, 1.0)), data};
  if (name == "two-slab")
    return {name, Medium(PF(1.0), PF::piecewise_constant({-2.0, -1.0, 1.0, 2.0}, {1.0, 4.0, 1.0, 4.0, 1.0})), data};
  if (name == "alpha-jump") return {name, Medium(PF::indicator(-1.0, 1.0, 2.0, 1.0), PF(1.0)), data};
  static const std::regex random(R"(random-(\d+)-jumps\((\d+)\))");
  std::smatch m;
  if (std::regex_match(name, m, random)) return {name, random_jumps(std::stoi(m[1]), std::stoull(m[2])), data};
  throw std::invalid_argument("unknown medium \"" + name +
                              "\" (known: free, slab, two-slab, alpha-jump, random-K-jumps(SEED))");
}

}  // namespace bvwave
