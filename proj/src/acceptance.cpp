#include "bvwave/acceptance.hpp"

#include "bvwave/bv_check.hpp"
#include "bvwave/helmholtz.hpp"
#include "bvwave/registry.hpp"
#include "bvwave/resonances.hpp"
#include "bvwave/wavesim.hpp"
#include "bvwave/weight.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

namespace bvwave {

namespace {

using PF = PiecewiseFunction<double>;

constexpr std::uint64_t kSeed = 20240611;

// 1: BV calculus
constexpr int kBVPairs = 200;
constexpr double kBVTol = 1e-10;
constexpr double kBVSeconds = 10.0;
// 2: weight
constexpr int kWeightMedia = 50;
constexpr int kWeightGrid = 1000;
constexpr double kWeightSeconds = 10.0;
// 3: high-frequency cutoff resolvent
constexpr double kPlateauFactor = 2.0;
constexpr double kSlopeTol = 0.1;
constexpr double kRefineTol = 0.01;
constexpr double kSweepSeconds = 300.0;
// 4: semiclassical
constexpr double kEpsAgreement = 1e-3;
// 5: resonances
constexpr double kPoleTol = 1e-8;
constexpr int kSubrects = 10;
constexpr double kResonanceSeconds = 60.0;
// 6: residue law
constexpr double kRatioLo = 0.4, kRatioHi = 0.6;
constexpr double kResidueSeconds = 60.0;
// 7: wave decay
constexpr double kDecayDx = 0.0025, kDecayT = 60.0, kDecayR1 = 3.0;
constexpr double kDriftTol = 1e-6;
constexpr double kRateTol = 0.1;
constexpr double kLimitTol = 1e-2;
constexpr double kWaveSeconds = 300.0;
// 8: scaling reduction
constexpr double kScaleDx1 = 0.0025, kScaleTol1 = 5e-4;
constexpr double kScaleDx2 = 0.00125, kScaleTol2 = 1.3e-4;
constexpr double kScaleT = 4.0;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

struct Builder {
  CriterionResult r;
  void check(bool ok, const std::string& line) {
    r.passed = r.passed && ok;
    r.details.push_back((ok ? "ok   " : "FAIL ") + line);
  }
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= double(x.size());
  my /= double(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

void bv_suite(Builder& b) {
  const BVCheckResult r = run_bv_checks(kSeed, kBVPairs);
  b.check(r.ftc <= kBVTol, fmt("endpoint identity (ftc): %.2e <= %.0e", r.ftc, kBVTol));
  b.check(r.product <= kBVTol && r.product_vs_direct <= kBVTol,
          fmt("product rule: %.2e, measure-wise %.2e <= %.0e", r.product, r.product_vs_direct, kBVTol));
  b.check(r.chain <= kBVTol && r.chain_atoms <= kBVTol,
          fmt("chain rule: %.2e, atoms %.2e <= %.0e", r.chain, r.chain_atoms, kBVTol));
  b.check(r.ibp <= kBVTol, fmt("integration by parts: %.2e <= %.0e", r.ibp, kBVTol));
  b.check(r.pairs == kBVPairs, fmt("%d random pairs", r.pairs));
}

void weight_suite(Builder& b) {
  const WeightCheckResult r = run_weight_checks(kSeed, kWeightMedia, {0.5, 1.0, 2.0}, kWeightGrid);
  b.check(r.max_A < 1.0 && r.max_B < 1.0, fmt("A, B in [0, 1): max A %.4f, max B %.4f", r.max_A, r.max_B));
  b.check(r.bound_failures == 0, fmt("closed-form recursion bound: %d failures", r.bound_failures));
  b.check(r.margin_failures == 0, fmt("lower-bound margins: %d failures over %zu atoms, %zu densities (worst %.2e)",
                                      r.margin_failures, r.atoms_checked, r.densities_checked, r.worst_relative_margin));
  b.check(r.cases == 3 * (kWeightMedia + 1), fmt("%d weight problems (slab + %d random, 3 energies)", r.cases, kWeightMedia));
  if (!r.first_failure.empty()) b.r.details.push_back("     first failure: " + r.first_failure);
}

void resolvent_suite(Builder& b) {
  const Problem p = registry("slab");
  const PF chi = plateau_cutoff(2.0, 3.0);
  const std::vector<double> re{4, 8, 16, 32, 64}, im{-0.05, 0.0, 0.05};
  const auto rows = resolvent_sweep(p.medium, re, im, chi);
  std::vector<double> scaled;
  for (const auto& r : rows) scaled.push_back(r.norm_times_relambda);
  const double med = median(scaled);
  const double hi = *std::max_element(scaled.begin(), scaled.end()), lo = *std::min_element(scaled.begin(), scaled.end());
  b.check(hi <= kPlateauFactor * med && lo >= med / kPlateauFactor,
          fmt("|Re lambda| * norm in [%.3f, %.3f], median %.3f (factor %.0f)", lo, hi, med, kPlateauFactor));
  for (double y : im) {
    std::vector<double> x, v;
    for (const auto& r : rows)
      if (r.im_lambda == y) {
        x.push_back(r.re_lambda);
        v.push_back(r.norm_times_relambda);
      }
    const double s = loglog_slope(x, v);
    b.check(std::abs(s) < kSlopeTol, fmt("Im lambda = %+.2f: log-log slope %+.4f (|m| < %.1f)", y, s, kSlopeTol));
  }
  NormOptions fine;
  fine.points_per_wavelength *= 2;
  const double coarse = cutoff_resolvent_norm(p.medium, 64.0, chi).norm, refined = cutoff_resolvent_norm(p.medium, 64.0, chi, fine).norm;
  const double change = std::abs(refined - coarse) / refined;
  b.check(change < kRefineTol, fmt("grid refinement at Re lambda = 64: change %.2e < %.0e", change, kRefineTol));
}

void semiclassical_suite(Builder& b) {
  const PF V = PF::indicator(-1.0, 1.0, -3.0, 0.0);
  const std::vector<double> hs{0.2, 0.1, 0.05, 0.025, 0.0125};
  const auto rows = semiclassical_sweep(PF(1.0), V, 1.0, 1.0, hs, {0.0, 1e-6});
  std::vector<double> scaled;
  for (const auto& r : rows)
    if (r.eps == 0.0) scaled.push_back(r.h_times_norm);
  const double med = median(scaled);
  const double hi = *std::max_element(scaled.begin(), scaled.end()), lo = *std::min_element(scaled.begin(), scaled.end());
  b.check(hi <= kPlateauFactor * med && lo >= med / kPlateauFactor,
          fmt("h * weighted norm in [%.4f, %.4f], median %.4f (factor %.0f)", lo, hi, med, kPlateauFactor));
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) worst = std::max(worst, std::abs(rows[i].norm - rows[i + 1].norm) / rows[i].norm);
  b.check(worst < kEpsAgreement, fmt("eps = 0 vs eps = 1e-6: relative difference %.2e < %.0e", worst, kEpsAgreement));
}

void resonance_suite(Builder& b) {
  const Problem p = registry("slab");
  const double gap = std::log(3.0) / 4.0, step = std::numbers::pi / 4.0;
  auto condition = [&](double re) { return cd(step * std::round(re / step), -gap); };
  const std::vector<Rect> regions = default_search_region();
  const ResonanceSet set = find_resonances(p.medium, regions);

  const Pole* first = nullptr;
  for (const auto& q : set.poles)
    if (q.lambda.real() > 0 && (!first || q.lambda.real() < first->lambda.real())) first = &q;
  b.check(first && std::abs(first->lambda - cd(step, -gap)) < kPoleTol,
          fmt("first pole %.12f %+.12fi, error %.1e < %.0e", first ? first->lambda.real() : NAN,
              first ? first->lambda.imag() : NAN, first ? std::abs(first->lambda - cd(step, -gap)) : NAN, kPoleTol));
  double worst = 0.0;
  for (const auto& q : set.poles) worst = std::max(worst, std::abs(q.lambda - condition(q.lambda.real())));
  const int expected = 2 * int(std::floor(25.0 / step));
  b.check(int(set.poles.size()) == expected && worst < kPoleTol && set.all_certified(),
          fmt("%zu certified poles in the default region (closed form: %d), max distance to e^{8i lambda} = 9 roots %.1e",
              set.poles.size(), expected, worst));

  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int agree = 0;
  std::string mismatch;
  for (int s = 0; s < kSubrects; ++s) {
    const double x0 = 0.05 + 20.0 * u(rng), y0 = -3.0 + 2.5 * u(rng);
    Rect r{x0, x0 + 0.5 + 3.5 * u(rng), y0, std::min(-1e-4, y0 + 0.2 + 2.7 * u(rng))};
    int count;
    try {
      count = count_zeros(p.medium, r);
    } catch (const BoundaryZero& e) {
      r = e.suggestion;
      count = count_zeros(p.medium, r);
    }
    int inside = 0;
    for (const auto& q : set.poles) inside += r.contains(q.lambda);
    if (count == inside) {
      ++agree;
    } else if (mismatch.empty()) {
      mismatch = fmt(" (first mismatch [%.3f, %.3f] x [%.3f, %.3f]: %d vs %d)", r.re_min, r.re_max, r.im_min, r.im_max,
                     count, inside);
    }
  }
  b.check(agree == kSubrects, fmt("argument principle vs refined poles: %d / %d random subrectangles agree", agree, kSubrects) + mismatch);
  const int upper = count_zeros(p.medium, {-20.0, 20.0, 1e-3, 20.0});
  b.check(upper == 0, fmt("zeros in [-20, 20] x [1e-3, 20]i: %d", upper));
}

void residue_suite(Builder& b) {
  const Problem p = registry("slab");
  std::vector<cd> lambdas;
  for (int k = 4; k <= 10; ++k) lambdas.push_back(cd(0.0, std::ldexp(1.0, -k)));
  const auto rows = residue_at_zero_check(p.medium, plateau_cutoff(2.0, 3.0), [](double x) { return 1.0 + 0.5 * x; }, lambdas);
  double lo = INFINITY, hi = 0.0;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double q = rows[i + 1].error / rows[i].error;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  }
  b.check(lo >= kRatioLo && hi <= kRatioHi,
          fmt("e_{k+1}/e_k in [%.4f, %.4f] for k = 4..10 (e_4 = %.3e, e_10 = %.3e)", lo, hi, rows.front().error, rows.back().error));
}

void wave_suite(Builder& b) {
  const Problem slab = registry("slab"), free = registry("free");
  SimulationOptions opt;
  opt.dx = kDecayDx;
  opt.T = kDecayT;
  opt.R1 = kDecayR1;
  const DecayReport r = simulate(slab.medium, slab.data, opt);
  b.check(r.energy_drift() < kDriftTol, fmt("global energy drift %.2e < %.0e", r.energy_drift(), kDriftTol));
  const double gap = decay_rate_prediction(slab.medium, default_search_region());
  if (r.fit) {
    const double rel = r.fit->c / gap - 1.0;
    b.check(std::abs(rel) < kRateTol, fmt("fitted c = %.5f on [%.1f, %.1f] vs gap %.5f: %+.2f%%", r.fit->c, r.fit->T0,
                                          r.fit->T1, gap, 100.0 * rel));
  } else {
    b.check(false, "fit refused: " + r.fit_refusal);
  }
  const double w0T = r.final_state.w()(r.final_state.index_of(0.0));
  b.check(std::abs(w0T - 4.0) < kLimitTol && std::abs(r.w_infinity - 4.0) < 1e-12,
          fmt("w(0, T) = %.8f, w_inf = %.6f, |diff| < %.0e", w0T, r.w_infinity, kLimitTol));
  const DecayReport f = simulate(free.medium, free.data, opt);
  const double f0T = f.final_state.w()(f.final_state.index_of(0.0));
  b.check(!f.fit && std::abs(f0T - f.w_infinity) < kLimitTol,
          fmt("free control: w(0, T) = %.8f vs w_inf = %.1f, fit refused: %s", f0T, f.w_infinity, f.fit ? "no" : "yes"));
}

void scaling_suite(Builder& b) {
  const Medium m(PF(4.0), PF::indicator(-1.0, 1.0, 4.0, 1.0));
  const PF::Piece q = PF::Piece::polynomial({1.0, 0.0, -1.0});
  const WaveData d{PF(0.0), PF({-1.0, 1.0}, {PF::Piece(0.0), q * q * q, PF::Piece(0.0)})};
  std::vector<double> probes;
  for (int i = 0; i <= 200; ++i) probes.push_back(-2.5 + 5.0 * i / 200.0);
  const ScalingCheck c1 = scaling_reduction_check(m, d, kScaleDx1, kScaleT, probes);
  const ScalingCheck c2 = scaling_reduction_check(m, d, kScaleDx2, kScaleT, probes);
  b.check(c1.discrepancy < kScaleTol1, fmt("dx = %.5f: max |u - w| = %.2e < %.1e", kScaleDx1, c1.discrepancy, kScaleTol1));
  b.check(c2.discrepancy < kScaleTol2, fmt("dx = %.5f: max |u - w| = %.2e < %.1e (ratio %.2f)", kScaleDx2, c2.discrepancy,
                                           kScaleTol2, c1.discrepancy / c2.discrepancy));
  b.check(std::abs(c1.w_inf_general - c1.w_inf_unit) < 1e-12,
          fmt("w_inf both ways: %.12f vs %.12f", c1.w_inf_general, c1.w_inf_unit));
}

struct Entry {
  int id;
  const char* title;
  double limit;
  std::function<void(Builder&)> run;
};

const std::vector<Entry>& entries() {
  static const std::vector<Entry> s{
      {1, "BV calculus identities", kBVSeconds, bv_suite},
      {2, "Carleman weight construction", kWeightSeconds, weight_suite},
      {3, "High-frequency cutoff resolvent sweep", kSweepSeconds, resolvent_suite},
      {4, "Semiclassical weighted resolvent sweep", kSweepSeconds, semiclassical_suite},
      {5, "Slab resonances", kResonanceSeconds, resonance_suite},
      {6, "Residue law at zero", kResidueSeconds, residue_suite},
      {7, "Local energy decay", kWaveSeconds, wave_suite},
      {8, "Scaling reduction", kWaveSeconds, scaling_suite},
  };
  return s;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const std::vector<int>& which) {
  std::vector<CriterionResult> out;
  for (int id : which) {
    const auto it = std::find_if(entries().begin(), entries().end(), [&](const Entry& s) { return s.id == id; });
    if (it == entries().end()) throw std::invalid_argument("no acceptance criterion " + std::to_string(id));
    Builder b{{id, it->title, true, {}, 0.0}};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      it->run(b);
    } catch (const std::exception& e) {
      b.check(false, std::string("exception: ") + e.what());
    }
    b.r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    b.check(b.r.seconds < it->limit, fmt("runtime %.1f s < %.0f s", b.r.seconds, it->limit));
    out.push_back(std::move(b.r));
  }
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << ": " << r.title << "\n";
  for (const auto& d : r.details) os << "        " << d << "\n";
  return os.str();
}

}  // namespace bvwave
