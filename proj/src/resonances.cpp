#include "bvwave/resonances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace bvwave {

WronskianValue evaluate_wronskian(const Medium& m, cd lambda) {
  const OutgoingPair<Jet> sol(wave_layers(m, Jet::variable(lambda)));
  const double x = m.interfaces().empty() ? 0.0 : m.interfaces().front();
  const Cauchy<Jet> a = sol.minus(x), b = sol.plus(x);
  const Jet W = a(0) * b(1) - a(1) * b(0);
  const double scale = std::abs(a(0).v * b(1).v) + std::abs(a(1).v * b(0).v);
  return {W.v, W.d, scale};
}

namespace {

struct ContourWalker {
  const Medium& m;
  const Rect& rect;
  const CountOptions& opt;

  cd value(cd z) const {
    const WronskianValue w = evaluate_wronskian(m, z);
    if (!(std::abs(w.W) > opt.zero_threshold * w.scale)) {
      std::ostringstream os;
      os << "W vanishes near " << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag())
         << "i on the contour; move the rectangle edges";
      const double d = 1e-3 * std::max(rect.width(), rect.height());
      throw BoundaryZero(os.str(), Rect{rect.re_min - 0.37 * d, rect.re_max + 0.61 * d, rect.im_min - 0.53 * d,
                                        rect.im_max + 0.29 * d});
    }
    return w.W;
  }

  // Total change of arg W along the segment, split until each step turns by
  // less than max_phase_step.
  double phase(cd z0, cd w0, cd z1, cd w1, int depth) const {
    const double d = std::arg(w1 / w0);
    if (std::abs(d) < opt.max_phase_step) return d;
    if (depth >= opt.max_depth) {
      const cd mid = 0.5 * (z0 + z1);
      std::ostringstream os;
      os << "phase of W unresolved near " << mid.real() << ", " << mid.imag();
      throw BoundaryZero(os.str(), rect);
    }
    const cd zm = 0.5 * (z0 + z1);
    const cd wm = value(zm);
    return phase(z0, w0, zm, wm, depth + 1) + phase(zm, wm, z1, w1, depth + 1);
  }

  double edge(cd a, cd b) const {
    // Initial sampling proportional to how fast the layer phases turn.
    const double travel = 2.0 * std::max(m.R0(), 1.0) / m.c_min();
    const int n = std::max(8, int(std::ceil(std::abs(b - a) * travel * 2.0)));
    double total = 0.0;
    cd z0 = a, w0 = value(a);
    for (int i = 1; i <= n; ++i) {
      const cd z1 = a + (b - a) * (double(i) / n);
      const cd w1 = value(z1);
      total += phase(z0, w0, z1, w1, 0);
      z0 = z1;
      w0 = w1;
    }
    return total;
  }
};

}  // namespace

int count_zeros(const Medium& m, const Rect& rect, const CountOptions& opt) {
  if (!(rect.width() > 0.0 && rect.height() > 0.0)) throw std::invalid_argument("empty rectangle");
  const ContourWalker w{m, rect, opt};
  const cd c0(rect.re_min, rect.im_min), c1(rect.re_max, rect.im_min), c2(rect.re_max, rect.im_max),
      c3(rect.re_min, rect.im_max);
  const double total = w.edge(c0, c1) + w.edge(c1, c2) + w.edge(c2, c3) + w.edge(c3, c0);
  const double turns = total / (2.0 * std::numbers::pi);
  const double n = std::round(turns);
  if (std::abs(turns - n) > 1e-6) throw BoundaryZero("winding number is not an integer", rect);
  return int(n);
}

Pole refine_pole(const Medium& m, cd seed, double radius, int max_iterations) {
  Pole p;
  cd z = seed;
  for (int it = 1; it <= max_iterations; ++it) {
    const WronskianValue w = evaluate_wronskian(m, z);
    if (w.dW == cd(0.0)) break;
    const cd step = w.W / w.dW;
    z -= step;
    p.iterations = it;
    if (!(std::abs(z - seed) <= radius) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(z))) {
      const WronskianValue f = evaluate_wronskian(m, z);
      p.lambda = z;
      p.abs_W = std::abs(f.W);
      p.relative = f.scale > 0.0 ? p.abs_W / f.scale : 0.0;
      if (std::abs(z) < 1e-8) {
        p.lambda = 0.0;
        p.status = NewtonStatus::trivial_zero;
      } else {
        p.status = p.relative < 1e-10 ? NewtonStatus::converged : NewtonStatus::diverged;
      }
      return p;
    }
  }
  p.lambda = z;
  p.status = NewtonStatus::diverged;
  if (std::isfinite(z.real()) && std::isfinite(z.imag())) {
    const WronskianValue f = evaluate_wronskian(m, z);
    p.abs_W = std::abs(f.W);
    p.relative = f.scale > 0.0 ? p.abs_W / f.scale : 0.0;
  }
  return p;
}

bool ResonanceSet::all_certified() const {
  return std::all_of(poles.begin(), poles.end(), [](const Pole& p) { return p.certified; });
}

namespace {

bool same_point(cd a, cd b) { return std::abs(a - b) <= 1e-8 * std::max(1.0, std::abs(a)); }

class Searcher {
 public:
  Searcher(const Medium& m, const SearchOptions& opt) : m_(m), opt_(opt) {}

  void search(const Rect& r, int count, int depth, ResonanceSet& out) {
    if (count == 0) return;
    const double size = std::max(r.width(), r.height());
    std::vector<Pole> found;
    if (count == 1 || size < opt_.min_size || depth >= opt_.max_depth) found = leaf_roots(r);
    if (int(found.size()) == count || size < opt_.min_size || depth >= opt_.max_depth) {
      const bool ok = int(found.size()) == count;
      for (auto& p : found) {
        p.certified = ok;
        out.poles.push_back(p);
      }
      out.count_certificate.emplace_back(r, count);
      return;
    }
    for (double f : {0.5, 0.4713, 0.5291, 0.4427, 0.5573}) {
      const double xm = r.re_min + f * r.width(), ym = r.im_min + (1.0 - f) * r.height();
      const Rect kids[4] = {{r.re_min, xm, r.im_min, ym}, {xm, r.re_max, r.im_min, ym},
                            {r.re_min, xm, ym, r.im_max}, {xm, r.re_max, ym, r.im_max}};
      int counts[4];
      try {
        for (int i = 0; i < 4; ++i) counts[i] = count_zeros(m_, kids[i], opt_.count);
      } catch (const BoundaryZero&) {
        continue;
      }
      if (counts[0] + counts[1] + counts[2] + counts[3] != count) continue;
      for (int i = 0; i < 4; ++i) search(kids[i], counts[i], depth + 1, out);
      return;
    }
    // Every split ran into a zero: give up on this rectangle.
    for (auto& p : leaf_roots(r)) out.poles.push_back(p);
    out.count_certificate.emplace_back(r, count);
  }

 private:
  std::vector<Pole> leaf_roots(const Rect& r) const {
    std::vector<Pole> roots;
    auto add = [&](const Pole& p) {
      for (const auto& q : roots)
        if (same_point(q.lambda, p.lambda)) return;
      roots.push_back(p);
    };
    if (r.contains(0.0)) {
      Pole zero;
      zero.lambda = 0.0;
      zero.status = NewtonStatus::trivial_zero;
      add(zero);
    }
    const cd c = r.center();
    const double hw = 0.25 * r.width(), hh = 0.25 * r.height();
    const double radius = 2.0 * std::hypot(r.width(), r.height());
    for (cd seed : {c, c + cd(hw, hh), c + cd(-hw, hh), c + cd(hw, -hh), c + cd(-hw, -hh)}) {
      const Pole p = refine_pole(m_, seed, radius);
      if (p.status == NewtonStatus::converged && r.contains(p.lambda)) add(p);
    }
    return roots;
  }

  const Medium& m_;
  const SearchOptions& opt_;
};

}  // namespace

ResonanceSet find_resonances(const Medium& m, const std::vector<Rect>& regions, const SearchOptions& opt) {
  ResonanceSet out;
  out.regions = regions;
  Searcher s(m, opt);
  for (const auto& r : regions) s.search(r, count_zeros(m, r, opt.count), 0, out);
  std::sort(out.poles.begin(), out.poles.end(), [](const Pole& a, const Pole& b) {
    if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

std::vector<Rect> default_search_region() { return {{0.05, 25.0, -3.0, -1e-4}, {-25.0, -0.05, -3.0, -1e-4}}; }

std::vector<ResidueRow> residue_at_zero_check(const Medium& m, const PiecewiseFunction<double>& chi,
                                              const std::function<double(double)>& f,
                                              const std::vector<cd>& lambdas, const std::vector<double>& f_breaks) {
  const auto& cb = chi.breakpoints();
  if (cb.empty() || !chi.pieces().front().is_zero() || !chi.pieces().back().is_zero())
    throw std::invalid_argument("cutoff must be compactly supported");
  const double a = cb.front(), b = cb.back();
  std::vector<double> breaks = m.interfaces();
  breaks.insert(breaks.end(), cb.begin(), cb.end());
  breaks.insert(breaks.end(), f_breaks.begin(), f_breaks.end());
  std::vector<double> inner;
  for (double x : breaks)
    if (x > a && x < b) inner.push_back(x);
  const PanelGrid grid = PanelGrid::covering(a, b, inner, [](double) { return 0.25; }, 16);
  const Eigen::VectorXd& xs = grid.nodes();
  const Eigen::VectorXd& ws = grid.weights();
  const std::vector<double> pts(xs.data(), xs.data() + xs.size());
  auto src = [&](double y) { return cd(chi(y) * f(y)); };

  double pairing = 0.0;  // <chi, f> in the beta-weighted space
  Eigen::VectorXd chis(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    chis(i) = chi(xs(i));
    pairing += ws(i) * chis(i) * f(xs(i)) * m.beta()(xs(i));
  }
  const cd lead = cd(0.0, 1.0) / (2.0 * std::sqrt(m.alpha0() * m.beta0())) * pairing;

  std::vector<ResidueRow> rows;
  for (cd lambda : lambdas) {
    const Eigen::VectorXcd u = greens_apply(m, lambda, src, a, b, pts, inner);
    double e2 = 0.0;
    for (Eigen::Index i = 0; i < xs.size(); ++i) e2 += ws(i) * std::norm(lambda * chis(i) * u(i) - lead * chis(i));
    rows.push_back({lambda, std::sqrt(e2)});
  }
  return rows;
}

double decay_rate_prediction(const Medium& m, const std::vector<Rect>& regions, const SearchOptions& opt) {
  const ResonanceSet set = find_resonances(m, regions, opt);
  double best = INFINITY;
  for (const auto& p : set.poles)
    if (p.status == NewtonStatus::converged && p.lambda != cd(0.0)) best = std::min(best, std::abs(p.lambda.imag()));
  if (!std::isfinite(best)) throw std::runtime_error("no nonzero poles in the search region");
  return best;
}

}  // namespace bvwave
