#include "bvwave/weight.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bvwave {

namespace {

struct Extremes {
  double sup_V, inf_alpha;
};

Extremes extremes(const RealFunction& V, const RealFunction& alpha) {
  if (!V.is_piecewise_polynomial() || !alpha.is_piecewise_polynomial())
    throw std::invalid_argument("V and alpha must be piecewise polynomial");
  const double sup_V = bounds(V).first, inf_alpha = bounds(alpha).second;
  if (!(inf_alpha > 0)) throw std::domain_error("inf alpha must be positive");
  return {sup_V, inf_alpha};
}

Eigen::VectorXd derivative_coeffs(const Smooth<double>& p) {
  const Eigen::VectorXd& c = p.coefficients();
  if (c.size() == 1) return Eigen::VectorXd::Zero(1);
  Eigen::VectorXd d(c.size() - 1);
  for (Eigen::Index n = 1; n < c.size(); ++n) d(n - 1) = n * c(n);
  return d;
}

// (|x| + 1)^{-1-delta} with a breakpoint at 0.
RealFunction decay_profile(double delta) {
  return {{0.0}, {Smooth<double>::power(1.0, -1.0, -1.0 - delta), Smooth<double>::power(1.0, 1.0, -1.0 - delta)}};
}

}  // namespace

std::vector<double> positive_jump_sets(const RealFunction& V, const RealFunction& alpha) {
  std::vector<double> out;
  for (double x : V.breakpoints())
    if (V.jump(x) > 0) out.push_back(x);
  for (double x : alpha.breakpoints())
    if (alpha.jump(x) > 0) out.push_back(x);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

JumpRecursion jump_recursion(const RealFunction& V, const RealFunction& alpha, double E, const std::vector<double>& sites) {
  const Extremes ex = extremes(V, alpha);
  if (!(E > ex.sup_V)) throw std::domain_error("energy must exceed sup V");
  JumpRecursion out;
  out.r.push_back(0.0);
  for (std::size_t j = 0; j < sites.size(); ++j) {
    if (j > 0 && !(sites[j] > sites[j - 1])) throw std::invalid_argument("sites must be strictly increasing");
    const double x = sites[j];
    const double A = std::max(V.jump(x), 0.0) / (2.0 * (E - V(x)));
    const double B = std::max(alpha.jump(x), 0.0) / (2.0 * alpha(x));
    if (!(A >= 0 && A < 1) || !(B >= 0 && B < 1)) {
      std::ostringstream msg;
      msg << "jump quantities out of [0,1) at x = " << x << ": A = " << A << ", B = " << B;
      throw std::domain_error(msg.str());
    }
    out.A.push_back(A);
    out.B.push_back(B);
    out.r.push_back(out.r.back() + std::log(std::max((1 + A) / (1 - A), (1 + B) / (1 - B))));
  }
  return out;
}

double recursion_bound(const RealFunction& V, const RealFunction& alpha, double E, const std::vector<double>& sites) {
  double total = 0.0;
  for (double x : sites) {
    const double dV = std::max(V.jump(x), 0.0), da = std::max(alpha.jump(x), 0.0);
    total += std::max(dV / ((E - V(x)) - 0.5 * dV), da / (alpha(x) - 0.5 * da));
  }
  return total;
}

Q2 build_q2(const RealFunction& V, const RealFunction& alpha, double delta, double E_min) {
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");
  const Extremes ex = extremes(V, alpha);
  if (!(E_min > ex.sup_V)) throw std::domain_error("E_min must exceed sup V");
  Q2 out;
  out.k = 1.0 / (E_min - ex.sup_V);
  out.delta = delta;
  out.inf_alpha = ex.inf_alpha;
  const double ca = 2.0 / ex.inf_alpha;

  // Partition: jumps of V and alpha, 0 (kink of the decay profile), and the
  // sign changes of V' and alpha' where the positive parts switch on or off.
  std::vector<double> cuts = RealFunction::merge(RealFunction::merge(V.breakpoints(), alpha.breakpoints()), {0.0});
  {
    const auto pv = V.pieces_on(cuts), pa = alpha.pieces_on(cuts);
    std::vector<double> extra;
    for (std::size_t i = 1; i < cuts.size(); ++i) {
      for (double r : real_roots(derivative_coeffs(pv[i]), cuts[i - 1], cuts[i])) extra.push_back(r);
      for (double r : real_roots(derivative_coeffs(pa[i]), cuts[i - 1], cuts[i])) extra.push_back(r);
    }
    std::sort(extra.begin(), extra.end());
    cuts = RealFunction::merge(cuts, extra);
  }
  const auto pv = V.pieces_on(cuts), pa = alpha.pieces_on(cuts);
  const RealFunction g = decay_profile(delta);
  const auto pg = g.pieces_on(cuts);

  std::vector<Smooth<double>> q2_pieces, rate_pieces;
  double offset = 0.0;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    const bool tail = i == 0 || i == cuts.size();
    Smooth<double> rate(0.0);
    if (!tail) {
      const double mid = 0.5 * (cuts[i - 1] + cuts[i]);
      const Smooth<double> dv = pv[i].derivative(), da = pa[i].derivative();
      if (dv(mid) > 0) rate = rate + Smooth<double>(out.k) * dv;
      if (da(mid) > 0) rate = rate + Smooth<double>(ca) * da;
    }
    const bool right = i > 0 && cuts[i - 1] >= 0.0;
    const Smooth<double> G = right ? Smooth<double>(2.0 / delta) + Smooth<double>::power(1.0, 1.0, -delta, -1.0 / delta)
                                   : Smooth<double>::power(1.0, -1.0, -delta, 1.0 / delta);
    if (tail) {
      q2_pieces.push_back(Smooth<double>(offset) + G);
    } else {
      const Smooth<double> P = rate.antiderivative();
      const double a = cuts[i - 1], b = cuts[i];
      q2_pieces.push_back(P + Smooth<double>(offset - P(a)) + G);
      offset += P(b) - P(a);
    }
    rate_pieces.push_back(rate + pg[i]);
  }
  out.q2 = RealFunction(cuts, std::move(q2_pieces));
  out.positive_rate = RealFunction(cuts, std::move(rate_pieces));
  out.limit = offset + 2.0 / delta;
  return out;
}

WeightBundle build_weight(const RealFunction& V, const RealFunction& alpha, double E, double delta, std::size_t N,
                          std::optional<double> E_min) {
  WeightBundle b;
  b.E = E;
  b.E_min = E_min.value_or(E);
  if (b.E < b.E_min) throw std::domain_error("E must be at least E_min");
  b.delta = delta;
  const Extremes ex = extremes(V, alpha);
  b.sup_V = ex.sup_V;
  b.all_sites = positive_jump_sets(V, alpha);
  b.sites.assign(b.all_sites.begin(), b.all_sites.begin() + std::min(N, b.all_sites.size()));
  b.recursion = jump_recursion(V, alpha, E, b.sites);
  b.bound = recursion_bound(V, alpha, E, b.sites);
  const Q2 q = build_q2(V, alpha, delta, b.E_min);
  b.k = q.k;
  b.inf_alpha = q.inf_alpha;
  b.q2 = q.q2;
  b.q2_limit = q.limit;
  b.q1 = RealFunction::piecewise_constant(b.sites, b.recursion.r);
  b.w = (b.q1 + b.q2).exp();
  std::vector<Atom<double>> atoms;
  for (std::size_t j = 0; j < b.sites.size(); ++j)
    atoms.push_back({b.sites[j], std::exp(b.q2(b.sites[j])) * (std::exp(b.recursion.r[j + 1]) - std::exp(b.recursion.r[j]))});
  b.dw = BVMeasure<double>(std::move(atoms), b.w * q.positive_rate);
  return b;
}

bool LowerBoundReport::passed() const {
  for (const auto* list : {&atoms_energy, &atoms_alpha, &density_energy, &density_alpha})
    for (const auto& m : *list)
      if (m.margin < -tolerance * m.scale) return false;
  return true;
}

const Margin* LowerBoundReport::worst(const std::vector<Margin>& m) {
  const Margin* best = nullptr;
  for (const auto& x : m)
    if (!best || x.margin / x.scale < best->margin / best->scale) best = &x;
  return best;
}

std::string LowerBoundReport::summary() const {
  std::ostringstream s;
  const char* names[] = {"energy atoms", "alpha atoms", "energy density", "alpha density"};
  int i = 0;
  for (const auto* list : {&atoms_energy, &atoms_alpha, &density_energy, &density_alpha}) {
    const Margin* w = worst(*list);
    s << names[i++] << ": ";
    if (w)
      s << "worst margin " << w->margin << " at x = " << w->x << " (scale " << w->scale << ")";
    else
      s << "none";
    s << "\n";
  }
  return s.str();
}

LowerBoundReport verify_lower_bounds(const WeightBundle& b, const RealFunction& V, const RealFunction& alpha, double E_min,
                                     const std::vector<double>& grid) {
  if (b.E < E_min) throw std::domain_error("E must be at least E_min");
  LowerBoundReport rep;
  const RealFunction EV = RealFunction(b.E) - V;
  const BVMeasure<double> dV = derivative_measure(V), da = derivative_measure(alpha);
  const BVMeasure<double> first = product_rule(b.w, b.dw, EV, -1.0 * dV);
  const RealFunction g = decay_profile(b.delta);

  const auto in_sites = [&](double x) { return std::binary_search(b.sites.begin(), b.sites.end(), x); };
  std::vector<double> locations = RealFunction::merge(RealFunction::merge(V.breakpoints(), alpha.breakpoints()), b.sites);
  for (double x : locations) {
    const double wA = b.w(x), dVx = V.jump(x), dax = alpha.jump(x), aA = alpha(x);
    // Atoms of the right-hand sides sit at positive jumps left out of q1.
    const double rhs1 = (dVx > 0 && !in_sites(x)) ? -wA * dVx : 0.0;
    const double rhs2 = (dax > 0 && !in_sites(x)) ? -wA * dax / aA : 0.0;
    const double lhs1 = first.mass_at(x);
    const double lhs2 = b.dw.mass_at(x) - wA / aA * da.mass_at(x);
    const double s1 = std::max({std::abs(b.dw.mass_at(x)) * std::abs(EV(x)), wA * std::abs(dVx), 1e-300});
    const double s2 = std::max({std::abs(b.dw.mass_at(x)), wA * std::abs(dax) / aA, 1e-300});
    rep.atoms_energy.push_back({x, lhs1, rhs1, lhs1 - rhs1, s1});
    rep.atoms_alpha.push_back({x, lhs2, rhs2, lhs2 - rhs2, s2});
  }
  for (double x : grid) {
    for (int side = 0; side < 2; ++side) {
      const auto at = [&](const RealFunction& f) { return side == 0 ? f.left_limit(x) : f.right_limit(x); };
      const double w = at(b.w), gx = at(g);
      const double lhs1 = at(first.density());
      const double rhs1 = w * (E_min - at(V)) * gx;
      const double dwd = at(b.dw.density());
      const double lhs2 = dwd - w / at(alpha) * at(da.density());
      const double rhs2 = w * gx;
      const double s1 = std::max({std::abs(dwd * at(EV)), std::abs(w * at(dV.density())), std::abs(rhs1), 1e-300});
      const double s2 = std::max({std::abs(dwd), std::abs(w / at(alpha) * at(da.density())), rhs2, 1e-300});
      rep.density_energy.push_back({x, lhs1, rhs1, lhs1 - rhs1, s1});
      rep.density_alpha.push_back({x, lhs2, rhs2, lhs2 - rhs2, s2});
    }
  }
  return rep;
}

}  // namespace bvwave
