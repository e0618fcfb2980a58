#pragma once

#include "bvwave/measure.hpp"

#include <json.hpp>

namespace bvwave {

namespace detail {

inline nlohmann::json scalar_to_json(double v) { return v; }
inline nlohmann::json scalar_to_json(std::complex<double> v) {
  if (v.imag() == 0.0) return v.real();
  return nlohmann::json::array({v.real(), v.imag()});
}

template <class Scalar>
Scalar scalar_from_json(const nlohmann::json& j) {
  if (j.is_number()) return Scalar(j.get<double>());
  if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
    if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  }
  throw std::invalid_argument("expected a number" + std::string(std::is_same_v<Scalar, double> ? "" : " or [re, im]"));
}

}  // namespace detail

/// {"breakpoints": [...], "pieces": [[c0, c1, ...], ...], "tails": [l, r]}
/// where pieces lists the interior polynomials (ascending coefficients).
template <class Scalar>
nlohmann::json to_json(const PiecewiseFunction<Scalar>& f) {
  nlohmann::json pieces = nlohmann::json::array();
  const auto& pc = f.pieces();
  for (std::size_t i = 1; i + 1 < pc.size(); ++i) {
    nlohmann::json c = nlohmann::json::array();
    const auto& co = pc[i].coefficients();
    for (Eigen::Index n = 0; n < co.size(); ++n) c.push_back(detail::scalar_to_json(co(n)));
    pieces.push_back(std::move(c));
  }
  return {{"breakpoints", f.breakpoints()},
          {"pieces", std::move(pieces)},
          {"tails", nlohmann::json::array({detail::scalar_to_json(pc.front().constant_value()),
                                           detail::scalar_to_json(pc.back().constant_value())})}};
}

template <class Scalar>
PiecewiseFunction<Scalar> piecewise_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("piecewise function must be a JSON object");
  const std::vector<double> b = j.value("breakpoints", std::vector<double>{});
  const nlohmann::json pieces = j.value("pieces", nlohmann::json::array());
  if (!j.contains("tails") || !j["tails"].is_array() || j["tails"].size() != 2)
    throw std::invalid_argument("piecewise function needs \"tails\": [left, right]");
  if (b.empty() ? pieces.size() != 0 : pieces.size() != b.size() - 1)
    throw std::invalid_argument("piecewise function needs one interior piece per gap between breakpoints");
  std::vector<Smooth<Scalar>> p{Smooth<Scalar>(detail::scalar_from_json<Scalar>(j["tails"][0]))};
  for (const auto& c : pieces) {
    typename Smooth<Scalar>::Coeffs co(c.size());
    for (std::size_t n = 0; n < c.size(); ++n) co(Eigen::Index(n)) = detail::scalar_from_json<Scalar>(c[n]);
    p.push_back(Smooth<Scalar>::polynomial(co));
  }
  p.push_back(Smooth<Scalar>(detail::scalar_from_json<Scalar>(j["tails"][1])));
  if (b.empty() && !(p.front().constant_value() == p.back().constant_value()))
    throw std::invalid_argument("a function without breakpoints must have equal tails");
  if (b.empty()) p.pop_back();
  return PiecewiseFunction<Scalar>(b, std::move(p));
}

/// {"atoms": [[x, re, im], ...], "density": <piecewise function>}
template <class Scalar>
nlohmann::json to_json(const BVMeasure<Scalar>& mu) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : mu.atoms()) {
    const std::complex<double> m(a.mass);
    atoms.push_back({a.x, m.real(), m.imag()});
  }
  return {{"atoms", std::move(atoms)}, {"density", to_json(mu.density())}};
}

template <class Scalar>
BVMeasure<Scalar> measure_from_json(const nlohmann::json& j) {
  std::vector<Atom<Scalar>> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.is_array() || a.size() != 3) throw std::invalid_argument("atom must be [x, re, im]");
    if constexpr (std::is_same_v<Scalar, double>) {
      if (a[2].get<double>() != 0.0) throw std::invalid_argument("real measure with complex atom");
      atoms.push_back({a[0].get<double>(), a[1].get<double>()});
    } else {
      atoms.push_back({a[0].get<double>(), Scalar(a[1].get<double>(), a[2].get<double>())});
    }
  }
  return {std::move(atoms), piecewise_from_json<Scalar>(j.at("density"))};
}

}  // namespace bvwave
