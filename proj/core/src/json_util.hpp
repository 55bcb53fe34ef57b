#pragma once

#include <json.hpp>

#include "quadlab/errors.hpp"
#include "quadlab/geometry.hpp"
#include "quadlab/weights.hpp"

namespace quadlab::detail {

inline nlohmann::json point_json(const SpherePoint& x) {
  return nlohmann::json(std::vector<double>(x.coords().begin(), x.coords().end()));
}

inline SpherePoint point_from_json(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return SpherePoint(std::span<const double>(v));
}

inline nlohmann::json weight_json(const ProductWeight& w) {
  nlohmann::json j;
  j["dim"] = w.dim();
  nlohmann::json factors = nlohmann::json::array();
  for (std::size_t k = 0; k < w.factor_count(); ++k)
    factors.push_back({{"direction", point_json(w.directions()[k])}, {"kappa", w.kappas()[k]}});
  j["factors"] = std::move(factors);
  return j;
}

// Accepts {"dim", "factors": [{"direction", "kappa"}]} or {"dim", "axis_kappas": [...]}.
inline ProductWeight weight_from_json(const nlohmann::json& j) {
  const int d = j.at("dim").get<int>();
  if (j.contains("axis_kappas")) {
    const auto k = j.at("axis_kappas").get<std::vector<double>>();
    return ProductWeight::axis(d, k);
  }
  std::vector<SpherePoint> dirs;
  std::vector<double> kappas;
  if (j.contains("factors")) {
    for (const auto& f : j.at("factors")) {
      dirs.push_back(point_from_json(f.at("direction")));
      kappas.push_back(f.at("kappa").get<double>());
    }
  }
  return ProductWeight(d, std::move(dirs), std::move(kappas));
}

}  // namespace quadlab::detail
