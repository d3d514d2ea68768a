#include "mobo/types.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mobo {

Bounds::Bounds(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size()) {
    throw std::invalid_argument("Bounds: lower and upper have different dimensions");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i]) {
      throw std::invalid_argument("Bounds: each coordinate needs finite lower <= upper");
    }
  }
}

bool Bounds::contains(const Vector& x) const {
  if (x.size() != lower.size()) return false;
  return (x.array() >= lower.array()).all() && (x.array() <= upper.array()).all();
}

Vector Bounds::clamp(const Vector& x) const { return x.cwiseMax(lower).cwiseMin(upper); }

Vector Bounds::sample(Rng& rng) const {
  Vector x(lower.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = lower[i] + uniform01(rng) * (upper[i] - lower[i]);
  }
  return x;
}

double standard_normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace mobo
