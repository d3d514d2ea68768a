#include "mobo/scalarize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mobo {

std::string_view to_string(ScalarizationMethod method) {
  switch (method) {
    case ScalarizationMethod::WeightedTchebycheff: return "WeightedTchebycheff";
    case ScalarizationMethod::WeightedSum: return "WeightedSum";
    case ScalarizationMethod::AugmentedTchebycheff: return "AugmentedTchebycheff";
    case ScalarizationMethod::RegularizedAugmentedTchebycheff:
      return "RegularizedAugmentedTchebycheff";
  }
  return "?";
}

void ScalarizationSpec::validate(Eigen::Index objectives) const {
  if (!(rho >= 0.0)) throw std::invalid_argument("ScalarizationSpec: rho must be >= 0");
  if (!(lambda >= 0.0)) throw std::invalid_argument("ScalarizationSpec: lambda must be >= 0");
  if (ideal_point.size() != 0 && ideal_point.size() != objectives) {
    throw std::invalid_argument("ScalarizationSpec: ideal point dimension mismatch");
  }
}

WeightVector sample_weights(Eigen::Index s, Rng& rng) {
  if (s < 1) throw std::invalid_argument("sample_weights: need at least one objective");
  Vector w(s);
  if (s == 1) {
    w[0] = 1.0;
    return {w};
  }
  for (Eigen::Index j = 0; j < s; ++j) {
    double u = uniform01(rng);
    while (u <= 0.0) u = uniform01(rng);
    w[j] = -std::log(u);
  }
  w /= w.sum();
  // Absorb rounding so the components sum to one as closely as doubles allow.
  w[s - 1] = std::max(0.0, 1.0 - (w.sum() - w[s - 1]));
  return {w};
}

double scalarize(const ScalarizationSpec& spec, const WeightVector& w, const Vector& y,
                 const Vector& x) {
  const Eigen::Index s = y.size();
  if (w.weights.size() != s) throw std::invalid_argument("scalarize: weight/objective dimension mismatch");
  spec.validate(s);
  const bool anchored = spec.method == ScalarizationMethod::WeightedTchebycheff ||
                        spec.method == ScalarizationMethod::AugmentedTchebycheff;
  double max_term = -std::numeric_limits<double>::infinity();
  double sum_term = 0.0;
  for (Eigen::Index j = 0; j < s; ++j) {
    const double anchor = (anchored && spec.ideal_point.size() == s) ? spec.ideal_point[j] : 0.0;
    max_term = std::max(max_term, w.weights[j] * (y[j] - anchor));
    sum_term += w.weights[j] * y[j];
  }
  switch (spec.method) {
    case ScalarizationMethod::WeightedTchebycheff:
      return max_term;
    case ScalarizationMethod::WeightedSum:
      return sum_term;
    case ScalarizationMethod::AugmentedTchebycheff:
      return max_term + spec.rho * sum_term;
    case ScalarizationMethod::RegularizedAugmentedTchebycheff:
      if (spec.lambda != 0.0 && x.size() == 0) throw std::invalid_argument("scalarize: regularized method needs x");
      return max_term + spec.rho * sum_term + spec.lambda * x.norm();
  }
  return max_term;
}

ObjectiveNormalizer ObjectiveNormalizer::fit(const PointSet& objectives) {
  if (objectives.empty()) throw std::invalid_argument("ObjectiveNormalizer: no objectives");
  Vector lo = objectives.front();
  Vector hi = objectives.front();
  for (const auto& y : objectives) {
    lo = lo.cwiseMin(y);
    hi = hi.cwiseMax(y);
  }
  Vector scale = hi - lo;
  for (Eigen::Index j = 0; j < scale.size(); ++j) {
    if (!(scale[j] > 0.0)) scale[j] = 1.0;
  }
  return {lo, scale};
}

Vector ObjectiveNormalizer::apply(const Vector& y) const {
  return ((y - lower).array() / scale.array()).matrix();
}

}  // namespace mobo
