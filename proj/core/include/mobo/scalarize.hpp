#pragma once

#include "mobo/types.hpp"

#include <optional>
#include <string_view>

namespace mobo {

enum class ScalarizationMethod {
  WeightedTchebycheff,
  WeightedSum,
  AugmentedTchebycheff,
  RegularizedAugmentedTchebycheff,
};

std::string_view to_string(ScalarizationMethod method);

struct ScalarizationSpec {
  ScalarizationMethod method = ScalarizationMethod::RegularizedAugmentedTchebycheff;
  double rho = 0.65;
  double lambda = 0.01;
  Vector ideal_point;  ///< z*; empty means the origin

  void validate(Eigen::Index objectives) const;
};

/// Point on the probability simplex; components in [0,1] summing to one.
struct WeightVector {
  Vector weights;
};

/// Uniform draw from the (s-1)-simplex via normalized exponential spacings.
WeightVector sample_weights(Eigen::Index s, Rng& rng);

/// Collapse an objective vector `y` to a scalar.
///
///   WeightedTchebycheff              max_j w_j (y_j - z*_j)
///   WeightedSum                      sum_j w_j y_j
///   AugmentedTchebycheff             max_j w_j (y_j - z*_j) + rho sum_j w_j y_j
///   RegularizedAugmentedTchebycheff  max_j w_j y_j + rho sum_j w_j y_j + lambda ||x||_2
///
/// `x` is only read by the regularized method, which throws when it is empty
/// and lambda is nonzero.
double scalarize(const ScalarizationSpec& spec, const WeightVector& w, const Vector& y,
                 const Vector& x = Vector());

/// Per-objective affine map onto [0,1] fitted to a set of objective vectors.
/// Zero-range objectives map with unit scale.
struct ObjectiveNormalizer {
  Vector lower;
  Vector scale;

  static ObjectiveNormalizer fit(const PointSet& objectives);
  Vector apply(const Vector& y) const;
};

}  // namespace mobo
