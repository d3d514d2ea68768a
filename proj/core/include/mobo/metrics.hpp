#pragma once

#include "mobo/types.hpp"

#include <limits>

namespace mobo {

enum class DistanceAggregate {
  SumUnderRoot,      ///< sqrt(sum_i d_i) / n
  RootMeanSquare,    ///< sqrt(sum_i d_i^2) / n, the usual GD
};

/// Generational distance: from each obtained point to its nearest true-front point.
double gd(const PointSet& front, const PointSet& true_front,
          DistanceAggregate aggregate = DistanceAggregate::SumUnderRoot);

/// Inverted generational distance: from each true-front point to the obtained front.
double igd(const PointSet& front, const PointSet& true_front,
           DistanceAggregate aggregate = DistanceAggregate::SumUnderRoot);

/// Exact hypervolume dominated by `front` and bounded by `reference`
/// (minimization), by WFG exclusive-hypervolume recursion down to one
/// dimension. Throws std::invalid_argument if a point exceeds the reference.
double hypervolume(const PointSet& front, const Vector& reference);

/// Two-objective hypervolume by a sort-and-sweep.
double hypervolume_2d(const PointSet& front, const Vector& reference);

/// log|hv - hv_ideal|; -infinity when they are equal.
double lrhd(double hv, double hv_ideal);

/// Points of `front` that weakly dominate `reference`.
PointSet within_reference(const PointSet& front, const Vector& reference);

/// Componentwise maximum of `points` plus `margin` times the componentwise range
/// (a unit margin is used for zero-range objectives).
Vector nadir_reference(const PointSet& points, double margin = 0.1);

struct MetricsReport {
  double gd = 0.0;
  double igd = 0.0;
  double hv = 0.0;
  double hv_ideal = 0.0;
  double lrhd = -std::numeric_limits<double>::infinity();
  int front_size = 0;
  Vector reference_point;
};

/// All metrics for an obtained front. Hypervolume only counts points inside
/// the reference box.
MetricsReport evaluate_front(const PointSet& front, const PointSet& true_front, const Vector& reference);

}  // namespace mobo
