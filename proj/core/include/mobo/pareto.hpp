#pragma once

#include "mobo/gp.hpp"
#include "mobo/types.hpp"

#include <vector>

namespace mobo {

/// y1 dominates y2 under minimization: no worse everywhere, better somewhere.
bool dominates(const Vector& y1, const Vector& y2);

/// 1 for every point not dominated by another point in the set, else 0.
/// Nondominated duplicates are all labeled 1. Throws on an empty set.
std::vector<int> extract_front(const PointSet& objectives);

/// Members of `objectives` labeled 1 by extract_front, in input order.
PointSet nondominated(const PointSet& objectives);

/// GP regression on {0,1} frontier labels; predictions are clipped into [0,1].
class ParetoClassifier {
 public:
  /// `inputs` are the raw training inputs the GP was fit on.
  ParetoClassifier(GpModel gp, std::vector<int> labels, const PointSet& inputs);

  const GpModel& gp() const { return gp_; }
  const std::vector<int>& labels() const { return labels_; }

  /// Largest clipped posterior mean over the training inputs.
  double best_training_probability() const { return best_training_probability_; }

 private:
  GpModel gp_;
  std::vector<int> labels_;
  double best_training_probability_ = 0.0;
};

/// Labels come from extract_front over the feasible points only; infeasible
/// points are kept in the training set with label 0. `objectives[i]` is only
/// read where `feasible[i]` is set. Throws std::invalid_argument when no
/// point is feasible.
ParetoClassifier fit_pareto_classifier(const PointSet& inputs, const std::vector<bool>& feasible,
                                       const PointSet& objectives, KernelKind kind = KernelKind::Matern52,
                                       const FitConfig& config = {});

/// Clipped posterior mean and the untouched posterior variance.
Posterior pareto_probability(const ParetoClassifier& clf, const Vector& x);

inline double clip_probability(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

}  // namespace mobo
