#pragma once

#include "mobo/gp.hpp"
#include "mobo/types.hpp"

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace mobo {

/// A known constraint g returned NaN or threw.
class ConstraintEvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Cheap analytic constraints g_k(x) <= 0, evaluated before the objective.
class KnownConstraintSet {
 public:
  using Constraint = std::function<double(const Vector&)>;

  void add(Constraint g) { constraints_.push_back(std::move(g)); }
  /// coefficients . x <= bound
  void add_linear(Vector coefficients, double bound);

  std::size_t count() const { return constraints_.size(); }
  bool empty() const { return constraints_.empty(); }
  const std::vector<Constraint>& constraints() const { return constraints_; }

 private:
  std::vector<Constraint> constraints_;
};

/// 1 if every g_k(x) <= 0 (vacuously for an empty set), else 0.
int known_indicator(const KnownConstraintSet& cset, const Vector& x);

/// Classifier for hidden constraints learned from evaluation outcomes.
/// When every label agrees there is nothing to learn and the probability
/// is that constant.
class FeasibilityClassifier {
 public:
  static FeasibilityClassifier constant(double probability, std::vector<int> labels);
  static FeasibilityClassifier model(GpModel gp, std::vector<int> labels);

  const std::vector<int>& labels() const { return labels_; }
  bool degenerate() const { return !gp_.has_value(); }
  const std::optional<GpModel>& gp() const { return gp_; }

  double probability(const Vector& x) const;

 private:
  std::optional<GpModel> gp_;
  double constant_ = 1.0;
  std::vector<int> labels_;
};

/// `labels[i]` is 1 for a feasible evaluation and 0 otherwise.
FeasibilityClassifier fit_feasibility(const PointSet& inputs, const std::vector<int>& labels,
                                      KernelKind kind = KernelKind::Matern52,
                                      const FitConfig& config = {});

/// Pr(c(x) = 1): the clipped posterior mean.
inline double feasibility_probability(const FeasibilityClassifier& clf, const Vector& x) {
  return clf.probability(x);
}

/// Pr(c(x) = 0), the complement of feasibility_probability.
inline double infeasibility_probability(const FeasibilityClassifier& clf, const Vector& x) {
  return 1.0 - clf.probability(x);
}

}  // namespace mobo
