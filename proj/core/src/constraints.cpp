#include "mobo/constraints.hpp"

#include "mobo/pareto.hpp"

#include <cmath>

namespace mobo {

void KnownConstraintSet::add_linear(Vector coefficients, double bound) {
  constraints_.push_back([a = std::move(coefficients), bound](const Vector& x) {
    if (x.size() != a.size()) throw std::invalid_argument("linear constraint: dimension mismatch");
    return a.dot(x) - bound;
  });
}

int known_indicator(const KnownConstraintSet& cset, const Vector& x) {
  for (const auto& g : cset.constraints()) {
    double value = 0.0;
    try {
      value = g(x);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception& e) {
      throw ConstraintEvaluationError(std::string("known constraint failed: ") + e.what());
    }
    if (std::isnan(value)) throw ConstraintEvaluationError("known constraint returned NaN");
    if (value > 0.0) return 0;
  }
  return 1;
}

FeasibilityClassifier FeasibilityClassifier::constant(double probability, std::vector<int> labels) {
  FeasibilityClassifier clf;
  clf.constant_ = clip_probability(probability);
  clf.labels_ = std::move(labels);
  return clf;
}

FeasibilityClassifier FeasibilityClassifier::model(GpModel gp, std::vector<int> labels) {
  FeasibilityClassifier clf;
  clf.gp_ = std::move(gp);
  clf.labels_ = std::move(labels);
  return clf;
}

double FeasibilityClassifier::probability(const Vector& x) const {
  if (!gp_) return constant_;
  return clip_probability(gp_->predict(x).mean);
}

FeasibilityClassifier fit_feasibility(const PointSet& inputs, const std::vector<int>& labels,
                                      KernelKind kind, const FitConfig& config) {
  if (inputs.empty()) throw std::invalid_argument("fit_feasibility: no data");
  if (inputs.size() != labels.size()) {
    throw std::invalid_argument("fit_feasibility: inputs and labels differ in length");
  }
  std::size_t feasible = 0;
  for (int c : labels) {
    if (c != 0 && c != 1) throw std::invalid_argument("fit_feasibility: labels must be 0 or 1");
    feasible += static_cast<std::size_t>(c);
  }
  if (feasible == labels.size()) return FeasibilityClassifier::constant(1.0, labels);
  if (feasible == 0) return FeasibilityClassifier::constant(0.0, labels);

  Vector targets(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) targets[static_cast<Eigen::Index>(i)] = labels[i];
  return FeasibilityClassifier::model(fit(stack_rows(inputs), targets, kind, config), labels);
}

}  // namespace mobo
