#include "mobo/pareto.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mobo {

bool dominates(const Vector& y1, const Vector& y2) {
  if (y1.size() != y2.size()) throw std::invalid_argument("dominates: dimension mismatch");
  bool strictly_better = false;
  for (Eigen::Index j = 0; j < y1.size(); ++j) {
    if (y1[j] > y2[j]) return false;
    if (y1[j] < y2[j]) strictly_better = true;
  }
  return strictly_better;
}

namespace {

// Two objectives: sort by (f1, f2) and sweep. A point survives when its f2 is
// strictly below every earlier f2, or it repeats the last survivor exactly.
std::vector<int> front_two_objectives(const PointSet& pts) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (pts[a][0] != pts[b][0]) return pts[a][0] < pts[b][0];
    if (pts[a][1] != pts[b][1]) return pts[a][1] < pts[b][1];
    return a < b;
  });
  std::vector<int> labels(n, 0);
  bool have_last = false;
  Vector last;
  for (std::size_t idx : order) {
    const Vector& p = pts[idx];
    if (!have_last || p[1] < last[1]) {
      labels[idx] = 1;
      last = p;
      have_last = true;
    } else if (p[0] == last[0] && p[1] == last[1]) {
      labels[idx] = 1;
    }
  }
  return labels;
}

}  // namespace

std::vector<int> extract_front(const PointSet& objectives) {
  if (objectives.empty()) throw std::invalid_argument("extract_front: empty point set");
  const Eigen::Index s = objectives.front().size();
  for (const auto& y : objectives) {
    if (y.size() != s) throw std::invalid_argument("extract_front: ragged objective vectors");
  }
  if (s == 2) return front_two_objectives(objectives);

  const std::size_t n = objectives.size();
  std::vector<int> labels(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && dominates(objectives[j], objectives[i])) {
        labels[i] = 0;
        break;
      }
    }
  }
  return labels;
}

PointSet nondominated(const PointSet& objectives) {
  if (objectives.empty()) return {};
  const auto labels = extract_front(objectives);
  PointSet out;
  for (std::size_t i = 0; i < objectives.size(); ++i) {
    if (labels[i] == 1) out.push_back(objectives[i]);
  }
  return out;
}

ParetoClassifier::ParetoClassifier(GpModel gp, std::vector<int> labels, const PointSet& inputs)
    : gp_(std::move(gp)), labels_(std::move(labels)) {
  for (const auto& x : inputs) {
    best_training_probability_ =
        std::max(best_training_probability_, clip_probability(gp_.predict(x).mean));
  }
}

ParetoClassifier fit_pareto_classifier(const PointSet& inputs, const std::vector<bool>& feasible,
                                       const PointSet& objectives, KernelKind kind,
                                       const FitConfig& config) {
  if (inputs.size() != feasible.size() || inputs.size() != objectives.size()) {
    throw std::invalid_argument("fit_pareto_classifier: inputs, feasibility and objectives differ in length");
  }
  PointSet feasible_objectives;
  std::vector<std::size_t> feasible_index;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (feasible[i]) {
      feasible_objectives.push_back(objectives[i]);
      feasible_index.push_back(i);
    }
  }
  if (feasible_objectives.empty()) {
    throw std::invalid_argument("fit_pareto_classifier: no feasible points");
  }
  const auto front = extract_front(feasible_objectives);
  std::vector<int> labels(inputs.size(), 0);
  for (std::size_t k = 0; k < feasible_index.size(); ++k) labels[feasible_index[k]] = front[k];

  Vector targets(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) targets[static_cast<Eigen::Index>(i)] = labels[i];
  GpModel gp = fit(stack_rows(inputs), targets, kind, config);
  return ParetoClassifier(std::move(gp), std::move(labels), inputs);
}

Posterior pareto_probability(const ParetoClassifier& clf, const Vector& x) {
  Posterior p = clf.gp().predict(x);
  p.mean = clip_probability(p.mean);
  return p;
}

}  // namespace mobo
