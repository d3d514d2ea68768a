#include "mobo/pareto.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

using namespace mobo;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

PointSet random_points(Rng& rng, int n, int s, bool quantize) {
  PointSet out;
  for (int i = 0; i < n; ++i) {
    Vector p(s);
    for (int k = 0; k < s; ++k) p[k] = quantize ? std::floor(uniform01(rng) * 5) : uniform01(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace

TEST(Dominates, WorkedExamples) {
  EXPECT_TRUE(dominates(vec({1, 2}), vec({2, 3})));
  EXPECT_FALSE(dominates(vec({1, 3}), vec({3, 1})));
  EXPECT_FALSE(dominates(vec({1, 2}), vec({1, 2})));
  EXPECT_TRUE(dominates(vec({1, 2}), vec({1, 3})));
  EXPECT_THROW(dominates(vec({1, 2}), vec({1, 2, 3})), std::invalid_argument);
}

TEST(ExtractFront, WorkedExamples) {
  EXPECT_EQ(extract_front({vec({0.3, 0.2})}), std::vector<int>{1});
  EXPECT_EQ(extract_front({vec({0, 1}), vec({1, 0}), vec({1, 1})}), (std::vector<int>{1, 1, 0}));
  EXPECT_THROW(extract_front({}), std::invalid_argument);
}

TEST(ExtractFront, DuplicatesCoLabeled) {
  EXPECT_EQ(extract_front({vec({0, 1}), vec({0, 1}), vec({1, 1})}), (std::vector<int>{1, 1, 0}));
  EXPECT_EQ(extract_front({vec({1, 1, 1}), vec({1, 1, 1})}), (std::vector<int>{1, 1}));
}

TEST(ExtractFront, MatchesBruteForce) {
  Rng rng(1);
  for (int s = 2; s <= 5; ++s) {
    for (int t = 0; t < 20; ++t) {
      const PointSet pts = random_points(rng, 200, s, t % 2 == 1);
      EXPECT_EQ(extract_front(pts), oracle::brute_force_front(pts)) << "s=" << s << " t=" << t;
    }
  }
}

TEST(ExtractFront, PermutationInvariantAndConsistent) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const int s = 2 + t % 3;
    const PointSet pts = random_points(rng, 60, s, t % 2 == 0);
    const auto labels = extract_front(pts);
    std::vector<std::size_t> perm(pts.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    PointSet shuffled;
    for (auto i : perm) shuffled.push_back(pts[i]);
    const auto shuffled_labels = extract_front(shuffled);
    for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_EQ(shuffled_labels[k], labels[perm[k]]);

    for (std::size_t i = 0; i < pts.size(); ++i) {
      bool dominated_by_front = false;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        if (labels[i] == 1) EXPECT_FALSE(dominates(pts[j], pts[i]));
        if (labels[j] == 1 && dominates(pts[j], pts[i])) dominated_by_front = true;
      }
      if (labels[i] == 0) EXPECT_TRUE(dominated_by_front);
    }
  }
}

TEST(ParetoClassifier, AllNondominated) {
  PointSet inputs, objectives;
  for (int i = 0; i < 6; ++i) {
    const double t = i / 5.0;
    inputs.push_back(vec({t, 1.0 - t}));
    objectives.push_back(vec({t, 1.0 - t}));
  }
  const auto clf = fit_pareto_classifier(inputs, std::vector<bool>(6, true), objectives);
  for (int l : clf.labels()) EXPECT_EQ(l, 1);
  for (const auto& x : inputs) EXPECT_GE(pareto_probability(clf, x).mean, 0.5);
}

TEST(ParetoClassifier, OneFeasiblePoint) {
  const PointSet inputs{vec({0.1}), vec({0.5}), vec({0.9})};
  const PointSet objectives{vec({0, 0}), vec({1, 1}), vec({0, 0})};
  const auto clf = fit_pareto_classifier(inputs, {false, true, false}, objectives);
  EXPECT_EQ(clf.labels(), (std::vector<int>{0, 1, 0}));
}

TEST(ParetoClassifier, NoFeasiblePointThrows) {
  EXPECT_THROW(fit_pareto_classifier({vec({0.1})}, {false}, {vec({0, 0})}), std::invalid_argument);
}

TEST(ParetoClassifier, LabelsFlipWhenDominatingPointArrives) {
  PointSet inputs{vec({0.1, 0.1}), vec({0.4, 0.7}), vec({0.8, 0.3})};
  PointSet objectives{vec({0, 1}), vec({1, 0}), vec({0.5, 0.5})};
  auto clf = fit_pareto_classifier(inputs, std::vector<bool>(3, true), objectives);
  EXPECT_EQ(clf.labels(), (std::vector<int>{1, 1, 1}));
  inputs.push_back(vec({0.5, 0.5}));
  objectives.push_back(vec({-1, -1}));
  clf = fit_pareto_classifier(inputs, std::vector<bool>(4, true), objectives);
  EXPECT_EQ(clf.labels(), (std::vector<int>{0, 0, 0, 1}));
}

TEST(ParetoClassifier, InterpolatesLabelsAndClips) {
  Rng rng(3);
  PointSet inputs, objectives;
  for (int i = 0; i < 20; ++i) {
    inputs.push_back(Bounds::unit(2).sample(rng));
    objectives.push_back(Bounds::unit(2).sample(rng));
  }
  const auto clf = fit_pareto_classifier(inputs, std::vector<bool>(20, true), objectives);
  for (int i = 0; i < 20; ++i) {
    const double p = pareto_probability(clf, inputs[static_cast<std::size_t>(i)]).mean;
    if (clf.labels()[static_cast<std::size_t>(i)] == 1) {
      EXPECT_GE(p, 0.9);
    } else {
      EXPECT_LE(p, 0.1);
    }
  }
  for (int q = 0; q < 10000; ++q) {
    const Posterior p = pareto_probability(clf, Bounds(Vector::Constant(2, -2), Vector::Constant(2, 3)).sample(rng));
    EXPECT_GE(p.mean, 0.0);
    EXPECT_LE(p.mean, 1.0);
    EXPECT_GE(p.variance, 0.0);
  }
  EXPECT_EQ(clip_probability(1.3), 1.0);
  EXPECT_EQ(clip_probability(-0.2), 0.0);
  EXPECT_EQ(clip_probability(0.4), 0.4);
}
