#include "mobo/metrics.hpp"

#include "mobo/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mobo {

namespace {

double nearest(const Vector& p, const PointSet& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : set) best = std::min(best, (p - q).squaredNorm());
  return std::sqrt(best);
}

double aggregate_distances(const PointSet& from, const PointSet& to, DistanceAggregate aggregate) {
  if (from.empty() || to.empty()) throw std::invalid_argument("distance metric: empty point set");
  double sum = 0.0;
  for (const auto& p : from) {
    const double d = nearest(p, to);
    sum += aggregate == DistanceAggregate::SumUnderRoot ? d : d * d;
  }
  return std::sqrt(sum) / static_cast<double>(from.size());
}

// Nondominated, deduplicated copy (weak-dominance duplicates add no volume).
PointSet reduce(const PointSet& pts) {
  if (pts.empty()) return {};
  if (pts.front().size() == 1) {
    Vector lo = pts.front();
    for (const auto& p : pts) lo = lo.cwiseMin(p);
    return {lo};
  }
  PointSet nd = nondominated(pts);
  std::sort(nd.begin(), nd.end(), [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  nd.erase(std::unique(nd.begin(), nd.end(), [](const Vector& a, const Vector& b) { return a == b; }),
           nd.end());
  return nd;
}

double box_volume(const Vector& p, const Vector& ref) {
  double v = 1.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) v *= ref[j] - p[j];
  return v;
}

double wfg(PointSet pts, const Vector& ref);

// Volume dominated by p but not by any point of `rest`, where every point of
// `rest` is at least as good as p in the last objective. The limit set then shares
// p's last coordinate, so its volume factors into a (d-1)-dimensional one.
double exclusive(const Vector& p, const PointSet& rest, const Vector& ref) {
  const Eigen::Index d = p.size();
  const double own = box_volume(p, ref);
  if (rest.empty()) return own;
  PointSet limited;
  limited.reserve(rest.size());
  for (const auto& q : rest) limited.push_back(p.cwiseMax(q).head(d - 1));
  const double slab = ref[d - 1] - p[d - 1];
  return own - slab * wfg(reduce(limited), ref.head(d - 1));
}

double wfg(PointSet pts, const Vector& ref) {
  if (pts.empty()) return 0.0;
  const Eigen::Index d = ref.size();
  if (d == 1) {
    double lo = pts.front()[0];
    for (const auto& p : pts) lo = std::min(lo, p[0]);
    return ref[0] - lo;
  }
  // Descending in the last objective: later points are at least as good there.
  std::stable_sort(pts.begin(), pts.end(),
                   [d](const Vector& a, const Vector& b) { return a[d - 1] > b[d - 1]; });
  double total = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const PointSet rest(pts.begin() + static_cast<std::ptrdiff_t>(i) + 1, pts.end());
    total += exclusive(pts[i], rest, ref);
  }
  return total;
}

void check_reference(const PointSet& front, const Vector& reference) {
  for (std::size_t i = 0; i < front.size(); ++i) {
    if (front[i].size() != reference.size()) {
      throw std::invalid_argument("hypervolume: point and reference dimensions differ");
    }
    if ((front[i].array() > reference.array()).any()) {
      std::ostringstream msg;
      msg << "hypervolume: point " << i << " (" << front[i].transpose()
          << ") exceeds the reference point";
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

double gd(const PointSet& front, const PointSet& true_front, DistanceAggregate aggregate) {
  return aggregate_distances(front, true_front, aggregate);
}

double igd(const PointSet& front, const PointSet& true_front, DistanceAggregate aggregate) {
  return aggregate_distances(true_front, front, aggregate);
}

double hypervolume(const PointSet& front, const Vector& reference) {
  check_reference(front, reference);
  if (front.empty()) return 0.0;
  return wfg(reduce(front), reference);
}

double hypervolume_2d(const PointSet& front, const Vector& reference) {
  if (reference.size() != 2) throw std::invalid_argument("hypervolume_2d: needs two objectives");
  check_reference(front, reference);
  PointSet pts = front;
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return a[0] != b[0] ? a[0] < b[0] : a[1] < b[1];
  });
  double area = 0.0;
  double ceiling = reference[1];
  for (const auto& p : pts) {
    if (p[1] < ceiling) {
      area += (reference[0] - p[0]) * (ceiling - p[1]);
      ceiling = p[1];
    }
  }
  return area;
}

double lrhd(double hv, double hv_ideal) {
  const double diff = std::abs(hv - hv_ideal);
  if (diff == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(diff);
}

PointSet within_reference(const PointSet& front, const Vector& reference) {
  PointSet out;
  for (const auto& p : front) {
    if (p.size() == reference.size() && (p.array() <= reference.array()).all()) out.push_back(p);
  }
  return out;
}

Vector nadir_reference(const PointSet& points, double margin) {
  if (points.empty()) throw std::invalid_argument("nadir_reference: empty point set");
  Vector lo = points.front();
  Vector hi = points.front();
  for (const auto& p : points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  Vector range = hi - lo;
  for (Eigen::Index j = 0; j < range.size(); ++j) {
    if (!(range[j] > 0.0)) range[j] = 1.0;
  }
  return hi + margin * range;
}

MetricsReport evaluate_front(const PointSet& front, const PointSet& true_front, const Vector& reference) {
  MetricsReport report;
  report.front_size = static_cast<int>(front.size());
  report.reference_point = reference;
  report.gd = gd(front, true_front);
  report.igd = igd(front, true_front);
  report.hv = hypervolume(within_reference(front, reference), reference);
  report.hv_ideal = hypervolume(within_reference(true_front, reference), reference);
  report.lrhd = lrhd(report.hv, report.hv_ideal);
  return report;
}

}  // namespace mobo
