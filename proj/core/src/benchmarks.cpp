#include "mobo/benchmarks.hpp"

#include "mobo/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace mobo {

namespace {

using std::numbers::pi;

constexpr BenchmarkName kAll[] = {BenchmarkName::ZDT1,  BenchmarkName::ZDT2,  BenchmarkName::ZDT3,
                                  BenchmarkName::ZDT4,  BenchmarkName::ZDT6,  BenchmarkName::DTLZ1,
                                  BenchmarkName::DTLZ2, BenchmarkName::DTLZ3, BenchmarkName::DTLZ4,
                                  BenchmarkName::DTLZ5, BenchmarkName::DTLZ6};

double zdt6_f1(double x1) {
  const double s = std::sin(6.0 * pi * x1);
  return 1.0 - std::exp(-4.0 * x1) * std::pow(s, 6);
}

Vector evaluate_zdt(const BenchmarkSpec& spec, const Vector& x) {
  const Eigen::Index d = spec.dimension;
  const double tail = static_cast<double>(d - 1);
  double sum = 0.0;
  for (Eigen::Index i = 1; i < d; ++i) sum += x[i];

  Vector f(2);
  double g = 1.0;
  switch (spec.name) {
    case BenchmarkName::ZDT1:
    case BenchmarkName::ZDT2:
    case BenchmarkName::ZDT3:
      f[0] = x[0];
      g = 1.0 + 9.0 * sum / tail;
      break;
    case BenchmarkName::ZDT4: {
      f[0] = x[0];
      g = 1.0 + 10.0 * tail;
      for (Eigen::Index i = 1; i < d; ++i) g += x[i] * x[i] - 10.0 * std::cos(4.0 * pi * x[i]);
      break;
    }
    case BenchmarkName::ZDT6:
      f[0] = zdt6_f1(x[0]);
      g = 1.0 + 9.0 * std::pow(sum / tail, 0.25);
      break;
    default:
      throw std::logic_error("evaluate_zdt: not a ZDT problem");
  }
  const double ratio = f[0] / g;
  double h = 0.0;
  switch (spec.name) {
    case BenchmarkName::ZDT1:
    case BenchmarkName::ZDT4:
      h = 1.0 - std::sqrt(ratio);
      break;
    case BenchmarkName::ZDT2:
    case BenchmarkName::ZDT6:
      h = 1.0 - ratio * ratio;
      break;
    case BenchmarkName::ZDT3:
      h = 1.0 - std::sqrt(ratio) - ratio * std::sin(10.0 * pi * f[0]);
      break;
    default:
      break;
  }
  f[1] = g * h;
  return f;
}

double dtlz_g(const BenchmarkSpec& spec, const Vector& x) {
  const Eigen::Index d = spec.dimension;
  const Eigen::Index first = spec.objectives - 1;  // first distance variable
  const bool scaled = spec.form == BenchmarkForm::Scaled;
  auto rastrigin = [&](Eigen::Index from) {
    double s = 0.0;
    for (Eigen::Index i = from; i < d; ++i) {
      const double t = x[i] - 0.5;
      s += t * t - std::cos(20.0 * pi * t);
    }
    return s;
  };
  double g = 0.0;
  switch (spec.name) {
    case BenchmarkName::DTLZ1:
      g = scaled ? 100.0 * (static_cast<double>(d) + rastrigin(0))
                : 100.0 * (static_cast<double>(spec.k()) + rastrigin(first));
      break;
    case BenchmarkName::DTLZ3:
      g = 100.0 * (static_cast<double>(spec.k()) + rastrigin(first));
      break;
    case BenchmarkName::DTLZ2:
    case BenchmarkName::DTLZ4:
    case BenchmarkName::DTLZ5:
      for (Eigen::Index i = first; i < d; ++i) g += (x[i] - 0.5) * (x[i] - 0.5);
      break;
    case BenchmarkName::DTLZ6:
      for (Eigen::Index i = first; i < d; ++i) g += std::pow(x[i], 0.1);
      break;
    default:
      throw std::logic_error("dtlz_g: not a DTLZ problem");
  }
  return g;
}

Vector evaluate_dtlz(const BenchmarkSpec& spec, const Vector& x) {
  const Eigen::Index m_obj = spec.objectives;
  const bool scaled = spec.form == BenchmarkForm::Scaled;
  const double g = dtlz_g(spec, x);
  const double prefactor = (scaled || spec.name == BenchmarkName::DTLZ1) ? 0.5 : 1.0;

  // cosine-like and sine-like factors for position variable i (1-based)
  std::function<double(Eigen::Index)> c_factor;
  std::function<double(Eigen::Index)> s_factor;
  const auto xi = [&](Eigen::Index i) { return x[i - 1]; };
  switch (spec.name) {
    case BenchmarkName::DTLZ1:
      c_factor = [&](Eigen::Index i) { return xi(i); };
      s_factor = [&](Eigen::Index i) { return 1.0 - xi(i); };
      break;
    case BenchmarkName::DTLZ2:
    case BenchmarkName::DTLZ3:
      c_factor = [&](Eigen::Index i) { return std::cos(xi(i) * pi / 2.0); };
      s_factor = [&](Eigen::Index i) { return std::sin(xi(i) * pi / 2.0); };
      break;
    case BenchmarkName::DTLZ4:
      c_factor = [&](Eigen::Index i) { return std::cos(std::pow(xi(i), spec.alpha) * pi / 2.0); };
      if (scaled) {
        s_factor = [&](Eigen::Index i) { return std::sin(xi(i) * pi / 2.0); };
      } else {
        s_factor = [&](Eigen::Index i) { return std::sin(std::pow(xi(i), spec.alpha) * pi / 2.0); };
      }
      break;
    case BenchmarkName::DTLZ5:
    case BenchmarkName::DTLZ6: {
      const auto theta = [&, g](Eigen::Index i) {
        return pi / (4.0 * (1.0 + g)) * (1.0 + 2.0 * g * xi(i));
      };
      if (scaled) {
        // theta_1 is left undefined by this form; x_1 is used, which matches
        // the sine factor f_M = sin(x_1 pi/2).
        c_factor = [&, theta](Eigen::Index i) {
          return std::cos((i == 1 ? xi(1) : theta(i)) * pi / 2.0);
        };
        s_factor = [&](Eigen::Index i) { return std::sin(xi(i) * pi / 2.0); };
      } else {
        const auto phi = [&, theta](Eigen::Index i) { return i == 1 ? xi(1) * pi / 2.0 : theta(i); };
        c_factor = [phi](Eigen::Index i) { return std::cos(phi(i)); };
        s_factor = [phi](Eigen::Index i) { return std::sin(phi(i)); };
      }
      break;
    }
    default:
      throw std::logic_error("evaluate_dtlz: not a DTLZ problem");
  }

  Vector f(m_obj);
  for (Eigen::Index m = 1; m <= m_obj; ++m) {
    double v = prefactor * (1.0 + g);
    for (Eigen::Index i = 1; i <= m_obj - m; ++i) v *= c_factor(i);
    if (m > 1) v *= s_factor(m_obj - m + 1);
    f[m - 1] = v;
  }
  return f;
}

// Snaps round-off (e.g. cos(pi/2) ~ 6e-17) to zero so that images of the same
// front point compare equal.
PointSet dedupe(PointSet pts) {
  for (auto& p : pts) p = p.unaryExpr([](double v) { return std::abs(v) < 1e-12 ? 0.0 : v; });
  std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) { return a == b; }),
            pts.end());
  return pts;
}

// All ways of writing `total` as an ordered sum of `parts` nonnegative integers.
void compositions(int total, int parts, std::vector<int>& current, std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    current.push_back(total);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int v = 0; v <= total; ++v) {
    current.push_back(v);
    compositions(total - v, parts - 1, current, out);
    current.pop_back();
  }
}

}  // namespace

std::string_view to_string(BenchmarkName name) {
  switch (name) {
    case BenchmarkName::ZDT1: return "ZDT1";
    case BenchmarkName::ZDT2: return "ZDT2";
    case BenchmarkName::ZDT3: return "ZDT3";
    case BenchmarkName::ZDT4: return "ZDT4";
    case BenchmarkName::ZDT6: return "ZDT6";
    case BenchmarkName::DTLZ1: return "DTLZ1";
    case BenchmarkName::DTLZ2: return "DTLZ2";
    case BenchmarkName::DTLZ3: return "DTLZ3";
    case BenchmarkName::DTLZ4: return "DTLZ4";
    case BenchmarkName::DTLZ5: return "DTLZ5";
    case BenchmarkName::DTLZ6: return "DTLZ6";
  }
  return "?";
}

std::optional<BenchmarkName> parse_benchmark_name(std::string_view name) {
  for (auto n : kAll) {
    if (name == to_string(n)) return n;
  }
  return std::nullopt;
}

std::vector<std::string> benchmark_names() {
  std::vector<std::string> out;
  for (auto n : kAll) out.emplace_back(to_string(n));
  return out;
}

bool is_zdt(BenchmarkName name) {
  return name == BenchmarkName::ZDT1 || name == BenchmarkName::ZDT2 || name == BenchmarkName::ZDT3 ||
         name == BenchmarkName::ZDT4 || name == BenchmarkName::ZDT6;
}

BenchmarkSpec BenchmarkSpec::make(BenchmarkName name, Eigen::Index dimension, Eigen::Index objectives,
                                  BenchmarkForm form) {
  BenchmarkSpec spec;
  spec.name = name;
  spec.form = form;
  if (is_zdt(name)) {
    spec.dimension = dimension > 0 ? dimension : 3;
    spec.objectives = objectives > 0 ? objectives : 2;
    if (spec.objectives != 2) throw std::invalid_argument("ZDT problems have exactly 2 objectives");
    if (spec.dimension < 2) throw std::invalid_argument("ZDT problems need d >= 2");
    spec.bounds = Bounds::unit(spec.dimension);
    if (name == BenchmarkName::ZDT4) {
      spec.bounds.lower.tail(spec.dimension - 1).setConstant(-5.0);
      spec.bounds.upper.tail(spec.dimension - 1).setConstant(5.0);
    }
  } else {
    spec.dimension = dimension > 0 ? dimension : 4;
    spec.objectives = objectives > 0 ? objectives : 3;
    if (spec.objectives < 2) throw std::invalid_argument("DTLZ problems need M >= 2");
    if (spec.k() < 1) throw std::invalid_argument("DTLZ problems need d >= M (k = d - M + 1 >= 1)");
    spec.bounds = Bounds::unit(spec.dimension);
  }
  return spec;
}

Vector evaluate(const BenchmarkSpec& spec, const Vector& x) {
  if (x.size() != spec.dimension) throw std::invalid_argument("evaluate: input dimension mismatch");
  if (!x.allFinite() || !spec.bounds.contains(x)) {
    throw std::invalid_argument("evaluate: input outside the benchmark bounds");
  }
  return is_zdt(spec.name) ? evaluate_zdt(spec, x) : evaluate_dtlz(spec, x);
}

double zdt6_f1_minimum() {
  static const double cached = [] {
    constexpr int kGrid = 100000;
    int best = 0;
    for (int i = 1; i <= kGrid; ++i) {
      if (zdt6_f1(static_cast<double>(i) / kGrid) < zdt6_f1(static_cast<double>(best) / kGrid)) best = i;
    }
    double lo = std::max(0.0, (best - 1.0) / kGrid);
    double hi = std::min(1.0, (best + 1.0) / kGrid);
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      const double a = hi - ratio * (hi - lo);
      const double b = lo + ratio * (hi - lo);
      if (zdt6_f1(a) < zdt6_f1(b)) {
        hi = b;
      } else {
        lo = a;
      }
    }
    return zdt6_f1(0.5 * (lo + hi));
  }();
  return cached;
}

TrueFront true_front(const BenchmarkSpec& spec, int resolution) {
  if (resolution < 2) throw std::invalid_argument("true_front: resolution must be at least 2");
  TrueFront front;
  front.resolution = resolution;
  auto linspace = [](double a, double b, int n, int i) { return a + (b - a) * i / (n - 1); };

  switch (spec.name) {
    case BenchmarkName::ZDT1:
    case BenchmarkName::ZDT4:
    case BenchmarkName::ZDT2:
    case BenchmarkName::ZDT6: {
      const double start = spec.name == BenchmarkName::ZDT6 ? zdt6_f1_minimum() : 0.0;
      const bool concave = spec.name == BenchmarkName::ZDT2 || spec.name == BenchmarkName::ZDT6;
      for (int i = 0; i < resolution; ++i) {
        const double f1 = linspace(start, 1.0, resolution, i);
        Vector f(2);
        f << f1, concave ? 1.0 - f1 * f1 : 1.0 - std::sqrt(f1);
        front.points.push_back(f);
      }
      return front;
    }
    case BenchmarkName::ZDT3: {
      const int n = std::max(resolution, 10000);
      PointSet curve;
      for (int i = 0; i < n; ++i) {
        const double f1 = linspace(0.0, 1.0, n, i);
        Vector f(2);
        f << f1, 1.0 - std::sqrt(f1) - f1 * std::sin(10.0 * pi * f1);
        curve.push_back(f);
      }
      front.points = nondominated(curve);
      return front;
    }
    case BenchmarkName::DTLZ1: {
      // The scaled form's g also runs over the position variables, so the
      // flat simplex is only attained at its centre; use the grid below.
      if (spec.form == BenchmarkForm::Scaled) break;
      std::vector<std::vector<int>> comps;
      std::vector<int> current;
      compositions(resolution - 1, static_cast<int>(spec.objectives), current, comps);
      for (const auto& c : comps) {
        Vector f(spec.objectives);
        for (Eigen::Index j = 0; j < spec.objectives; ++j) f[j] = 0.5 * c[j] / (resolution - 1.0);
        front.points.push_back(f);
      }
      return front;
    }
    default:
      break;
  }

  // DTLZ2-6: grid over position variables, distance variables at their optimum.
  const Eigen::Index positions = spec.objectives - 1;
  const double optimum = spec.name == BenchmarkName::DTLZ6 ? 0.0 : 0.5;
  Vector x = Vector::Constant(spec.dimension, optimum);
  std::vector<int> index(static_cast<std::size_t>(positions), 0);
  PointSet images;
  while (true) {
    for (Eigen::Index i = 0; i < positions; ++i) x[i] = linspace(0.0, 1.0, resolution, index[i]);
    images.push_back(evaluate(spec, x));
    Eigen::Index carry = 0;
    while (carry < positions && ++index[carry] == resolution) {
      index[carry] = 0;
      ++carry;
    }
    if (carry == positions) break;
  }
  front.points = nondominated(dedupe(std::move(images)));
  return front;
}

}  // namespace mobo
