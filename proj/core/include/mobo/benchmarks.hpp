#pragma once

#include "mobo/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mobo {

enum class BenchmarkName { ZDT1, ZDT2, ZDT3, ZDT4, ZDT6, DTLZ1, DTLZ2, DTLZ3, DTLZ4, DTLZ5, DTLZ6 };

/// Which DTLZ definition to evaluate. `Scaled` puts a 0.5 prefactor on every
/// objective, sums the DTLZ1 g over all d variables, uses x (not x^alpha or
/// theta) inside the sine factors and multiplies theta_i by pi/2 inside the
/// cosines. `Canonical` is the standard DTLZ suite. ZDT problems are
/// identical in both.
enum class BenchmarkForm { Scaled, Canonical };

std::string_view to_string(BenchmarkName name);
std::optional<BenchmarkName> parse_benchmark_name(std::string_view name);
std::vector<std::string> benchmark_names();
bool is_zdt(BenchmarkName name);

struct BenchmarkSpec {
  BenchmarkName name = BenchmarkName::ZDT1;
  Eigen::Index dimension = 3;
  Eigen::Index objectives = 2;
  double alpha = 100.0;  ///< DTLZ4 exponent
  BenchmarkForm form = BenchmarkForm::Scaled;
  Bounds bounds;

  /// Fill in bounds and check the dimension rules. d = 0 or M = 0 selects the
  /// defaults (ZDT: d = 3, M = 2; DTLZ: d = 4, M = 3).
  static BenchmarkSpec make(BenchmarkName name, Eigen::Index dimension = 0,
                            Eigen::Index objectives = 0, BenchmarkForm form = BenchmarkForm::Scaled);

  /// Number of distance variables k = d - M + 1 for DTLZ problems.
  Eigen::Index k() const { return dimension - objectives + 1; }
};

/// Objective vector at x. Throws std::invalid_argument outside the bounds.
Vector evaluate(const BenchmarkSpec& spec, const Vector& x);

struct TrueFront {
  PointSet points;
  int resolution = 0;
};

/// Discretized Pareto front; every emitted point is nondominated in the set.
///
/// ZDT1/2/4/6 use `resolution` evenly spaced f1 values. ZDT3 filters a grid of
/// max(resolution, 10^4) values. Canonical DTLZ1 lays a simplex lattice with
/// `resolution` points per edge on sum f = 0.5. Scaled DTLZ1 and DTLZ2-6
/// evaluate a `resolution`^(M-1) grid over the position variables at the
/// optimal distance variables and keep the nondominated, deduplicated images.
TrueFront true_front(const BenchmarkSpec& spec, int resolution);

/// Minimum of the ZDT6 first objective over x1 in [0,1] (computed once).
double zdt6_f1_minimum();

}  // namespace mobo
