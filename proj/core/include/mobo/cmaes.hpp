#pragma once

#include "mobo/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mobo {

struct CmaesConfig {
  int population_size = 0;     ///< 0 selects 4 + floor(3 ln d)
  double sigma0 = 0.0;         ///< 0 selects 0.3 x mean box width
  int max_evals = 1000;
  double tol_fun = 1e-12;      ///< relative spread of recent best values
  double tol_x = 1e-12;        ///< step size relative to the mean box width
  std::uint64_t seed = 0;
  std::optional<Vector> x0;    ///< initial mean; uniform in the box when unset
};

struct CmaesResult {
  Vector x_best;
  double f_best = 0.0;
  int evaluations = 0;
  int generations = 0;
  std::vector<double> best_history;  ///< running best after each generation
  std::string stop_reason;
  double min_covariance_eigenvalue = 0.0;  ///< smallest eigenvalue seen after flooring
};

/// Minimize `objective` over `bounds` with a (mu/mu_w, lambda) CMA-ES.
///
/// Candidates leaving the box are resampled up to 10 times, then clamped; the
/// clamped point is evaluated and the rank fitness carries a quadratic
/// distance penalty scaled by the generation's fitness range. Non-finite
/// objective values rank as +inf. `x_best` is always inside the box and
/// `f_best == objective(x_best)`.
CmaesResult cmaes_minimize(const std::function<double(const Vector&)>& objective,
                           const Bounds& bounds, const CmaesConfig& config);

}  // namespace mobo
