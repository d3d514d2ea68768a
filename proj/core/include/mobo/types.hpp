#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <vector>

namespace mobo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using PointSet = std::vector<Vector>;

// All stochastic components draw from this engine so that a seed pins a run.
using Rng = std::mt19937_64;

/// Axis-aligned box [lower, upper] in input space.
struct Bounds {
  Vector lower;
  Vector upper;

  Bounds() = default;
  Bounds(Vector lo, Vector hi);

  static Bounds unit(Eigen::Index d) { return {Vector::Zero(d), Vector::Ones(d)}; }

  Eigen::Index dimension() const { return lower.size(); }
  Vector width() const { return upper - lower; }
  bool contains(const Vector& x) const;
  Vector clamp(const Vector& x) const;
  Vector sample(Rng& rng) const;
};

/// Uniform draw in [0, 1). Kept separate from std::uniform_real_distribution so
/// that sequences do not depend on the standard library implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Standard normal draw (Box-Muller, one value per call).
double standard_normal(Rng& rng);

/// Derive an independent engine for a (seed, stream) pair.
inline Rng derive_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

}  // namespace mobo
