#ifndef POLYBLOCH_TYPES_HPP
#define POLYBLOCH_TYPES_HPP

#include <complex>
#include <cstdint>
#include <stdexcept>

#include <Eigen/Dense>

namespace polybloch {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

/// Modulus cap for interior points produced by samplers and refiners.
/// Keeps (1-|z_k|^2)^{-p} style factors finite downstream.
inline constexpr double kInteriorCap = 1.0 - 0x1p-48;

/// Slack accepted when validating closed-polydisc membership.
inline constexpr double kClosedTol = 1e-9;

/// A point of the polydisc U^n (or its closure); coords(k) is the k-th
/// coordinate. Invariants are enforced by the operations that consume
/// points, not by the struct itself.
struct PolydiscPoint {
  CVector coords;

  PolydiscPoint() = default;
  explicit PolydiscPoint(CVector c) : coords(std::move(c)) {}

  int dim() const { return static_cast<int>(coords.size()); }

  static PolydiscPoint origin(int n) {
    return PolydiscPoint(CVector::Zero(n));
  }
};

/// Deterministic sampling budget. Identical budgets and seeds yield
/// bitwise-identical sample sets.
struct SampleBudget {
  int shell_count = 8;
  int angular_samples_per_shell = 256;
  int refinement_steps = 200;
  std::uint64_t seed = 1;
};

inline void validate(const SampleBudget& b) {
  if (b.shell_count < 1)
    throw std::invalid_argument("SampleBudget: shell_count must be >= 1");
  if (b.angular_samples_per_shell < 1)
    throw std::invalid_argument(
        "SampleBudget: angular_samples_per_shell must be >= 1");
  if (b.refinement_steps < 0)
    throw std::invalid_argument(
        "SampleBudget: refinement_steps must be >= 0");
}

}  // namespace polybloch

#endif  // POLYBLOCH_TYPES_HPP
