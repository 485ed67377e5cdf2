#ifndef POLYBLOCH_POLYDISC_HPP
#define POLYBLOCH_POLYDISC_HPP

#include <functional>
#include <vector>

#include "polybloch/types.hpp"

namespace polybloch {

/// Distance from w to the topological boundary of U^n, as used by the
/// delta-regions {dist(phi(z), dU^n) < delta}: min_k (1 - |w_k|).
/// Zero iff some coordinate has modulus 1. Rejects |w_k| > 1 + tol.
double boundary_dist(const PolydiscPoint& w);

/// Gap to the distinguished boundary (the torus |w_1|=...=|w_n|=1):
/// max_k (1 - |w_k|). Zero iff w lies on the torus.
double star_boundary_gap(const PolydiscPoint& w);

/// True when every coordinate has modulus < 1.
bool is_interior(const PolydiscPoint& w);

/// Caps every coordinate modulus at kInteriorCap, keeping arguments.
PolydiscPoint clamp_interior(PolydiscPoint w);

/// Boundary-stratified deterministic sample of U^n. Shell j = 0..S-1 uses
/// radius r_j = 1 - 2^{-j-1}; coordinate moduli follow an r_j-scaled
/// low-discrepancy pattern and arguments are low-discrepancy on the torus.
/// Emits shell_count * angular_samples_per_shell points, shell-major.
std::vector<PolydiscPoint> sample_stratified(int n, const SampleBudget& budget);

/// Deterministic sample of the near-torus region: every coordinate modulus
/// lies in (1 - gap, 1), so star_boundary_gap < gap for all points.
std::vector<PolydiscPoint> sample_near_torus(int n, double gap, int count,
                                             std::uint64_t seed);

using Objective = std::function<double(const PolydiscPoint&)>;

struct RefineResult {
  PolydiscPoint point;
  double value = 0.0;
};

/// Derivative-free hill climbing: coordinate-wise radial/angular moves with
/// a shrinking step. One step = one full sweep over coordinates and move
/// types. Never decreases the objective; the iterate never leaves the open
/// polydisc (moduli capped at kInteriorCap). steps == 0 returns the start.
RefineResult refine_local(const Objective& objective,
                          const PolydiscPoint& start, int steps);

struct SupEstimate {
  double value = 0.0;
  PolydiscPoint witness;
  /// Running maximum after each shell, before refinement.
  std::vector<double> shell_history;
  /// True when the last two shells still improved the running max by more
  /// than 1% relative — the supremum is likely not yet saturated.
  bool still_growing = false;
};

/// Stratified-sample supremum estimate: evaluates the objective over
/// sample_stratified(n, budget), then polishes the top candidates with
/// refine_local. The estimate is a lower bound of the true supremum.
/// An infinite objective value short-circuits with that witness.
SupEstimate estimate_sup(const Objective& objective, int n,
                         const SampleBudget& budget);

}  // namespace polybloch

#endif  // POLYBLOCH_POLYDISC_HPP
