#ifndef POLYBLOCH_COMPOP_HPP
#define POLYBLOCH_COMPOP_HPP

#include <string>
#include <vector>

#include "polybloch/blochnorm.hpp"
#include "polybloch/holo.hpp"
#include "polybloch/types.hpp"

namespace polybloch {

/// The boundedness functional of C_phi between the p- and q-Bloch spaces:
/// sum_{k,l} |d phi_l / d z_k (z)| (1-|z_k|^2)^q / (1-|phi_l(z)|^2)^p.
/// Returns +infinity when some |phi_l(z)| >= 1 (certificate-violating map).
double functional_B(const PolyMap& phi, const PolydiscPoint& z,
                    const BlochParams& params);

/// Global supremum estimate of functional_B. A still_growing flag signals
/// likely unboundedness; an infinite value carries the offending witness.
NormEstimate sup_B(const PolyMap& phi, const BlochParams& params,
                   const SampleBudget& budget);

enum class ProfileTrend { vanishing, positive_limit, growing, empty_region };

struct BoundaryProfileEntry {
  double delta = 0.0;
  double sup = 0.0;        // 0 for empty bins (sup over empty region := 0)
  long sample_count = 0;   // samples with dist(phi(z), dU^n) < delta
  bool sparse = false;     // nonempty but below 32 samples
};

/// The profile delta |-> S(delta) = sup over {dist(phi(z), dU^n) < delta} of
/// functional_B, on nested bins of one master sample, with its extrapolated
/// limit L. L brackets the essential norm as [L/n, 2L].
struct BoundaryProfile {
  std::vector<BoundaryProfileEntry> entries;  // deltas strictly decreasing
  double L_estimate = 0.0;
  ProfileTrend trend = ProfileTrend::empty_region;
};

/// delta_j = 2^{-j}, j = 1..levels.
std::vector<double> default_delta_schedule(int levels = 12);

BoundaryProfile boundary_profile(const PolyMap& phi, const BlochParams& params,
                                 const std::vector<double>& deltas,
                                 const SampleBudget& budget);

struct EssentialNormBracket {
  double lower = 0.0;  // L / n
  double upper = 0.0;  // 2 L
};

EssentialNormBracket essential_norm_bracket(const BoundaryProfile& profile,
                                            int n);

enum class Verdict { likely, unlikely, inconclusive };

struct PairVerdict {
  std::string pair;      // e.g. "B^p -> B^q"
  Verdict bounded = Verdict::inconclusive;
  Verdict compact = Verdict::inconclusive;
  std::string note;      // e.g. necessary-only caveats
};

struct ClassificationReport {
  int dimension = 0;
  BlochParams params;
  SelfMapCertificate certificate;

  Verdict bounded = Verdict::inconclusive;
  NormEstimate sup_estimate;

  /// Theorem-2 criterion: the boundary limit of functional_B vanishes.
  Verdict criterion_eq4 = Verdict::inconclusive;
  Verdict compact = Verdict::inconclusive;  // for B^p -> B^q
  BoundaryProfile profile;

  bool bracket_valid = false;  // suppressed for likely-unbounded maps
  EssentialNormBracket bracket;

  /// Per-component membership of phi_l in the little star q-Bloch space.
  std::vector<Membership> component_star;
  struct PowerMembership {
    Eigen::VectorXi gamma;
    Membership verdict = Membership::inconclusive;
  };
  /// Membership of phi^gamma in the little q-Bloch space, |gamma| <= cap.
  std::vector<PowerMembership> power_little;
  int degree_cap = 4;

  std::vector<PairVerdict> pairs;

  // Thresholds the verdicts used.
  double compact_L_tolerance = 1e-3;
  double unbounded_growth_ratio = 1.25;
};

/// Full pipeline: boundedness, compactness, memberships and per-space-pair
/// verdicts per the polydisc composition-operator criteria.
ClassificationReport classify(const PolyMap& phi, const BlochParams& params,
                              const SampleBudget& budget, int degree_cap = 4);

enum class TestFamily { fw_grid, monomials };

/// max over normalized family members f of ||f o phi||_q / ||f||_p — an
/// empirical lower bound for the operator norm.
double empirical_opnorm_lower(const PolyMap& phi, const BlochParams& params,
                              TestFamily family, const SampleBudget& budget);

}  // namespace polybloch

#endif  // POLYBLOCH_COMPOP_HPP
