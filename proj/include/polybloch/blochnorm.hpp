#ifndef POLYBLOCH_BLOCHNORM_HPP
#define POLYBLOCH_BLOCHNORM_HPP

#include <vector>

#include "polybloch/holo.hpp"
#include "polybloch/polydisc.hpp"
#include "polybloch/types.hpp"

namespace polybloch {

/// Source/target Bloch exponents of a composition-operator analysis.
struct BlochParams {
  double p = 1.0;
  double q = 1.0;
};

void validate(const BlochParams& params);

enum class ConvergenceFlag { saturated, still_growing };

struct NormEstimate {
  double value = 0.0;        // origin_term + estimated seminorm supremum
  PolydiscPoint witness;     // argmax of the integrand
  double origin_term = 0.0;  // |f(0)| contribution
  int shells_used = 0;
  ConvergenceFlag convergence_flag = ConvergenceFlag::saturated;
  /// Running maximum after each shell (diagnostic; drives the flag).
  std::vector<double> shell_history;
};

/// sum_k |df/dz_k(z)| (1 - |z_k|^2)^p.
double seminorm_integrand(const HoloExpr& f, const PolydiscPoint& z, double p);

/// |f(0)| + estimated sup of the seminorm integrand over stratified samples,
/// polished by local refinement. A lower bound of the true norm; the
/// convergence flag reports whether the last shells were still improving it.
NormEstimate bloch_norm(const HoloExpr& f, double p, const SampleBudget& budget);

/// ||m^{p-1} z_1^m||_p in closed form:
/// (2p/(2p+m-1))^p m^p ((m-1)/(2p+m-1))^{(m-1)/2}, the maximum over [0,1]
/// of m^p (1-x^2)^p x^{m-1}. Tends to (2p/e)^p as m grows.
double exact_monomial_norm(int m, double p);

/// Minimum over the annulus r_m <= |z_1| <= r_{m+1} of the normalized
/// monomial's seminorm integrand:
/// ((2p+m-1)/(2p+m))^p (m(2p+m-1)/((m-1)(2p+m)))^{(m-1)/2}. Tends to 1.
double c_m(int m, double p);

enum class Membership { member, non_member, inconclusive };

struct DecayProfile {
  std::vector<double> gaps;  // the eta schedule
  std::vector<double> sups;  // T(eta): near-torus integrand suprema
};

struct StarMembershipReport {
  Membership verdict = Membership::inconclusive;
  DecayProfile profile;
};

/// Numeric test of membership in the little star p-Bloch space: T(eta) is
/// the integrand supremum over points with star_boundary_gap < eta. Member
/// when T decays below 1e-2 with a monotone trend, non-member when the last
/// levels stabilize above 5e-2, else inconclusive.
StarMembershipReport membership_little_star(
    const HoloExpr& f, double p, const std::vector<double>& gap_schedule,
    int samples_per_level = 512, std::uint64_t seed = 1);

/// Gap schedule reaching deep enough that a decaying integrand of order
/// eta^p can cross the 1e-2 membership threshold.
std::vector<double> default_gap_schedule(double p);

struct LittleMembershipReport {
  Membership verdict = Membership::inconclusive;
  double tail_bound = 0.0;     // polynomial-approximation certificate
  int truncation_degree = 0;   // degree at which the certificate was reached
};

/// Structural membership in the little p-Bloch space (polynomial closure):
/// polynomials are members by definition; PowPrim/LogPrim via the truncated
/// series tail bound; dilations are members for any inner function.
LittleMembershipReport membership_little(const HoloExpr& f, double p);

}  // namespace polybloch

#endif  // POLYBLOCH_BLOCHNORM_HPP
