#include "polybloch/compop.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace polybloch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// min(1 - |phi_l(z)|) without closed-polydisc validation; negative when the
// image escapes (certificate-violating map).
double image_boundary_dist_raw(const PolyMap& phi, const PolydiscPoint& z) {
  double dmin = 1.0;
  for (int l = 0; l < phi.dim(); ++l)
    dmin = std::min(dmin, 1.0 - std::abs(phi.components[l].eval(z.coords)));
  return dmin;
}

int verdict_rank(Verdict v) {
  switch (v) {
    case Verdict::unlikely: return 0;
    case Verdict::inconclusive: return 1;
    case Verdict::likely: return 2;
  }
  return 1;
}

Verdict combine(std::initializer_list<Verdict> vs) {
  Verdict out = Verdict::likely;
  for (Verdict v : vs)
    if (verdict_rank(v) < verdict_rank(out)) out = v;
  return out;
}

Verdict membership_verdict(Membership m) {
  switch (m) {
    case Membership::member: return Verdict::likely;
    case Membership::non_member: return Verdict::unlikely;
    case Membership::inconclusive: return Verdict::inconclusive;
  }
  return Verdict::inconclusive;
}

// Multi-indices of total degree 1..cap in graded-lex order.
void enumerate_multi_indices(int n, int cap,
                             std::vector<Eigen::VectorXi>& out) {
  Eigen::VectorXi gamma = Eigen::VectorXi::Zero(n);
  for (int total = 1; total <= cap; ++total) {
    // first composition: everything on the last axis
    std::function<void(int, int)> rec = [&](int axis, int remaining) {
      if (axis == n - 1) {
        gamma(axis) = remaining;
        out.push_back(gamma);
        return;
      }
      for (int g = remaining; g >= 0; --g) {
        gamma(axis) = g;
        rec(axis + 1, remaining - g);
      }
    };
    rec(0, total);
  }
}

}  // namespace

double functional_B(const PolyMap& phi, const PolydiscPoint& z,
                    const BlochParams& params) {
  validate(params);
  if (z.dim() != phi.dim())
    throw std::invalid_argument("functional_B: dimension mismatch");
  if (!is_interior(z))
    throw std::invalid_argument("functional_B: point must be interior");

  const int n = phi.dim();
  std::vector<double> image_weight(n);
  for (int l = 0; l < n; ++l) {
    double a2 = std::norm(phi.components[l].eval(z.coords));
    if (a2 >= 1.0) return kInf;
    image_weight[l] = std::pow(1.0 - a2, params.p);
  }
  CMatrix jac = map_jacobian(phi, z);
  double acc = 0.0;
  for (int k = 0; k < n; ++k) {
    double zk_weight = std::pow(1.0 - std::norm(z.coords(k)), params.q);
    for (int l = 0; l < n; ++l)
      acc += std::abs(jac(l, k)) * zk_weight / image_weight[l];
  }
  return acc;
}

NormEstimate sup_B(const PolyMap& phi, const BlochParams& params,
                   const SampleBudget& budget) {
  validate(params);
  validate(budget);
  Objective objective = [&](const PolydiscPoint& z) {
    return functional_B(phi, z, params);
  };
  SupEstimate sup = estimate_sup(objective, phi.dim(), budget);
  NormEstimate est;
  est.value = sup.value;
  est.witness = std::move(sup.witness);
  est.origin_term = 0.0;
  est.shells_used = budget.shell_count;
  est.convergence_flag = sup.still_growing ? ConvergenceFlag::still_growing
                                           : ConvergenceFlag::saturated;
  est.shell_history = std::move(sup.shell_history);
  return est;
}

std::vector<double> default_delta_schedule(int levels) {
  if (levels < 1)
    throw std::invalid_argument("default_delta_schedule: levels >= 1");
  std::vector<double> deltas(levels);
  for (int j = 0; j < levels; ++j) deltas[j] = std::ldexp(1.0, -(j + 1));
  return deltas;
}

BoundaryProfile boundary_profile(const PolyMap& phi, const BlochParams& params,
                                 const std::vector<double>& deltas,
                                 const SampleBudget& budget) {
  validate(params);
  validate(budget);
  if (deltas.empty())
    throw std::invalid_argument("boundary_profile: empty delta schedule");
  for (std::size_t j = 0; j + 1 < deltas.size(); ++j)
    if (!(deltas[j] > deltas[j + 1]))
      throw std::invalid_argument(
          "boundary_profile: delta schedule must be strictly decreasing");
  if (!(deltas.front() < 1.0 && deltas.back() > 0.0))
    throw std::invalid_argument(
        "boundary_profile: deltas must lie in (0, 1)");

  const int n = phi.dim();
  const int levels = static_cast<int>(deltas.size());

  // The deepest bins need image distances below deltas.back(); give the
  // master sample enough shells to reach them.
  SampleBudget master = budget;
  master.shell_count = std::max(budget.shell_count, levels + 2);
  std::vector<PolydiscPoint> samples = sample_stratified(n, master);

  struct Scored {
    double value;
    int deepest;  // largest j with dist < deltas[j]; -1 when in no bin
    std::size_t index;
  };
  std::vector<Scored> scored;
  scored.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double d = image_boundary_dist_raw(phi, samples[i]);
    int deepest = -1;
    while (deepest + 1 < levels && d < deltas[deepest + 1]) ++deepest;
    double B = (deepest >= 0) ? functional_B(phi, samples[i], params) : 0.0;
    scored.push_back({B, deepest, i});
  }

  std::vector<double> sup_at(levels, 0.0);
  std::vector<long> count_at(levels, 0);
  for (const Scored& s : scored) {
    for (int j = 0; j <= s.deepest; ++j) {
      ++count_at[j];
      sup_at[j] = std::max(sup_at[j], s.value);
    }
  }

  // Polish the top candidates of each nonempty bin, constrained to stay in
  // the bin's image region.
  for (int j = 0; j < levels; ++j) {
    if (count_at[j] == 0 || std::isinf(sup_at[j])) continue;
    std::vector<const Scored*> bin;
    for (const Scored& s : scored)
      if (s.deepest >= j) bin.push_back(&s);
    std::size_t top = std::min<std::size_t>(4, bin.size());
    std::partial_sort(bin.begin(), bin.begin() + top, bin.end(),
                      [](const Scored* a, const Scored* b) {
                        if (a->value != b->value) return a->value > b->value;
                        return a->index < b->index;
                      });
    const double delta_j = deltas[j];
    Objective constrained = [&](const PolydiscPoint& z) -> double {
      if (!(image_boundary_dist_raw(phi, z) < delta_j)) return -kInf;
      return functional_B(phi, z, params);
    };
    for (std::size_t c = 0; c < top; ++c) {
      RefineResult r = refine_local(constrained, samples[bin[c]->index],
                                    budget.refinement_steps);
      sup_at[j] = std::max(sup_at[j], r.value);
    }
  }

  // Bins are nested, so suprema are nonincreasing along the schedule.
  for (int j = levels - 2; j >= 0; --j)
    sup_at[j] = std::max(sup_at[j], sup_at[j + 1]);

  BoundaryProfile profile;
  profile.entries.reserve(levels);
  for (int j = 0; j < levels; ++j) {
    BoundaryProfileEntry e;
    e.delta = deltas[j];
    e.sample_count = count_at[j];
    e.sup = (count_at[j] > 0) ? sup_at[j] : 0.0;
    e.sparse = count_at[j] > 0 && count_at[j] < 32;
    profile.entries.push_back(e);
  }

  if (count_at[levels - 1] == 0) {
    // The region is unreachable from some delta on; its limit is 0.
    profile.trend = ProfileTrend::empty_region;
    profile.L_estimate = 0.0;
    return profile;
  }

  profile.L_estimate = sup_at[levels - 1];
  if (std::isinf(profile.L_estimate)) {
    profile.trend = ProfileTrend::growing;
    return profile;
  }
  if (profile.L_estimate <= 0.0) {
    profile.trend = ProfileTrend::vanishing;
    return profile;
  }

  // Least-squares slope of the last three log-sup values.
  const int t = std::min(3, levels);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < t; ++i) {
    double x = static_cast<double>(levels - t + i);
    double y = std::log(std::max(sup_at[levels - t + i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = t * sxx - sx * sx;
  double slope = (denom > 0.0) ? (t * sxy - sx * sy) / denom : 0.0;
  if (slope < -1e-2)
    profile.trend = ProfileTrend::vanishing;
  else if (slope > 1e-2)
    profile.trend = ProfileTrend::growing;
  else
    profile.trend = ProfileTrend::positive_limit;
  return profile;
}

EssentialNormBracket essential_norm_bracket(const BoundaryProfile& profile,
                                            int n) {
  if (n < 1) throw std::invalid_argument("essential_norm_bracket: n >= 1");
  return EssentialNormBracket{profile.L_estimate / n,
                              2.0 * profile.L_estimate};
}

ClassificationReport classify(const PolyMap& phi, const BlochParams& params,
                              const SampleBudget& budget, int degree_cap) {
  validate(params);
  validate(budget);
  if (degree_cap < 1)
    throw std::invalid_argument("classify: degree_cap must be >= 1");

  ClassificationReport report;
  report.dimension = phi.dim();
  report.params = params;
  report.certificate = phi.certificate;
  report.degree_cap = degree_cap;

  // Boundedness (Eq. (9) supremum).
  report.sup_estimate = sup_B(phi, params, budget);
  const NormEstimate& sup = report.sup_estimate;
  if (std::isinf(sup.value)) {
    report.bounded = Verdict::unlikely;
  } else if (sup.convergence_flag == ConvergenceFlag::saturated) {
    report.bounded = Verdict::likely;
  } else {
    const auto& h = sup.shell_history;
    double ratio = 0.0;
    if (h.size() >= 3 && h[h.size() - 3] > 0.0)
      ratio = h.back() / h[h.size() - 3];
    report.bounded = (ratio > report.unbounded_growth_ratio)
                         ? Verdict::unlikely
                         : Verdict::inconclusive;
  }

  // Compactness criterion: boundary limit of the functional vanishes.
  report.profile =
      boundary_profile(phi, params, default_delta_schedule(12), budget);
  switch (report.profile.trend) {
    case ProfileTrend::empty_region:
      report.criterion_eq4 = Verdict::likely;
      break;
    case ProfileTrend::vanishing:
      report.criterion_eq4 =
          (report.profile.L_estimate < report.compact_L_tolerance)
              ? Verdict::likely
              : Verdict::inconclusive;
      break;
    case ProfileTrend::positive_limit:
    case ProfileTrend::growing:
      report.criterion_eq4 =
          (report.profile.L_estimate >= report.compact_L_tolerance)
              ? Verdict::unlikely
              : Verdict::inconclusive;
      break;
  }
  report.compact = combine({report.bounded, report.criterion_eq4});

  report.bracket_valid = report.bounded != Verdict::unlikely;
  report.bracket = essential_norm_bracket(report.profile, phi.dim());

  // Memberships for the little-space corollaries.
  for (int l = 0; l < phi.dim(); ++l) {
    StarMembershipReport star = membership_little_star(
        HoloExpr::poly(phi.components[l]), params.q,
        default_gap_schedule(params.q), 256, budget.seed ^ (l + 1));
    report.component_star.push_back(star.verdict);
  }
  std::vector<Eigen::VectorXi> gammas;
  enumerate_multi_indices(phi.dim(), degree_cap, gammas);
  for (const Eigen::VectorXi& gamma : gammas) {
    LittleMembershipReport r =
        membership_little(HoloExpr::poly(map_power(phi, gamma)), params.q);
    report.power_little.push_back({gamma, r.verdict});
  }

  Verdict star_all = Verdict::likely;
  for (Membership m : report.component_star)
    star_all = combine({star_all, membership_verdict(m)});
  Verdict power_all = Verdict::likely;
  for (const auto& pm : report.power_little)
    power_all = combine({power_all, membership_verdict(pm.verdict)});

  const Verdict eq4 = report.criterion_eq4;
  const Verdict bounded = report.bounded;

  report.pairs.push_back(
      {"B^p -> B^q", bounded, combine({bounded, eq4}), ""});
  report.pairs.push_back({"B^p_{0*} -> B^q_{0*}",
                          combine({bounded, star_all}),
                          combine({bounded, star_all, eq4}),
                          "requires phi_l in B^q_{0*} for every l"});
  report.pairs.push_back({"B^p_0 -> B^q_0", combine({bounded, power_all}),
                          combine({bounded, power_all, eq4}),
                          "requires phi^gamma in B^q_0 up to the degree cap"});

  // Necessary-only pairs: failing criteria refute, passing ones cannot
  // certify (sufficiency open).
  auto necessary_only = [](Verdict v) {
    return v == Verdict::unlikely ? Verdict::unlikely : Verdict::inconclusive;
  };
  report.pairs.push_back({"B^p -> B^q_{0*}",
                          necessary_only(combine({bounded, star_all})),
                          necessary_only(combine({bounded, star_all, eq4})),
                          "criterion necessary-only; sufficiency open"});
  report.pairs.push_back({"B^p -> B^q_0",
                          necessary_only(combine({bounded, power_all})),
                          necessary_only(combine({bounded, power_all, eq4})),
                          "criterion necessary-only; sufficiency open"});
  report.pairs.push_back({"B^p_{0*} -> B^q_0",
                          necessary_only(combine({bounded, power_all})),
                          necessary_only(combine({bounded, power_all, eq4})),
                          "criterion necessary-only; sufficiency open"});
  return report;
}

double empirical_opnorm_lower(const PolyMap& phi, const BlochParams& params,
                              TestFamily family, const SampleBudget& budget) {
  validate(params);
  validate(budget);
  const int n = phi.dim();
  double best = 0.0;

  if (family == TestFamily::monomials) {
    static const int ms[] = {2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192};
    for (int axis = 0; axis < n; ++axis) {
      for (int m : ms) {
        HoloExpr f = monomial_family(n, m, params.p, axis);
        double v =
            bloch_norm(HoloExpr::composed(f, phi), params.q, budget).value;
        best = std::max(best, v);  // ||f||_p = 1 by construction
      }
    }
    return best;
  }

  static const double radii[] = {0.3, 0.6, 0.9};
  for (int axis = 0; axis < n; ++axis) {
    for (double r : radii) {
      for (int t = 0; t < 4; ++t) {
        Complex w = std::polar(r, t * std::numbers::pi / 2.0);
        HoloExpr f = test_fn_fw(n, w, axis, params.p);
        double nf = bloch_norm(f, params.p, budget).value;
        if (!(nf > 0.0)) continue;
        double v =
            bloch_norm(HoloExpr::composed(f, phi), params.q, budget).value;
        best = std::max(best, v / nf);
      }
    }
  }
  return best;
}

}  // namespace polybloch
