#include "polybloch/blochnorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <variant>

namespace polybloch {

void validate(const BlochParams& params) {
  if (!(params.p > 0.0) || !std::isfinite(params.p))
    throw std::invalid_argument("BlochParams: p must be finite and > 0");
  if (!(params.q > 0.0) || !std::isfinite(params.q))
    throw std::invalid_argument("BlochParams: q must be finite and > 0");
}

double seminorm_integrand(const HoloExpr& f, const PolydiscPoint& z, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("seminorm_integrand: p > 0");
  CVector g = grad(f, z);
  double acc = 0.0;
  for (int k = 0; k < z.dim(); ++k) {
    double one_minus = 1.0 - std::norm(z.coords(k));
    acc += std::abs(g(k)) * std::pow(one_minus, p);
  }
  return acc;
}

NormEstimate bloch_norm(const HoloExpr& f, double p, const SampleBudget& budget) {
  if (!(p > 0.0)) throw std::invalid_argument("bloch_norm: p > 0");
  validate(budget);
  const int n = f.vars();

  Objective integrand = [&](const PolydiscPoint& z) -> double {
    try {
      return seminorm_integrand(f, z, p);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "bloch_norm: evaluation failed at z = (";
      for (int k = 0; k < z.dim(); ++k) {
        if (k) os << ", ";
        os << z.coords(k).real() << (z.coords(k).imag() < 0 ? "-" : "+")
           << std::abs(z.coords(k).imag()) << "i";
      }
      os << "): " << e.what();
      throw std::runtime_error(os.str());
    }
  };

  SupEstimate sup = estimate_sup(integrand, n, budget);

  NormEstimate est;
  est.origin_term = std::abs(eval(f, PolydiscPoint::origin(n)));
  est.value = est.origin_term + sup.value;
  est.witness = std::move(sup.witness);
  est.shells_used = budget.shell_count;
  est.convergence_flag = sup.still_growing ? ConvergenceFlag::still_growing
                                           : ConvergenceFlag::saturated;
  est.shell_history = std::move(sup.shell_history);
  return est;
}

double exact_monomial_norm(int m, double p) {
  if (m < 2) throw std::invalid_argument("exact_monomial_norm: m >= 2");
  if (!(p > 0.0)) throw std::invalid_argument("exact_monomial_norm: p > 0");
  const double md = m, s = 2.0 * p + md - 1.0;
  // (2pm/s)^p * ((m-1)/s)^{(m-1)/2}, with the second factor through log1p
  // for stability at large m.
  double first = std::exp(p * std::log(2.0 * p * md / s));
  double second = std::exp(0.5 * (md - 1.0) * std::log1p(-2.0 * p / s));
  return first * second;
}

double c_m(int m, double p) {
  if (m < 2) throw std::invalid_argument("c_m: m >= 2");
  if (!(p > 0.0)) throw std::invalid_argument("c_m: p > 0");
  const double md = m;
  // Ratio of the integrand at r_{m+1} to the norm maximum at r_m; both
  // carry the (...)^p radial factor, so the first quotient is raised to p.
  double first = std::exp(p * std::log1p(-1.0 / (2.0 * p + md)));
  double ratio = 2.0 * p / ((md - 1.0) * (2.0 * p + md));  // x - 1 exactly
  double second = std::exp(0.5 * (md - 1.0) * std::log1p(ratio));
  return first * second;
}

std::vector<double> default_gap_schedule(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("default_gap_schedule: p > 0");
  const double first = 0.25;
  const double last = std::min(1e-4, 0.5 * std::pow(3e-3, 1.0 / p));
  const int levels = 8;
  std::vector<double> schedule(levels);
  for (int i = 0; i < levels; ++i)
    schedule[i] = first * std::pow(last / first, i / (levels - 1.0));
  return schedule;
}

StarMembershipReport membership_little_star(
    const HoloExpr& f, double p, const std::vector<double>& gap_schedule,
    int samples_per_level, std::uint64_t seed) {
  if (!(p > 0.0))
    throw std::invalid_argument("membership_little_star: p > 0");
  if (gap_schedule.empty())
    throw std::invalid_argument("membership_little_star: empty schedule");
  for (std::size_t i = 0; i + 1 < gap_schedule.size(); ++i)
    if (!(gap_schedule[i] > gap_schedule[i + 1]))
      throw std::invalid_argument(
          "membership_little_star: schedule must be strictly decreasing");
  if (!(gap_schedule.front() <= 1.0 && gap_schedule.back() > 0.0))
    throw std::invalid_argument(
        "membership_little_star: schedule must lie in (0, 1]");

  const int n = f.vars();
  StarMembershipReport report;

  for (std::size_t level = 0; level < gap_schedule.size(); ++level) {
    const double eta = gap_schedule[level];
    auto points = sample_near_torus(n, eta, samples_per_level,
                                    seed ^ (0x9e37ULL * (level + 1)));
    Objective constrained = [&](const PolydiscPoint& z) -> double {
      if (!(star_boundary_gap(z) < eta))
        return -std::numeric_limits<double>::infinity();
      return seminorm_integrand(f, z, p);
    };
    double best = 0.0;
    std::vector<std::pair<double, std::size_t>> scored;
    scored.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      double v = seminorm_integrand(f, points[i], p);
      scored.emplace_back(v, i);
      best = std::max(best, v);
    }
    std::size_t top = std::min<std::size_t>(4, scored.size());
    std::partial_sort(scored.begin(), scored.begin() + top, scored.end(),
                      [](const auto& a, const auto& b) {
                        if (a.first != b.first) return a.first > b.first;
                        return a.second < b.second;
                      });
    for (std::size_t c = 0; c < top; ++c) {
      RefineResult r = refine_local(constrained, points[scored[c].second], 200);
      best = std::max(best, r.value);
    }
    report.profile.gaps.push_back(eta);
    report.profile.sups.push_back(best);
  }

  const std::vector<double>& T = report.profile.sups;
  const std::size_t L = T.size();

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < L; ++i)
    if (T[i + 1] > T[i] * 1.05 + 1e-12) monotone = false;

  if (T.back() < 1e-2 && monotone) {
    report.verdict = Membership::member;
  } else if (L >= 3 && T[L - 1] > 5e-2 && T[L - 2] > 5e-2 && T[L - 3] > 5e-2 &&
             T[L - 1] >= 0.5 * T[L - 3]) {
    report.verdict = Membership::non_member;
  } else {
    report.verdict = Membership::inconclusive;
  }
  return report;
}

namespace {

LittleMembershipReport little_member(double tail, int degree) {
  return LittleMembershipReport{Membership::member, tail, degree};
}

LittleMembershipReport little_from_fw(int vars, Complex w, double p, int axis) {
  for (int N = 8; N <= 1 << 16; N *= 2) {
    TaylorTruncation trunc = taylor_truncate_fw(vars, w, p, axis, N);
    if (trunc.tail_bound < 1e-6) return little_member(trunc.tail_bound, N + 1);
  }
  return LittleMembershipReport{Membership::inconclusive,
                                std::numeric_limits<double>::infinity(), 0};
}

}  // namespace

LittleMembershipReport membership_little(const HoloExpr& f, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("membership_little: p > 0");
  using N = HoloExpr::Node;
  return std::visit(
      [&](const auto& d) -> LittleMembershipReport {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, N::Poly>) {
          return little_member(0.0, d.poly.degree());
        } else if constexpr (std::is_same_v<T, N::PowPrim>) {
          return little_from_fw(f.vars(), d.w, d.p, d.axis);
        } else if constexpr (std::is_same_v<T, N::LogPrim>) {
          return little_from_fw(f.vars(), d.w, 1.0, d.axis);
        } else if constexpr (std::is_same_v<T, N::Monomial>) {
          return little_member(0.0, d.m);
        } else if constexpr (std::is_same_v<T, N::Dilated>) {
          // Dilations land in the little space for any inner function.
          return little_member(0.0, 0);
        } else if constexpr (std::is_same_v<T, N::Sum>) {
          LittleMembershipReport acc = little_member(0.0, 0);
          for (const HoloExpr& part : d.parts) {
            LittleMembershipReport r = membership_little(part, p);
            if (r.verdict != Membership::member) {
              return LittleMembershipReport{Membership::inconclusive, 0.0, 0};
            }
            acc.tail_bound += r.tail_bound;
            acc.truncation_degree =
                std::max(acc.truncation_degree, r.truncation_degree);
          }
          return acc;
        } else if constexpr (std::is_same_v<T, N::Scaled>) {
          if (d.c == Complex(0.0, 0.0)) return little_member(0.0, 0);
          LittleMembershipReport r = membership_little(d.inner, p);
          r.tail_bound *= std::abs(d.c);
          return r;
        } else {
          static_assert(std::is_same_v<T, N::Composed>);
          const N& outer_node = d.outer.node();
          if (std::holds_alternative<typename N::Poly>(outer_node.data) ||
              std::holds_alternative<typename N::Monomial>(outer_node.data)) {
            // Polynomial composed with a polynomial map is a polynomial.
            return little_member(0.0, 0);
          }
          return LittleMembershipReport{Membership::inconclusive, 0.0, 0};
        }
      },
      f.node().data);
}

}  // namespace polybloch
