#include "polybloch/polydisc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace polybloch {

namespace {

double frac(double x) { return x - std::floor(x); }

// splitmix64; used to derive per-shell/per-coordinate phase offsets.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit_double(std::uint64_t x) {
  return static_cast<double>(x >> 11) * 0x1p-53;
}

// Kronecker increments frac(sqrt(prime)); distinct primes per coordinate
// and per role (modulus vs argument) keep the lattices independent.
double kronecker_alpha(int index) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                               31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
                               73, 79, 83, 89, 97, 101};
  const int count = static_cast<int>(sizeof(primes) / sizeof(primes[0]));
  int p = primes[index % count];
  double a = frac(std::sqrt(static_cast<double>(p)));
  // Re-mix collisions from the modular wrap-around.
  for (int r = 0; r < index / count; ++r) a = frac(a + std::numbers::phi);
  return a;
}

void check_closed(const PolydiscPoint& w) {
  if (w.dim() < 1)
    throw std::invalid_argument("polydisc: point dimension must be >= 1");
  for (int k = 0; k < w.dim(); ++k) {
    if (!(std::abs(w.coords(k)) <= 1.0 + kClosedTol))
      throw std::invalid_argument(
          "polydisc: coordinate modulus exceeds the closed polydisc");
  }
}

}  // namespace

double boundary_dist(const PolydiscPoint& w) {
  check_closed(w);
  double best = 1.0;
  for (int k = 0; k < w.dim(); ++k)
    best = std::min(best, 1.0 - std::abs(w.coords(k)));
  return std::max(best, 0.0);
}

double star_boundary_gap(const PolydiscPoint& w) {
  check_closed(w);
  double worst = 0.0;
  for (int k = 0; k < w.dim(); ++k)
    worst = std::max(worst, 1.0 - std::abs(w.coords(k)));
  return std::min(worst, 1.0);
}

bool is_interior(const PolydiscPoint& w) {
  for (int k = 0; k < w.dim(); ++k)
    if (!(std::abs(w.coords(k)) < 1.0)) return false;
  return w.dim() >= 1;
}

PolydiscPoint clamp_interior(PolydiscPoint w) {
  for (int k = 0; k < w.dim(); ++k) {
    double r = std::abs(w.coords(k));
    if (r > kInteriorCap) w.coords(k) *= kInteriorCap / r;
  }
  return w;
}

std::vector<PolydiscPoint> sample_stratified(int n, const SampleBudget& budget) {
  if (n < 1) throw std::invalid_argument("sample_stratified: n must be >= 1");
  validate(budget);

  const int shells = budget.shell_count;
  const int per_shell = budget.angular_samples_per_shell;
  std::vector<PolydiscPoint> out;
  out.reserve(static_cast<std::size_t>(shells) * per_shell);

  for (int j = 0; j < shells; ++j) {
    const double r_j = 1.0 - std::ldexp(1.0, -(j + 1));
    for (int i = 0; i < per_shell; ++i) {
      CVector z(n);
      for (int k = 0; k < n; ++k) {
        std::uint64_t h = mix64(budget.seed ^ mix64(
            (static_cast<std::uint64_t>(j) << 32) | static_cast<std::uint64_t>(k)));
        double mod_phase = unit_double(h);
        double arg_phase = unit_double(mix64(h));
        double v = frac(mod_phase + i * kronecker_alpha(2 * k));
        double theta = 2.0 * std::numbers::pi *
                       frac(arg_phase + i * kronecker_alpha(2 * k + 1));
        // Quadratic bias toward the shell radius; modulus <= r_j < 1.
        double modulus = r_j * (1.0 - v * v);
        z(k) = std::polar(modulus, theta);
      }
      out.emplace_back(std::move(z));
    }
  }
  return out;
}

std::vector<PolydiscPoint> sample_near_torus(int n, double gap, int count,
                                             std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_near_torus: n must be >= 1");
  if (!(gap > 0.0 && gap <= 1.0))
    throw std::invalid_argument("sample_near_torus: gap must be in (0, 1]");
  if (count < 1)
    throw std::invalid_argument("sample_near_torus: count must be >= 1");

  std::vector<PolydiscPoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    CVector z(n);
    for (int k = 0; k < n; ++k) {
      std::uint64_t h = mix64(seed ^ mix64(0x746f727573ULL + k));
      double u = frac(unit_double(h) + i * kronecker_alpha(2 * k));
      double theta = 2.0 * std::numbers::pi *
                     frac(unit_double(mix64(h)) + i * kronecker_alpha(2 * k + 1));
      // Per-coordinate gap strictly inside (0, gap); modulus capped inside.
      double scaled = gap * (1e-3 + (1.0 - 2e-3) * u);
      double modulus = std::min(1.0 - scaled, kInteriorCap);
      z(k) = std::polar(std::max(modulus, 0.0), theta);
    }
    out.emplace_back(std::move(z));
  }
  return out;
}

SupEstimate estimate_sup(const Objective& objective, int n,
                         const SampleBudget& budget) {
  validate(budget);
  const std::vector<PolydiscPoint> samples = sample_stratified(n, budget);
  const int per_shell = budget.angular_samples_per_shell;

  SupEstimate est;
  est.witness = PolydiscPoint::origin(n);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_idx = 0;
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(samples.size());

  for (std::size_t i = 0; i < samples.size(); ++i) {
    double v = objective(samples[i]);
    if (std::isinf(v) && v > 0.0) {
      est.value = v;
      est.witness = samples[i];
      est.shell_history.assign(1, v);
      est.still_growing = true;
      return est;
    }
    scored.emplace_back(v, i);
    if (v > best) {
      best = v;
      best_idx = i;
    }
    if ((i + 1) % static_cast<std::size_t>(per_shell) == 0)
      est.shell_history.push_back(best);
  }

  const std::size_t shells = est.shell_history.size();
  if (shells >= 2) {
    double last = est.shell_history[shells - 1];
    double before = est.shell_history[shells >= 3 ? shells - 3 : 0];
    double denom = std::max(std::abs(last), 1e-300);
    est.still_growing = (last - before) / denom > 0.01;
  }

  // Polish the top candidates; ties break toward earlier samples.
  const std::size_t top = std::min<std::size_t>(8, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + top, scored.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  PolydiscPoint witness = samples[best_idx];
  for (std::size_t c = 0; c < top; ++c) {
    RefineResult r = refine_local(objective, samples[scored[c].second],
                                  budget.refinement_steps);
    if (r.value > best) {
      best = r.value;
      witness = r.point;
    }
  }
  est.value = best;
  est.witness = std::move(witness);
  return est;
}

RefineResult refine_local(const Objective& objective,
                          const PolydiscPoint& start, int steps) {
  PolydiscPoint best_point = clamp_interior(start);
  double best = objective(best_point);
  const int n = best_point.dim();

  double step = 0.25;
  for (int s = 0; s < steps; ++s) {
    bool improved = false;
    for (int k = 0; k < n; ++k) {
      const Complex zk = best_point.coords(k);
      const double r = std::abs(zk);
      const double theta = (r > 0.0) ? std::arg(zk) : 0.0;

      const Complex proposals[4] = {
          std::polar(std::min(r + step, kInteriorCap), theta),
          std::polar(std::max(r - step, 0.0), theta),
          std::polar(r, theta + step),
          std::polar(r, theta - step),
      };
      for (const Complex& c : proposals) {
        PolydiscPoint candidate = best_point;
        candidate.coords(k) = c;
        double v = objective(candidate);
        if (v > best) {
          best = v;
          best_point = std::move(candidate);
          improved = true;
        }
      }
    }
    if (!improved) {
      step *= 0.5;
      if (step < 1e-13) break;
    }
  }
  return RefineResult{std::move(best_point), best};
}

}  // namespace polybloch
