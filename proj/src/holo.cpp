#include "polybloch/holo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>

#include "polybloch/blochnorm.hpp"
#include "polybloch/polydisc.hpp"

namespace polybloch {

namespace {

double frac(double x) { return x - std::floor(x); }

bool exponents_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
  int da = a.sum(), db = b.sum();
  if (da != db) return da < db;
  for (int k = 0; k < a.size(); ++k)
    if (a(k) != b(k)) return a(k) < b(k);
  return false;
}

void check_axis(int vars, int axis, const char* who) {
  if (axis < 0 || axis >= vars)
    throw std::invalid_argument(std::string(who) + ": axis out of range");
}

// Principal-branch power (1 - conj(w) z)^e. The argument has positive real
// part on |w| < 1, |z| <= 1, so the branch is unambiguous; anything else is
// a domain violation.
Complex branch_pow(Complex base, double e) {
  if (!(base.real() > 0.0))
    throw std::domain_error(
        "holo: principal branch violated (Re(1 - conj(w) z) <= 0)");
  return std::exp(e * std::log(base));
}

}  // namespace

Complex cpow_int(Complex z, int k) {
  if (k < 0) throw std::invalid_argument("cpow_int: negative exponent");
  Complex acc(1.0, 0.0);
  Complex base = z;
  while (k > 0) {
    if (k & 1) acc *= base;
    base *= base;
    k >>= 1;
  }
  return acc;
}

// ---------------------------------------------------------------------------
// MultiPoly

MultiPoly MultiPoly::zero(int vars) {
  if (vars < 1) throw std::invalid_argument("MultiPoly: vars must be >= 1");
  MultiPoly p;
  p.vars = vars;
  return p;
}

MultiPoly MultiPoly::constant(int vars, Complex c) {
  MultiPoly p = zero(vars);
  if (c != Complex(0.0, 0.0))
    p.terms.push_back({Eigen::VectorXi::Zero(vars), c});
  return p;
}

MultiPoly MultiPoly::coordinate(int vars, int axis) {
  check_axis(vars, axis, "MultiPoly::coordinate");
  MultiPoly p = zero(vars);
  Eigen::VectorXi e = Eigen::VectorXi::Zero(vars);
  e(axis) = 1;
  p.terms.push_back({e, Complex(1.0, 0.0)});
  return p;
}

MultiPoly MultiPoly::monomial(int vars, const Eigen::VectorXi& exponents,
                              Complex c) {
  MultiPoly p = zero(vars);
  if (exponents.size() != vars)
    throw std::invalid_argument("MultiPoly::monomial: exponent length");
  if (exponents.minCoeff() < 0)
    throw std::invalid_argument("MultiPoly::monomial: negative exponent");
  if (c != Complex(0.0, 0.0)) p.terms.push_back({exponents, c});
  return p;
}

bool MultiPoly::is_constant() const {
  return terms.empty() || (terms.size() == 1 && terms[0].exponents.sum() == 0);
}

int MultiPoly::degree() const {
  int d = 0;
  for (const Term& t : terms) d = std::max(d, t.exponents.sum());
  return d;
}

Complex MultiPoly::eval(const CVector& z) const {
  if (z.size() != vars)
    throw std::invalid_argument("MultiPoly::eval: dimension mismatch");
  Complex acc(0.0, 0.0);
  for (const Term& t : terms) {
    Complex m = t.coeff;
    for (int k = 0; k < vars; ++k)
      if (t.exponents(k) > 0) m *= cpow_int(z(k), t.exponents(k));
    acc += m;
  }
  return acc;
}

Complex MultiPoly::partial_eval(int axis, const CVector& z) const {
  if (z.size() != vars)
    throw std::invalid_argument("MultiPoly::partial_eval: dimension mismatch");
  check_axis(vars, axis, "MultiPoly::partial_eval");
  Complex acc(0.0, 0.0);
  for (const Term& t : terms) {
    int g = t.exponents(axis);
    if (g == 0) continue;
    Complex m = t.coeff * static_cast<double>(g) * cpow_int(z(axis), g - 1);
    for (int k = 0; k < vars; ++k)
      if (k != axis && t.exponents(k) > 0) m *= cpow_int(z(k), t.exponents(k));
    acc += m;
  }
  return acc;
}

MultiPoly MultiPoly::partial(int axis) const {
  check_axis(vars, axis, "MultiPoly::partial");
  MultiPoly out = zero(vars);
  for (const Term& t : terms) {
    int g = t.exponents(axis);
    if (g == 0) continue;
    Term d;
    d.exponents = t.exponents;
    d.exponents(axis) -= 1;
    d.coeff = t.coeff * static_cast<double>(g);
    out.terms.push_back(std::move(d));
  }
  out.normalize();
  return out;
}

void MultiPoly::normalize() {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) {
    return exponents_less(a.exponents, b.exponents);
  });
  std::vector<Term> merged;
  for (Term& t : terms) {
    if (!merged.empty() && merged.back().exponents == t.exponents)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(std::move(t));
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](const Term& t) {
                                return t.coeff == Complex(0.0, 0.0);
                              }),
               merged.end());
  terms = std::move(merged);
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& rhs) {
  if (vars != rhs.vars)
    throw std::invalid_argument("MultiPoly: dimension mismatch in +");
  terms.insert(terms.end(), rhs.terms.begin(), rhs.terms.end());
  normalize();
  return *this;
}

MultiPoly operator+(MultiPoly lhs, const MultiPoly& rhs) {
  lhs += rhs;
  return lhs;
}

MultiPoly operator*(const MultiPoly& lhs, const MultiPoly& rhs) {
  if (lhs.vars != rhs.vars)
    throw std::invalid_argument("MultiPoly: dimension mismatch in *");
  MultiPoly out = MultiPoly::zero(lhs.vars);
  out.terms.reserve(lhs.terms.size() * rhs.terms.size());
  for (const auto& a : lhs.terms)
    for (const auto& b : rhs.terms)
      out.terms.push_back({a.exponents + b.exponents, a.coeff * b.coeff});
  out.normalize();
  return out;
}

MultiPoly operator*(Complex c, MultiPoly p) {
  for (auto& t : p.terms) t.coeff *= c;
  p.normalize();
  return p;
}

// ---------------------------------------------------------------------------
// PolyMap

PolyMap make_poly_map(std::vector<MultiPoly> components, int cert_samples,
                      std::uint64_t seed) {
  if (components.empty())
    throw std::invalid_argument("make_poly_map: no components");
  const int n = static_cast<int>(components.size());
  for (const MultiPoly& c : components)
    if (c.vars != n)
      throw std::invalid_argument(
          "make_poly_map: component count must equal the variable count");
  if (cert_samples < 1)
    throw std::invalid_argument("make_poly_map: cert_samples must be >= 1");

  PolyMap phi;
  phi.components = std::move(components);

  // Empirical sup of |phi_l| over the distinguished boundary, where
  // polynomial moduli peak.
  double worst = 0.0;
  CVector z(n);
  for (int s = 0; s < cert_samples; ++s) {
    for (int k = 0; k < n; ++k) {
      double alpha = frac(std::sqrt(static_cast<double>(2 * k + 3)));
      double offset =
          frac(std::numbers::phi * static_cast<double>((seed % 4096) + k + 1));
      z(k) = std::polar(1.0, 2.0 * std::numbers::pi * frac(offset + s * alpha));
    }
    for (const MultiPoly& c : phi.components)
      worst = std::max(worst, std::abs(c.eval(z)));
  }
  phi.certificate = SelfMapCertificate{worst, worst < 1.0, cert_samples};
  return phi;
}

PolyMap identity_map(int n) {
  std::vector<MultiPoly> comps;
  comps.reserve(n);
  for (int l = 0; l < n; ++l) comps.push_back(MultiPoly::coordinate(n, l));
  return make_poly_map(std::move(comps), 64);
}

PolydiscPoint map_eval(const PolyMap& phi, const PolydiscPoint& z) {
  CVector out(phi.dim());
  for (int l = 0; l < phi.dim(); ++l) out(l) = phi.components[l].eval(z.coords);
  return PolydiscPoint(std::move(out));
}

CMatrix map_jacobian(const PolyMap& phi, const PolydiscPoint& z) {
  const int n = phi.dim();
  CMatrix jac(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      jac(l, k) = phi.components[l].partial_eval(k, z.coords);
  return jac;
}

MultiPoly map_power(const PolyMap& phi, const Eigen::VectorXi& gamma) {
  if (gamma.size() != phi.dim())
    throw std::invalid_argument("map_power: multi-index length mismatch");
  if (gamma.minCoeff() < 0)
    throw std::invalid_argument("map_power: negative multi-index entry");
  MultiPoly acc = MultiPoly::constant(phi.dim(), Complex(1.0, 0.0));
  for (int l = 0; l < phi.dim(); ++l)
    for (int rep = 0; rep < gamma(l); ++rep) acc = acc * phi.components[l];
  return acc;
}

// ---------------------------------------------------------------------------
// HoloExpr

int HoloExpr::vars() const {
  if (!node_) throw std::logic_error("HoloExpr: empty expression");
  return node_->vars;
}

HoloExpr HoloExpr::poly(MultiPoly p) {
  p.normalize();
  auto n = std::make_shared<Node>();
  n->vars = p.vars;
  n->data = Node::Poly{std::move(p)};
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::pow_prim(int vars, Complex w, int axis, double p) {
  check_axis(vars, axis, "HoloExpr::pow_prim");
  if (!(std::abs(w) < 1.0) || w == Complex(0.0, 0.0))
    throw std::invalid_argument("HoloExpr::pow_prim: need 0 < |w| < 1");
  if (!(p > 0.0) || p == 1.0)
    throw std::invalid_argument("HoloExpr::pow_prim: need p > 0, p != 1");
  auto n = std::make_shared<Node>();
  n->vars = vars;
  n->data = Node::PowPrim{w, axis, p};
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::log_prim(int vars, Complex w, int axis) {
  check_axis(vars, axis, "HoloExpr::log_prim");
  if (!(std::abs(w) < 1.0) || w == Complex(0.0, 0.0))
    throw std::invalid_argument("HoloExpr::log_prim: need 0 < |w| < 1");
  auto n = std::make_shared<Node>();
  n->vars = vars;
  n->data = Node::LogPrim{w, axis};
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::monomial(int vars, int m, int axis, double scale) {
  check_axis(vars, axis, "HoloExpr::monomial");
  if (m < 1) throw std::invalid_argument("HoloExpr::monomial: m must be >= 1");
  auto n = std::make_shared<Node>();
  n->vars = vars;
  n->data = Node::Monomial{m, axis, scale};
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::dilated(HoloExpr inner, double factor) {
  if (!inner.valid()) throw std::invalid_argument("HoloExpr::dilated: empty");
  if (!(factor > 0.0 && factor < 1.0))
    throw std::invalid_argument("HoloExpr::dilated: factor must be in (0,1)");
  auto n = std::make_shared<Node>();
  n->vars = inner.vars();
  n->data = Node::Dilated{std::move(inner), factor};
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::sum(std::vector<HoloExpr> parts) {
  if (parts.empty()) throw std::invalid_argument("HoloExpr::sum: empty");
  int vars = parts.front().vars();
  for (const HoloExpr& p : parts)
    if (p.vars() != vars)
      throw std::invalid_argument("HoloExpr::sum: dimension mismatch");
  auto n = std::make_shared<Node>();
  n->vars = vars;
  n->data = Node::Sum{std::move(parts)};
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::scaled(Complex c, HoloExpr inner) {
  if (!inner.valid()) throw std::invalid_argument("HoloExpr::scaled: empty");
  auto n = std::make_shared<Node>();
  n->vars = inner.vars();
  n->data = Node::Scaled{c, std::move(inner)};
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::composed(HoloExpr outer, PolyMap inner) {
  if (!outer.valid()) throw std::invalid_argument("HoloExpr::composed: empty");
  if (outer.vars() != inner.dim())
    throw std::invalid_argument(
        "HoloExpr::composed: outer dimension must equal map dimension");
  auto n = std::make_shared<Node>();
  n->vars = inner.dim();
  n->data = Node::Composed{std::move(outer), std::move(inner)};
  return HoloExpr(std::move(n));
}

namespace {

Complex eval_impl(const HoloExpr& f, const CVector& z);
CVector grad_impl(const HoloExpr& f, const CVector& z);

Complex eval_impl(const HoloExpr& f, const CVector& z) {
  using N = HoloExpr::Node;
  const N& node = f.node();
  return std::visit(
      [&](const auto& d) -> Complex {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, N::Poly>) {
          return d.poly.eval(z);
        } else if constexpr (std::is_same_v<T, N::PowPrim>) {
          Complex wbar = std::conj(d.w);
          Complex a = Complex(1.0, 0.0) - wbar * z(d.axis);
          return (branch_pow(a, 1.0 - d.p) - 1.0) / ((d.p - 1.0) * wbar);
        } else if constexpr (std::is_same_v<T, N::LogPrim>) {
          Complex wbar = std::conj(d.w);
          Complex a = Complex(1.0, 0.0) - wbar * z(d.axis);
          if (!(a.real() > 0.0))
            throw std::domain_error("holo: log branch violated");
          return -std::log(a) / wbar;
        } else if constexpr (std::is_same_v<T, N::Monomial>) {
          return d.scale * cpow_int(z(d.axis), d.m);
        } else if constexpr (std::is_same_v<T, N::Dilated>) {
          return eval_impl(d.inner, (d.factor * z).eval());
        } else if constexpr (std::is_same_v<T, N::Sum>) {
          Complex acc(0.0, 0.0);
          for (const HoloExpr& part : d.parts) acc += eval_impl(part, z);
          return acc;
        } else if constexpr (std::is_same_v<T, N::Scaled>) {
          return d.c * eval_impl(d.inner, z);
        } else {
          static_assert(std::is_same_v<T, N::Composed>);
          CVector w(d.inner.dim());
          for (int l = 0; l < d.inner.dim(); ++l)
            w(l) = d.inner.components[l].eval(z);
          return eval_impl(d.outer, w);
        }
      },
      node.data);
}

CVector grad_impl(const HoloExpr& f, const CVector& z) {
  using N = HoloExpr::Node;
  const N& node = f.node();
  return std::visit(
      [&](const auto& d) -> CVector {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, N::Poly>) {
          CVector g(node.vars);
          for (int k = 0; k < node.vars; ++k)
            g(k) = d.poly.partial_eval(k, z);
          return g;
        } else if constexpr (std::is_same_v<T, N::PowPrim>) {
          Complex a = Complex(1.0, 0.0) - std::conj(d.w) * z(d.axis);
          CVector g = CVector::Zero(node.vars);
          g(d.axis) = branch_pow(a, -d.p);
          return g;
        } else if constexpr (std::is_same_v<T, N::LogPrim>) {
          Complex a = Complex(1.0, 0.0) - std::conj(d.w) * z(d.axis);
          if (!(a.real() > 0.0))
            throw std::domain_error("holo: log branch violated");
          CVector g = CVector::Zero(node.vars);
          g(d.axis) = Complex(1.0, 0.0) / a;
          return g;
        } else if constexpr (std::is_same_v<T, N::Monomial>) {
          CVector g = CVector::Zero(node.vars);
          g(d.axis) =
              d.scale * static_cast<double>(d.m) * cpow_int(z(d.axis), d.m - 1);
          return g;
        } else if constexpr (std::is_same_v<T, N::Dilated>) {
          return (d.factor * grad_impl(d.inner, (d.factor * z).eval())).eval();
        } else if constexpr (std::is_same_v<T, N::Sum>) {
          CVector acc = CVector::Zero(node.vars);
          for (const HoloExpr& part : d.parts) acc += grad_impl(part, z);
          return acc;
        } else if constexpr (std::is_same_v<T, N::Scaled>) {
          return (d.c * grad_impl(d.inner, z)).eval();
        } else {
          static_assert(std::is_same_v<T, N::Composed>);
          const int n = d.inner.dim();
          CVector w(n);
          for (int l = 0; l < n; ++l) w(l) = d.inner.components[l].eval(z);
          CVector gouter = grad_impl(d.outer, w);
          CMatrix jac(n, n);
          for (int l = 0; l < n; ++l)
            for (int k = 0; k < n; ++k)
              jac(l, k) = d.inner.components[l].partial_eval(k, z);
          return (jac.transpose() * gouter).eval();
        }
      },
      node.data);
}

void check_eval_point(const HoloExpr& f, const PolydiscPoint& z,
                      const char* who) {
  if (!f.valid()) throw std::invalid_argument(std::string(who) + ": empty expression");
  if (z.dim() != f.vars())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (!is_interior(z))
    throw std::invalid_argument(std::string(who) +
                                ": point must be interior to the polydisc");
}

}  // namespace

Complex eval(const HoloExpr& f, const PolydiscPoint& z) {
  check_eval_point(f, z, "eval");
  return eval_impl(f, z.coords);
}

CVector grad(const HoloExpr& f, const PolydiscPoint& z) {
  check_eval_point(f, z, "grad");
  return grad_impl(f, z.coords);
}

// ---------------------------------------------------------------------------
// Named families

HoloExpr test_fn_fw(int vars, Complex w, int axis, double p) {
  check_axis(vars, axis, "test_fn_fw");
  if (!(std::abs(w) < 1.0))
    throw std::invalid_argument("test_fn_fw: need |w| < 1");
  if (!(p > 0.0)) throw std::invalid_argument("test_fn_fw: need p > 0");
  if (w == Complex(0.0, 0.0))
    return HoloExpr::poly(MultiPoly::coordinate(vars, axis));
  if (p == 1.0) return HoloExpr::log_prim(vars, w, axis);
  return HoloExpr::pow_prim(vars, w, axis, p);
}

HoloExpr monomial_family(int vars, int m, double p, int axis) {
  if (m < 2) throw std::invalid_argument("monomial_family: m must be >= 2");
  if (!(p > 0.0)) throw std::invalid_argument("monomial_family: need p > 0");
  double scale = std::pow(static_cast<double>(m), p - 1.0) /
                 exact_monomial_norm(m, p);
  return HoloExpr::monomial(vars, m, axis, scale);
}

HoloExpr dilate_Km(const HoloExpr& f, int m) {
  if (m < 2) throw std::invalid_argument("dilate_Km: m must be >= 2");
  return HoloExpr::dilated(f, (m - 1.0) / m);
}

TaylorTruncation taylor_truncate_fw(int vars, Complex w, double p, int axis,
                                    int N) {
  check_axis(vars, axis, "taylor_truncate_fw");
  if (!(std::abs(w) < 1.0))
    throw std::invalid_argument("taylor_truncate_fw: need |w| < 1");
  if (!(p > 0.0)) throw std::invalid_argument("taylor_truncate_fw: need p > 0");
  if (N < 0) throw std::invalid_argument("taylor_truncate_fw: need N >= 0");

  const Complex wbar = std::conj(w);
  const double aw = std::abs(w);

  MultiPoly poly = MultiPoly::zero(vars);
  double a = 1.0;        // rising(p, k) / k!
  Complex wpow(1.0, 0.0);  // conj(w)^k
  for (int k = 0; k <= N; ++k) {
    Eigen::VectorXi e = Eigen::VectorXi::Zero(vars);
    e(axis) = k + 1;
    poly.terms.push_back({e, a * wpow / static_cast<double>(k + 1)});
    a *= (p + k) / (k + 1.0);
    wpow *= wbar;
  }
  poly.normalize();

  // Tail of the derivative series, summed until terms drop below 1e-18.
  double tail = 0.0;
  if (aw > 0.0) {
    double term = a * std::pow(aw, N + 1);  // a == rising(p, N+1)/(N+1)!
    for (int k = N + 1; k < 20'000'000; ++k) {
      tail += term;
      term *= aw * (p + k) / (k + 1.0);
      if (term < 1e-18) break;
    }
  }
  return TaylorTruncation{std::move(poly), tail};
}

}  // namespace polybloch
