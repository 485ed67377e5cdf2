#ifndef POLYBLOCH_HOLO_HPP
#define POLYBLOCH_HOLO_HPP

#include <memory>
#include <variant>
#include <vector>

#include "polybloch/types.hpp"

namespace polybloch {

/// Multivariate polynomial over C^n. Terms carry unique multi-indices and
/// nonzero coefficients; the term list is kept sorted (graded lex) so equal
/// polynomials have identical representations.
struct MultiPoly {
  struct Term {
    Eigen::VectorXi exponents;  // length vars, entries >= 0
    Complex coeff;
  };

  int vars = 0;
  std::vector<Term> terms;

  static MultiPoly zero(int vars);
  static MultiPoly constant(int vars, Complex c);
  static MultiPoly coordinate(int vars, int axis);
  static MultiPoly monomial(int vars, const Eigen::VectorXi& exponents,
                            Complex c);

  bool is_zero() const { return terms.empty(); }
  bool is_constant() const;
  int degree() const;

  Complex eval(const CVector& z) const;
  /// Value of the partial derivative d/dz_axis at z.
  Complex partial_eval(int axis, const CVector& z) const;
  /// The partial derivative as a polynomial.
  MultiPoly partial(int axis) const;

  /// Drops zero coefficients, merges duplicates, sorts terms.
  void normalize();

  MultiPoly& operator+=(const MultiPoly& rhs);
  friend MultiPoly operator+(MultiPoly lhs, const MultiPoly& rhs);
  friend MultiPoly operator*(const MultiPoly& lhs, const MultiPoly& rhs);
  friend MultiPoly operator*(Complex c, MultiPoly p);
};

/// z^k for integer k >= 0 by binary exponentiation (exact at z = 0).
Complex cpow_int(Complex z, int k);

struct SelfMapCertificate {
  double max_modulus = 0.0;  // sup_l sup_sample |phi_l|
  bool inside = false;       // max_modulus < 1
  int sample_count = 0;
};

/// phi = (phi_1, ..., phi_n): polynomial self-map candidate of U^n.
/// Components are polynomials in n variables. The certificate is an
/// empirical bound on sup |phi_l| over a distinguished-boundary sample
/// (polynomial moduli peak there by the maximum principle).
struct PolyMap {
  std::vector<MultiPoly> components;
  SelfMapCertificate certificate;

  int dim() const { return static_cast<int>(components.size()); }
};

/// Builds a PolyMap and certifies it over `cert_samples` torus points.
PolyMap make_poly_map(std::vector<MultiPoly> components, int cert_samples = 4096,
                      std::uint64_t seed = 1);

PolyMap identity_map(int n);

/// phi(z) as a point; the result lives in the closed polydisc for genuine
/// self-maps but is returned unvalidated (consumers apply their own
/// sentinels for certificate-violating maps).
PolydiscPoint map_eval(const PolyMap& phi, const PolydiscPoint& z);

/// Jacobian J(l, k) = d phi_l / d z_k at z.
CMatrix map_jacobian(const PolyMap& phi, const PolydiscPoint& z);

/// phi^gamma = prod_l phi_l^{gamma_l}.
MultiPoly map_power(const PolyMap& phi, const Eigen::VectorXi& gamma);

/// Evaluable holomorphic function on U^n with exact complex partials.
/// Immutable; cheap to copy (shared nodes).
class HoloExpr {
 public:
  HoloExpr() = default;

  int vars() const;

  static HoloExpr poly(MultiPoly p);
  /// Antiderivative of (1 - conj(w) z_axis)^{-p}, p > 0, p != 1, 0 < |w| < 1.
  static HoloExpr pow_prim(int vars, Complex w, int axis, double p);
  /// Antiderivative of (1 - conj(w) z_axis)^{-1}, 0 < |w| < 1.
  static HoloExpr log_prim(int vars, Complex w, int axis);
  /// scale * z_axis^m, m >= 1.
  static HoloExpr monomial(int vars, int m, int axis, double scale);
  /// f((factor) z), factor in (0, 1).
  static HoloExpr dilated(HoloExpr inner, double factor);
  static HoloExpr sum(std::vector<HoloExpr> parts);
  static HoloExpr scaled(Complex c, HoloExpr inner);
  /// f o phi by the holomorphic chain rule.
  static HoloExpr composed(HoloExpr outer, PolyMap inner);

  struct Node;
  const Node& node() const { return *node_; }
  bool valid() const { return node_ != nullptr; }

 private:
  explicit HoloExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct HoloExpr::Node {
  struct Poly {
    MultiPoly poly;
  };
  struct PowPrim {
    Complex w;
    int axis;
    double p;
  };
  struct LogPrim {
    Complex w;
    int axis;
  };
  struct Monomial {
    int m;
    int axis;
    double scale;
  };
  struct Dilated {
    HoloExpr inner;
    double factor;
  };
  struct Sum {
    std::vector<HoloExpr> parts;
  };
  struct Scaled {
    Complex c;
    HoloExpr inner;
  };
  struct Composed {
    HoloExpr outer;
    PolyMap inner;
  };

  int vars = 0;
  std::variant<Poly, PowPrim, LogPrim, Monomial, Dilated, Sum, Scaled, Composed>
      data;
};

Complex eval(const HoloExpr& f, const PolydiscPoint& z);
CVector grad(const HoloExpr& f, const PolydiscPoint& z);

/// Lemma-2 style test function on axis `axis`: PowPrim for p != 1, LogPrim
/// for p == 1, the coordinate function for w == 0. Vanishes at the origin.
HoloExpr test_fn_fw(int vars, Complex w, int axis, double p);

/// Normalized monomial family member m^{p-1} z_axis^m / N(m, p) with unit
/// p-Bloch norm; m >= 2.
HoloExpr monomial_family(int vars, int m, double p, int axis);

/// Dilation K_m f = f(((m-1)/m) z), m >= 2.
HoloExpr dilate_Km(const HoloExpr& f, int m);

struct TaylorTruncation {
  MultiPoly poly;        // degree N+1 truncation of f_w
  double tail_bound;     // sum_{k>N} rising(p,k)/k! |w|^k
};

/// Term-wise integrated power series of f_w truncated at series index N;
/// the tail bound dominates the p-Bloch distance to f_w.
TaylorTruncation taylor_truncate_fw(int vars, Complex w, double p, int axis,
                                    int N);

}  // namespace polybloch

#endif  // POLYBLOCH_HOLO_HPP
