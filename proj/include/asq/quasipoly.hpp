#pragma once

// Quasi-polynomial functions on Z (+) Z^d in canonical exponential-polynomial
// form: finite sums of terms e^{2*pi*i*u*k} * g^lambda * p(k, lambda) with u a
// rational k-twist, g a finite-order character of Z^d and p a polynomial.
// Provides finite Fourier (per-coset) decomposition, translations, finite
// differences, polynomial parts along rational affine subspaces, and
// k-degree splitting along a polyhedron fiber.

#include <asq/multipoly.hpp>
#include <asq/polyhedron.hpp>
#include <asq/rational.hpp>

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace asq {

// A finite-order character of Z^d: lambda |-> e^{2*pi*i*<value, lambda>},
// with the canonical representative value in [0,1)^d.
struct Character {
  QVec value;

  Character() = default;
  explicit Character(QVec v);
  static Character trivial(size_t d) { return Character(qvec_zero(d)); }

  size_t dim() const { return value.size(); }
  bool is_trivial() const { return qvec_is_zero(value); }
  Cyclotomic pow(const QVec& lambda) const;  // g^lambda
  Character inverse() const;
  Character operator*(const Character& other) const;
  // Trivial on the sublattice spanned by the given integer rows?
  bool trivial_on(const IMat& lattice_rows) const;

  bool operator==(const Character& o) const { return value == o.value; }
  bool operator<(const Character& o) const { return value < o.value; }
};

// Canonical form: at most one polynomial per (u, g); zero polynomials are
// dropped.  Polynomials have 1+d variables: k, lambda_1..lambda_d.
class QuasiPolynomial {
 public:
  using Key = std::pair<Rat, Character>;  // (u mod 1, g)

  explicit QuasiPolynomial(size_t dim = 0) : dim_(dim) {}
  static QuasiPolynomial from_poly(size_t dim, const MultiPoly& p);
  static QuasiPolynomial term(size_t dim, const Rat& u, const Character& g, const MultiPoly& p);
  static QuasiPolynomial constant(size_t dim, const Cyclotomic& c);

  size_t dim() const { return dim_; }
  size_t nvars() const { return dim_ + 1; }
  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, MultiPoly>& terms() const { return terms_; }
  void add_term(const Rat& u, const Character& g, const MultiPoly& p);

  QuasiPolynomial operator-() const;
  friend QuasiPolynomial operator+(const QuasiPolynomial& a, const QuasiPolynomial& b);
  friend QuasiPolynomial operator-(const QuasiPolynomial& a, const QuasiPolynomial& b);
  friend QuasiPolynomial operator*(const QuasiPolynomial& a, const QuasiPolynomial& b);
  QuasiPolynomial& operator+=(const QuasiPolynomial& o) { return *this = *this + o; }
  QuasiPolynomial& operator-=(const QuasiPolynomial& o) { return *this = *this - o; }
  QuasiPolynomial scaled(const Cyclotomic& c) const;
  QuasiPolynomial twisted(const Character& g) const;  // times g^lambda
  bool operator==(const QuasiPolynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

  Cyclotomic evaluate(const Int& k, const QVec& lambda) const;
  Cyclotomic evaluate(const Int& k, const IVec& lambda) const;

  // Max total degree in the lambda variables (-1 for zero).
  int lambda_degree() const;
  // Max degree in k (-1 for zero).
  int k_degree() const;
  // Least common multiple of all denominators appearing in the twists u and
  // the character values (the k/lambda periodicity).
  Int twist_denominator_lcm() const;

  std::string to_string() const;

 private:
  size_t dim_;
  std::map<Key, MultiPoly> terms_;
};

// (tau_sigma q)(k, lambda) = q(k, lambda - sigma); sigma integral.
QuasiPolynomial qp_translate(const QuasiPolynomial& q, const IVec& sigma);

// (nabla_eta^zeta q)(k, lambda) = q(k, lambda) - zeta * q(k, lambda - eta),
// zeta = e^{2*pi*i*zeta_turn}; eta integral.
QuasiPolynomial qp_difference(const QuasiPolynomial& q, const IVec& eta, const Rat& zeta_turn);

// Per-coset polynomial data on a finite-index sublattice of Z^{1+d}
// (coordinates (k, lambda)): rows of `sublattice` form a basis, and each
// coset carries one polynomial.  Returns the canonical form reproducing the
// coset polynomials; throws std::invalid_argument on inconsistent data.
QuasiPolynomial qp_character_decompose(size_t dim, const IMat& sublattice,
                                       const std::vector<std::pair<IVec, MultiPoly>>& cosets);

// The polynomial part of q along the affine subspace family k*A + sigma.
struct PolynomialPart {
  bool index_empty = false;  // (kA + sigma) has no lattice points for any k
  Int k0, n0;                // index set = k0 + n0 Z (when not empty)
  QVec xi0, nu0;             // base lattice point: lambda_k = (k-k0) xi0 + nu0
  QuasiPolynomial part;      // valid for k in the index set; trivial characters

  bool index_contains(const Int& k) const;
  // 0 outside the index set; else part(k, v).
  Cyclotomic evaluate(const Int& k, const QVec& v) const;
};

PolynomialPart qp_polynomial_part(const QuasiPolynomial& q, const AffineSubspace& a,
                                  const QVec& sigma);

// Coefficients p_j, j = 0..deg, of the expansion of the polynomial part along
// aff(P) evaluated at lambda = k*v + sigma:
//   part(k, k*v + sigma) = sum_j k^j p_j(k, v)
// with p_j polynomial in v and k-periodic (twists only).  Returns the p_j and
// the index data.
struct DegreeSplit {
  PolynomialPart base;
  std::vector<QuasiPolynomial> p;  // p[j]; polynomials in v only (plus twists)
};

DegreeSplit qp_degree_split(const QuasiPolynomial& q, const Polyhedron& p, const QVec& sigma);

}  // namespace asq
