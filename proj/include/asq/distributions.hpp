#pragma once

// Exact distributional objects on V = Q^d:
//  - weighted point-mass samples of a piecewise quasi-polynomial at fixed k,
//  - periodic-coefficient differential operators acting on lattice-normalized
//    face measures (sums r_F(k) delta_F),
//  - truncated asymptotic series k^s sum_n k^{-n} theta_n(k),
// together with exact pairing against polynomial test functions using the
// convention <p d^a delta_F, phi> = (-1)^{|a|} int_F p d^a phi dmu_F.

#include <asq/piecewise.hpp>
#include <asq/polyhedron.hpp>

#include <optional>
#include <string>
#include <vector>

namespace asq {

// Bounded rational box with per-facet open/closed flags.
struct WindowBox {
  QVec lo, hi;
  std::vector<bool> lo_open, hi_open;  // true = strict inequality

  static WindowBox closed(const QVec& lo, const QVec& hi);
  size_t dim() const { return lo.size(); }
  bool contains(const QVec& v) const;
};

struct ThetaAtom {
  QVec point;  // lambda / k
  Cyclotomic weight;
};

struct ThetaSample {
  Int k;
  WindowBox window;
  std::vector<ThetaAtom> atoms;  // sorted by point, zero weights omitted

  std::string to_csv() const;  // point coordinates "p/q" ..., weight
};

ThetaSample theta_sample(const PiecewiseQP& m, const Int& k, const WindowBox& window);

// Exact pairing sum m(k,lambda) phi(lambda/k); global form requires all cone
// bases bounded, otherwise pass a window.
Cyclotomic theta_pair_poly(const PiecewiseQP& m, const Int& k, const MultiPoly& phi);
Cyclotomic theta_pair_poly(const PiecewiseQP& m, const Int& k, const MultiPoly& phi,
                           const WindowBox& window);

// Affine lattice coordinates on the hull of a face: y(v) = dual * (v - origin)
// with `directions` a lattice basis of the hull's direction lattice.
struct FaceFrame {
  QVec origin;
  QMat directions;  // rows; empty for a point
  QMat dual;        // rows; y_j(v) = <dual_j, v - origin>
};
FaceFrame face_frame(const Polyhedron& f);

// Ambient polynomial canonically representing the restriction of p to the
// affine hull of f.
MultiPoly restrict_poly_to_face(const MultiPoly& p, const Polyhedron& f);

// One summand p(v) d^alpha acting on delta_F.
struct DiffTerm {
  MultiPoly coeff;         // polynomial in v (d variables)
  std::vector<int> deriv;  // multi-index alpha
};

// k-periodic table of differential operators.
struct PeriodicDiffOp {
  Int period = 1;
  std::vector<std::vector<DiffTerm>> table;  // indexed by k mod period

  static PeriodicDiffOp single(const DiffTerm& t);
  static PeriodicDiffOp zero() { return PeriodicDiffOp{1, {{}}}; }
  const std::vector<DiffTerm>& at(const Int& k) const;
  PeriodicDiffOp with_period(const Int& new_period) const;  // period | new_period
  bool is_zero() const;
};

PeriodicDiffOp pdo_add(const PeriodicDiffOp& a, const PeriodicDiffOp& b);
PeriodicDiffOp pdo_scale(const PeriodicDiffOp& a, const Cyclotomic& c);

struct RTerm {
  Polyhedron face;
  PeriodicDiffOp op;
};

// sum_F r_F(k) delta_F
struct RDistribution {
  size_t dim = 0;
  std::vector<RTerm> terms;

  bool is_zero() const;
  // Merge equal faces, canonicalize coefficients by restriction to the face,
  // drop zeros.
  RDistribution normalized() const;
  // Canonical printable form (faces keyed canonically, coefficients in
  // face-intrinsic lattice coordinates); equal distributions print equally.
  std::string canonical_string() const;
};

RDistribution rdist_add(const RDistribution& a, const RDistribution& b);
RDistribution rdist_scale(const RDistribution& a, const Cyclotomic& c);
// Distributional directional derivative: <d_sigma psi, phi> = -<psi, d_sigma phi>.
RDistribution rdist_derivative(const RDistribution& a, const QVec& sigma);
// Multiply by a polynomial in v with a periodic scalar (Leibniz re-expansion).
RDistribution rdist_mul_poly(const RDistribution& a, const MultiPoly& f);
RDistribution rdist_mul_periodic(const RDistribution& a, const Rat& turn_per_k);

Cyclotomic rdist_pair_poly(const RDistribution& psi, const Int& k, const MultiPoly& phi);

// k^s * sum_{n=0..order} k^{-n} theta[n](k)
struct AsymptoticSeries {
  size_t dim = 0;
  long s = 0;
  std::vector<RDistribution> theta;  // size order+1

  long order() const { return static_cast<long>(theta.size()) - 1; }
  AsymptoticSeries normalized() const;
  // Drop leading zero coefficients (decreasing s accordingly) so equal series
  // align structurally; keeps at least one coefficient.
  AsymptoticSeries aligned() const;
};

AsymptoticSeries series_add(const AsymptoticSeries& a, const AsymptoticSeries& b);
AsymptoticSeries series_scale_const(const AsymptoticSeries& a, const Cyclotomic& c);

Cyclotomic series_pair_poly(const AsymptoticSeries& a, const Int& k, const MultiPoly& phi);

// e^{-d_sigma / k} applied term-wise, truncated at the series order.
AsymptoticSeries series_translate(const AsymptoticSeries& a, const QVec& sigma);

// Multiply by h(k, k v), h a quasi-polynomial in k and lambda with trivial
// characters (twists allowed); regrades by the k-degree of h.
AsymptoticSeries series_scale(const AsymptoticSeries& a, const QuasiPolynomial& h);

}  // namespace asq
