#pragma once

// Asymptotic expansion of lattice point-mass families: twisted Bernoulli
// polynomials, the 1-D half-line expansion, the exact affine-subspace case,
// and the general engine (signed tangent-cone decomposition, simplicial
// triangulation, coset unimodularization, products of 1-D expansions) with
// re-expression of supports on the faces of the input polyhedra.

#include <asq/distributions.hpp>
#include <asq/piecewise.hpp>

#include <string>
#include <vector>

namespace asq {

// B_{n,zeta}(x) for zeta = e^{2 pi i zeta_turn}: one-variable polynomial with
// cyclotomic coefficients, from the generating series t e^{xt} / (zeta e^t - 1)
// (for zeta = 1: t e^{xt} / (e^t - 1)); B_{0,zeta} = 0 for zeta != 1.
MultiPoly zeta_bernoulli(long n, const Rat& zeta_turn);

// Expansion of sum_{j in Z, j >= k s + sigma} zeta^j delta_{j/k} through
// n_terms coefficients (1-D; periodic tables in k).
AsymptoticSeries euler_maclaurin_1d(const Rat& s, const Rat& sigma, const Rat& zeta_turn,
                                    long n_terms);

// Expansion of sum_{j in Z} zeta^j delta_{j/k}: k * [R] for zeta = 1, else 0.
AsymptoticSeries euler_maclaurin_full_line(const Rat& zeta_turn, long n_terms);

// Exact expansion of q[C_{A,sigma}] for an affine subspace A (finitely many
// coefficients; `order` controls only the translation truncation depth).
AsymptoticSeries expand_affine_exact(const AffineSubspace& a, const QVec& sigma,
                                     const QuasiPolynomial& q, long order);

struct Expansion {
  AsymptoticSeries series;
  std::vector<std::string> warnings;  // supports that resisted re-expression
};

// Expansion of m through coefficient order `order` (exact through k^{s-order}),
// with supports rewritten in terms of faces of the cone bases of m.
Expansion expand_with_diagnostics(const PiecewiseQP& m, long order);
AsymptoticSeries expand(const PiecewiseQP& m, long order);

struct LeadingTerm {
  long s = 0;
  RDistribution theta0;
};

// Leading exponent and coefficient, computed directly from polynomial parts.
LeadingTerm leading_term(const PiecewiseQP& m);

// --- series utilities -------------------------------------------------------

AsymptoticSeries series_truncated(const AsymptoticSeries& a, long order);

bool series_is_zero(const AsymptoticSeries& a);

// Pairing with faces clipped to a bounding box (for series whose raw terms
// carry unbounded faces that cancel outside the box).
Cyclotomic series_pair_poly_window(const AsymptoticSeries& a, const Int& k, const MultiPoly& phi,
                                   const Polyhedron& box);

// Rewrite each coefficient as a combination of the faces of the given
// polyhedra (probe-grid polynomial fitting per affine hull); groups that do
// not cancel onto candidate faces are kept as-is and reported.
struct FaceRewrite {
  AsymptoticSeries series;
  std::vector<std::string> warnings;
};
FaceRewrite series_rewrite_on_faces(const AsymptoticSeries& a,
                                    const std::vector<Polyhedron>& polys);

// Truncation guard for internal expansion depth (ASYMPTHETA_GUARD_ORDER,
// default 1).
long expansion_guard_order();

}  // namespace asq
