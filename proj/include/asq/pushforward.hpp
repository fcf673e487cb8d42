#pragma once

// Pushforward of lattice point-mass families along rational quotient maps
// with proper support: exact fiber sums, the projected point-mass sample,
// pairing-level pushforward of asymptotic series, and chamber-wise
// quasi-polynomial reconstruction with certified interpolation.

#include <asq/distributions.hpp>
#include <asq/piecewise.hpp>

#include <optional>
#include <vector>

namespace asq {

// Surjective linear map V -> V' with rational kernel.  Values are reported in
// coordinates of a lattice basis of the image of Z^d, so the image lattice is
// always the standard lattice of the codomain.
struct QuotientMap {
  QMat matrix;       // raw map, image_dim x domain_dim, full row rank
  QMat image_basis;  // rows: lattice basis of matrix(Z^d)
  QMat reduced;      // image-lattice coordinates of the map: reduced(Z^d) = Z^{d'}

  static QuotientMap from_matrix(const QMat& matrix);
  size_t domain_dim() const { return matrix.empty() ? 0 : matrix[0].size(); }
  size_t image_dim() const { return matrix.size(); }
  QVec apply(const QVec& v) const;  // in image-lattice coordinates
};

struct PropernessCertificate {
  bool proper = false;
  std::optional<QVec> violating_ray;  // direction in ker(pi) meeting a recession cone
  std::optional<size_t> piece_index;
};

// True iff each piece's recession cone meets the kernel only at 0, so that
// every fiber of the support is compact.
PropernessCertificate properness_check(const PiecewiseQP& m, const QuotientMap& pi);

// Exact fiber sum sum_{lambda : pi(lambda) = lambda'} m(k, lambda).
Cyclotomic push_eval(const PiecewiseQP& m, const QuotientMap& pi, const Int& k,
                     const QVec& lambda_prime);

// Point-mass sample of the pushed family over a bounded window in V'.
ThetaSample push_theta(const PiecewiseQP& m, const QuotientMap& pi, const Int& k,
                       const WindowBox& window);

// Pairing of the pushed series: <pi_* A, phi'> = <A, phi' o pi>.
Cyclotomic push_series_pair(const AsymptoticSeries& a, const QuotientMap& pi, const Int& k,
                            const MultiPoly& phi_prime);

// For a 1-D codomain: point-and-interval chamber decomposition of the
// projected support, with breakpoints at images of vertices.
std::vector<Polyhedron> chambers_1d(const PiecewiseQP& m, const QuotientMap& pi);

// Reconstruct the pushed family as a PiecewiseQP on the given chambers
// (full-dimensional or single points) by exact interpolation of fiber sums,
// verified on an independent grid; throws on verification failure.
PiecewiseQP push_reconstruct(const PiecewiseQP& m, const QuotientMap& pi,
                             const std::vector<Polyhedron>& chambers);

}  // namespace asq
