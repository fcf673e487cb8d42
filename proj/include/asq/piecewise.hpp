#pragma once

// Piecewise quasi-polynomial functions on Z_{>0} x Z^d: finite sums of
// q * [C_{P,sigma}], where C_{P,sigma} = {(k, k*v + sigma) : v in P, k > 0}.
// Supports evaluation, module actions (scale / twist / translate / shear),
// finite-difference kernel witnesses, the tangent-cone map with explicit
// agreement windows, shift reduction to lower-dimensional pieces, and
// polarization into per-apex half-space cone decompositions.

#include <asq/polyhedron.hpp>
#include <asq/quasipoly.hpp>

#include <optional>
#include <string>
#include <vector>

namespace asq {

struct ShiftedCone {
  Polyhedron base;  // P
  QVec shift;       // sigma, rational

  // (k, lambda) membership: (lambda - sigma) / k in P, k > 0.
  bool contains(const Int& k, const QVec& lambda) const;
};

struct QPPiece {
  QuasiPolynomial q;
  ShiftedCone cone;
};

class PiecewiseQP {
 public:
  explicit PiecewiseQP(size_t dim = 0) : dim_(dim) {}

  static PiecewiseQP indicator(const Polyhedron& p, const QVec& shift);
  static PiecewiseQP indicator(const Polyhedron& p);

  size_t dim() const { return dim_; }
  const std::vector<QPPiece>& pieces() const { return pieces_; }
  void add_piece(const QuasiPolynomial& q, const Polyhedron& p, const QVec& shift);
  bool no_pieces() const { return pieces_.empty(); }

  PiecewiseQP operator-() const;
  friend PiecewiseQP operator+(const PiecewiseQP& a, const PiecewiseQP& b);
  friend PiecewiseQP operator-(const PiecewiseQP& a, const PiecewiseQP& b);
  PiecewiseQP scaled(const Cyclotomic& c) const;

  std::string to_string() const;

 private:
  size_t dim_;
  std::vector<QPPiece> pieces_;
};

// Exact evaluation; throws on k <= 0.
Cyclotomic pqp_evaluate(const PiecewiseQP& m, const Int& k, const QVec& lambda);
Cyclotomic pqp_evaluate(const PiecewiseQP& m, const Int& k, const IVec& lambda);

// Module actions.
PiecewiseQP pqp_scale(const PiecewiseQP& m, const QuasiPolynomial& h);
PiecewiseQP pqp_twist(const PiecewiseQP& m, const Character& g);
PiecewiseQP pqp_translate(const PiecewiseQP& m, const IVec& sigma);  // integral only
// m'(k, lambda) = m(k, lambda - k*sigma); sigma rational, absorbed into cones.
PiecewiseQP pqp_shear(const PiecewiseQP& m, const QVec& sigma);

// (nabla_eta^zeta m)(k,lambda) = m(k,lambda) - zeta m(k,lambda-eta).
PiecewiseQP pqp_difference(const PiecewiseQP& m, const IVec& eta, const Rat& zeta_turn);

// Structural zero test: recombine pieces whose cones describe the same set
// (shift reduced modulo the lineality space) and check all sums vanish.
bool pqp_structurally_zero(const PiecewiseQP& m);

// Brute-force equality on the window {1 <= k <= kmax, |lambda_i| <= radius}.
bool pqp_equal_on_window(const PiecewiseQP& a, const PiecewiseQP& b, const Int& kmax,
                         const Int& radius);
inline bool pqp_zero_on_window(const PiecewiseQP& m, const Int& kmax, const Int& radius) {
  return pqp_equal_on_window(m, PiecewiseQP(m.dim()), kmax, radius);
}

// Zero test: structural recombination, then windowed brute force with a
// window sized from the data (twist periods and shift magnitudes).
bool pqp_is_zero(const PiecewiseQP& m);

struct KernelCandidate {
  IVec eta;
  Rat zeta_turn;  // zeta = e^{2 pi i zeta_turn}, != 0 mod 1
};

struct KernelWitness {
  IVec eta;
  Rat zeta_turn;
  Int n;  // (nabla_eta^zeta)^n m = 0
};

std::optional<KernelWitness> pqp_kernel_witness(const PiecewiseQP& m,
                                                const std::vector<KernelCandidate>& candidates,
                                                const Int& n_max);

// T_v m: replace each cone base P by its tangent cone at v (dropping pieces
// with v outside P).
PiecewiseQP tangent_cone_map(const PiecewiseQP& m, const QVec& v);

// Explicit agreement window for tangent_cone_map: m and T_v m agree at all
// (k, lambda) with k > threshold and |lambda/k - v|_inf < radius.
struct TangentWindow {
  Rat radius;
  Int threshold;
};
TangentWindow tangent_cone_window(const PiecewiseQP& m, const QVec& v);

// [C_P] - [C_{P,sigma}] as a sum of pieces of dimension <= dim(P) - 1;
// requires sigma in lin(P) and P simple (independent facet normals).
PiecewiseQP shift_reduction(const Polyhedron& p, const QVec& sigma);

// Pointwise-equal form whose cones are closed simplicial vertex cones, all
// polarized by a single global lexicographic direction (primary, then a
// generic tiebreak); bounded bases are decomposed at their vertices, conical
// bases are kept.  Throws for unbounded non-conical bases.
PiecewiseQP pqp_polarize(const PiecewiseQP& m, const QVec& primary_direction);
PiecewiseQP pqp_polarize(const PiecewiseQP& m);

}  // namespace asq
