#pragma once

// Exact linear algebra over Q and integer-lattice computations (Hermite-style
// elimination): ranks, solving, nullspaces, lattice kernels, saturation and
// complementary sublattices.

#include <asq/rational.hpp>

#include <optional>
#include <vector>

namespace asq {

using QMat = std::vector<QVec>;  // row-major
using IMat = std::vector<IVec>;  // rows are lattice vectors

QVec mat_vec(const QMat& a, const QVec& x);
QMat mat_mul(const QMat& a, const QMat& b);
QMat mat_transpose(const QMat& a);
QMat mat_identity(size_t n);

// Reduced row echelon form in place; returns pivot columns.
std::vector<size_t> rref(QMat& a);

size_t mat_rank(QMat a);

// One solution of A x = b, if any.
std::optional<QVec> solve_linear(const QMat& a, const QVec& b);

// Basis of {x : A x = 0}.
std::vector<QVec> nullspace(const QMat& a);

std::optional<QMat> mat_inverse(const QMat& a);

// Scale a nonzero rational vector to a primitive integer vector (gcd 1),
// keeping orientation.
IVec primitive_vector(const QVec& v);

inline QVec to_qvec(const IVec& v) {
  QVec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
  return r;
}

// Row-style Hermite normal form of the lattice generated by `rows`;
// returns a basis (independent rows).
IMat lattice_basis_hnf(IMat rows);

// Basis of {x in Z^n : A x = 0} for an integer matrix A (rows of length n).
IMat integer_kernel(const IMat& a);

// Basis of span_Q(gens) ∩ Z^d (the saturation).  gens are rational vectors
// of length d.
IMat saturate_lattice(const std::vector<QVec>& gens, size_t d);

// Given a saturated sublattice basis B (rows in Z^d, independent), return C
// with Z^d = span(B) ⊕ span(C); throws if B is not saturated.
IMat hermite_complement(const IMat& b, size_t d);

}  // namespace asq
