#pragma once

// Rational polyhedra in H-representation with exact (LP-free) geometry:
// Fourier-Motzkin feasibility, faces, tangent cones, Brianchon-Gram and
// half-open signed cone decompositions, nearest points, lattice point
// enumeration and exact polynomial integration with lattice-normalized
// measures.

#include <asq/linalg.hpp>
#include <asq/multipoly.hpp>
#include <asq/rational.hpp>

#include <optional>
#include <string>
#include <vector>

namespace asq {

struct AffineSubspace {
  QVec point;
  std::vector<QVec> basis;  // may be empty (a single point)

  size_t ambient_dim() const { return point.size(); }
  size_t dim() const { return basis.size(); }
  bool contains(const QVec& v) const;
};

struct Inequality {
  QVec a;
  Rat c;  // <a,v> >= c
};

class Polyhedron {
 public:
  explicit Polyhedron(size_t dim = 0) : dim_(dim) {}
  Polyhedron(size_t dim, std::vector<Inequality> ineqs) : dim_(dim), ineqs_(std::move(ineqs)) {}

  static Polyhedron empty(size_t dim);
  static Polyhedron whole_space(size_t dim) { return Polyhedron(dim); }
  static Polyhedron box(const QVec& lo, const QVec& hi);
  // Convex hull of points (bounded polytope), via brute-force facet search.
  static Polyhedron from_points(size_t dim, const std::vector<QVec>& pts);
  // apex + cone(rays) + span(lineality)
  static Polyhedron from_cone_generators(size_t dim, const QVec& apex,
                                         const std::vector<QVec>& rays,
                                         const std::vector<QVec>& lineality);

  size_t space_dim() const { return dim_; }
  const std::vector<Inequality>& ineqs() const { return ineqs_; }
  void add_ineq(const QVec& a, const Rat& c) { ineqs_.push_back({a, c}); }
  void add_eq(const QVec& a, const Rat& c);

  bool contains(const QVec& v) const;
  bool is_empty() const;
  bool is_bounded() const;

  Polyhedron translated(const QVec& t) const;
  Polyhedron intersect(const Polyhedron& other) const;

  // Indices of inequalities that hold with equality on all of P.
  std::vector<size_t> implicit_equalities() const;
  AffineSubspace affine_hull() const;  // throws on empty
  size_t affine_dim() const;           // dim of affine hull; empty -> throws

  // Any rational point of P; with relative_interior, a point in relint(P).
  QVec find_point(bool relative_interior = false) const;  // throws on empty

  std::vector<QVec> vertices() const;     // pointed P only (else empty list)
  Polyhedron recession_cone() const;
  std::vector<QVec> lineality_space() const;  // basis
  // Extreme rays of the recession cone, canonical primitive representatives
  // (projected orthogonally to the lineality space).
  std::vector<QVec> extreme_rays() const;

  // Minimal face (for a cone: the apex set).  Throws on empty.
  Polyhedron minimal_face() const;
  // One canonical point per minimal face: nearest point of the minimal face
  // to the origin.
  QVec apex_point() const;

  // All nonempty faces (including P itself), deduplicated.
  std::vector<Polyhedron> faces() const;
  std::vector<Polyhedron> faces_of_dim(size_t k) const;

  // Tangent cone at v: empty polyhedron if v not in P.
  Polyhedron tangent_cone_at(const QVec& v) const;

  // Canonical serialization of the underlying set (V-representation based);
  // equal sets compare equal.
  std::string canonical_key() const;
  bool set_equals(const Polyhedron& other) const { return canonical_key() == other.canonical_key(); }

  std::string to_string() const;

 private:
  size_t dim_;
  std::vector<Inequality> ineqs_;
};

// --- signed decompositions -------------------------------------------------

struct SignedPiece {
  int sign;  // +1 / -1
  Polyhedron poly;
};

// Brianchon-Gram: [P] = sum over faces F of (-1)^{dim F} [tangent cone at F].
// Bounded nonempty P only.
std::vector<SignedPiece> brianchon_gram(const Polyhedron& p);

// A simplicial cone with apex point, independent primitive rays and a
// lineality basis; the "open" flags mark half-open facets (facet obtained by
// dropping ray i is excluded when open[i] is true).
struct SimplicialCone {
  QVec apex;
  std::vector<QVec> rays;       // primitive integer directions (as rationals)
  std::vector<bool> open_facet; // size = rays.size()
  std::vector<QVec> lineality;  // basis

  bool contains(const QVec& v) const;  // respecting half-open facets
  Polyhedron closed_polyhedron() const;
};

// Exact partition of the cone C (apex point taken from C's minimal face, or
// supplied) into half-open simplicial cones sharing C's lineality.
std::vector<SimplicialCone> half_open_triangulation(const Polyhedron& cone);

// Signed decomposition of [C] into *closed* simplicial cones (triangulation
// followed by inclusion-exclusion over half-open facets).
std::vector<std::pair<int, SimplicialCone>> closed_cone_decomposition(const Polyhedron& cone);

// Lawrence-Varchenko style polarized decomposition of a bounded polytope:
// [P] = sum of signed closed simplicial cones at the vertices, all of whose
// rays satisfy <xi,r> > 0 lexicographically for xi = (primary, tiebreak).
std::vector<std::pair<int, SimplicialCone>> polarized_vertex_decomposition(
    const Polyhedron& p, const QVec& primary_direction);

// --- metric / lattice operations ------------------------------------------

// Unique minimizer of |v - target|^2 over nonempty P.
QVec nearest_point(const Polyhedron& p, const QVec& target);
inline QVec nearest_point(const Polyhedron& p) { return nearest_point(p, qvec_zero(p.space_dim())); }

std::vector<IVec> enumerate_lattice_points(const Polyhedron& p);

// Lattice basis of lin(aff(F)) ∩ Z^d.
IMat face_direction_lattice(const Polyhedron& f);

// Exact integral of p over bounded F with the measure on aff(F) normalized
// so a fundamental cell of Z^d ∩ lin(aff F) has volume 1.  Points get the
// counting measure.
Cyclotomic integrate_poly_over_polytope(const MultiPoly& p, const Polyhedron& f);

// Triangulation of a bounded polytope into simplices (vertex tuples of size
// affine_dim+1).
std::vector<std::vector<QVec>> triangulate_polytope(const Polyhedron& p);

// Fundamental-parallelepiped coset representatives: lattice points
// delta = sum t_i alpha_i with t_i in [0,1), for independent integer rays
// alpha_i; the count equals the sublattice index.
std::vector<IVec> parallelepiped_representatives(const std::vector<QVec>& rays, size_t dim);

// --- probe grids -----------------------------------------------------------

// Deterministic probe grid for indicator identities: vertices/apex points of
// all faces, relative-interior points, +-1/7 axis perturbations, points
// pushed along rays, and `n_random` pseudo-random rational points in an
// enclosing box (fixed seed).
std::vector<QVec> probe_grid(const std::vector<Polyhedron>& polys, size_t n_random = 100);

}  // namespace asq
