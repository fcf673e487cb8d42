#include <asq/polyhedron.hpp>

#include <algorithm>
#include <map>
#include <functional>
#include <random>
#include <set>
#include <stdexcept>

namespace asq {

namespace {

// A constraint <a,v> >= c (or > c when strict) used by Fourier-Motzkin.
struct Constraint {
  QVec a;
  Rat c;
  bool strict = false;
};

std::vector<Constraint> to_constraints(const Polyhedron& p) {
  std::vector<Constraint> cs;
  for (const auto& iq : p.ineqs()) cs.push_back({iq.a, iq.c, false});
  return cs;
}

Constraint normalize_constraint(Constraint c) {
  Rat scale = 0;
  for (const Rat& x : c.a)
    if (x != 0) { scale = abs(x); break; }
  if (scale == 0) return c;
  for (Rat& x : c.a) x /= scale;
  c.c /= scale;
  return c;
}

// Eliminate variable `var`, keeping the projection exact.
std::vector<Constraint> fm_eliminate(const std::vector<Constraint>& cs, size_t var) {
  std::vector<const Constraint*> pos, neg;
  std::vector<Constraint> out;
  for (const auto& c : cs) {
    if (c.a[var] > 0)
      pos.push_back(&c);
    else if (c.a[var] < 0)
      neg.push_back(&c);
    else
      out.push_back(c);
  }
  std::set<std::string> seen;
  auto push_unique = [&](Constraint c) {
    c = normalize_constraint(c);
    std::string key = c.strict ? "s" : "w";
    for (const Rat& x : c.a) key += rat_to_string(x) + ",";
    key += ";" + rat_to_string(c.c);
    if (seen.insert(key).second) out.push_back(std::move(c));
  };
  for (const auto* p : pos) {
    for (const auto* n : neg) {
      // p: a_p[var] x_var >= c_p - rest_p ; n gives upper bound.
      Constraint c;
      c.a = qvec_sub(qvec_scale(-n->a[var], p->a), qvec_scale(-p->a[var], n->a));
      c.c = (-n->a[var]) * p->c + p->a[var] * n->c;
      c.a[var] = 0;
      c.strict = p->strict || n->strict;
      push_unique(std::move(c));
    }
  }
  return out;
}

// Feasibility of a constraint system by full elimination.
bool fm_feasible(std::vector<Constraint> cs, size_t dim) {
  for (size_t v = dim; v-- > 0;) cs = fm_eliminate(cs, v);
  for (const auto& c : cs) {
    if (c.strict ? !(Rat(0) > c.c) : !(Rat(0) >= c.c)) return false;
  }
  return true;
}

struct Bounds {
  bool has_lo = false, has_hi = false;
  Rat lo, hi;
  bool lo_strict = false, hi_strict = false;
};

}  // namespace

bool AffineSubspace::contains(const QVec& v) const {
  QVec diff = qvec_sub(v, point);
  if (qvec_is_zero(diff)) return true;
  QMat m;
  for (const auto& b : basis) m.push_back(b);
  size_t r0 = mat_rank(m);
  m.push_back(diff);
  return mat_rank(m) == r0;
}

Polyhedron Polyhedron::empty(size_t dim) {
  Polyhedron p(dim);
  p.add_ineq(qvec_zero(dim), Rat(1));  // 0 >= 1
  return p;
}

Polyhedron Polyhedron::box(const QVec& lo, const QVec& hi) {
  size_t d = lo.size();
  Polyhedron p(d);
  for (size_t i = 0; i < d; ++i) {
    QVec e = qvec_zero(d);
    e[i] = 1;
    p.add_ineq(e, lo[i]);
    e[i] = -1;
    p.add_ineq(e, -hi[i]);
  }
  return p;
}

void Polyhedron::add_eq(const QVec& a, const Rat& c) {
  add_ineq(a, c);
  QVec na(a.size());
  for (size_t i = 0; i < a.size(); ++i) na[i] = -a[i];
  add_ineq(na, -c);
}

bool Polyhedron::contains(const QVec& v) const {
  if (v.size() != dim_) throw std::invalid_argument("Polyhedron::contains: dimension mismatch");
  for (const auto& iq : ineqs_)
    if (qvec_dot(iq.a, v) < iq.c) return false;
  return true;
}

bool Polyhedron::is_empty() const { return !fm_feasible(to_constraints(*this), dim_); }

Polyhedron Polyhedron::translated(const QVec& t) const {
  Polyhedron p(dim_);
  for (const auto& iq : ineqs_) p.add_ineq(iq.a, iq.c + qvec_dot(iq.a, t));
  return p;
}

Polyhedron Polyhedron::intersect(const Polyhedron& other) const {
  if (other.dim_ != dim_) throw std::invalid_argument("Polyhedron::intersect: dimension mismatch");
  Polyhedron p = *this;
  for (const auto& iq : other.ineqs_) p.add_ineq(iq.a, iq.c);
  return p;
}

std::vector<size_t> Polyhedron::implicit_equalities() const {
  std::vector<size_t> eqs;
  for (size_t i = 0; i < ineqs_.size(); ++i) {
    auto cs = to_constraints(*this);
    cs.push_back({ineqs_[i].a, ineqs_[i].c, true});  // <a,v> > c
    if (!fm_feasible(cs, dim_)) eqs.push_back(i);
  }
  return eqs;
}

AffineSubspace Polyhedron::affine_hull() const {
  if (is_empty()) throw std::invalid_argument("affine_hull: empty polyhedron");
  QMat eqs;
  for (size_t i : implicit_equalities()) eqs.push_back(ineqs_[i].a);
  AffineSubspace s;
  s.point = find_point(false);
  if (eqs.empty()) {
    for (size_t i = 0; i < dim_; ++i) {
      QVec e = qvec_zero(dim_);
      e[i] = 1;
      s.basis.push_back(e);
    }
  } else {
    s.basis = nullspace(eqs);
  }
  return s;
}

size_t Polyhedron::affine_dim() const { return affine_hull().basis.size(); }

QVec Polyhedron::find_point(bool relative_interior) const {
  std::vector<Constraint> base = to_constraints(*this);
  if (relative_interior) {
    // Pin the implicit equalities so the remaining constraints can be made
    // strict on the affine hull.
    for (size_t i : implicit_equalities()) {
      base.push_back({ineqs_[i].a, ineqs_[i].c, false});
      QVec na = qvec_scale(Rat(-1), ineqs_[i].a);
      base.push_back({na, -ineqs_[i].c, false});
    }
  }
  // systems[j]: constraints on variables 0..j-1.
  std::vector<std::vector<Constraint>> systems(dim_ + 1);
  systems[dim_] = base;
  for (size_t v = dim_; v-- > 0;) systems[v] = fm_eliminate(systems[v + 1], v);
  for (const auto& c : systems[0])
    if (c.strict ? !(Rat(0) > c.c) : !(Rat(0) >= c.c))
      throw std::invalid_argument("find_point: empty polyhedron");
  QVec x = qvec_zero(dim_);
  for (size_t j = 0; j < dim_; ++j) {
    Bounds b;
    for (const auto& c : systems[j + 1]) {
      if (c.a[j] == 0) continue;
      Rat rest = c.c;
      for (size_t i = 0; i < j; ++i) rest -= c.a[i] * x[i];
      Rat bound = rest / c.a[j];
      if (c.a[j] > 0) {  // x_j >= bound
        if (!b.has_lo || bound > b.lo) {
          b.has_lo = true;
          b.lo = bound;
          b.lo_strict = c.strict;
        } else if (bound == b.lo && c.strict) {
          b.lo_strict = true;
        }
      } else {  // x_j <= bound
        if (!b.has_hi || bound < b.hi) {
          b.has_hi = true;
          b.hi = bound;
          b.hi_strict = c.strict;
        } else if (bound == b.hi && c.strict) {
          b.hi_strict = true;
        }
      }
    }
    bool want_open = relative_interior;
    if (b.has_lo && b.has_hi) {
      if (b.lo == b.hi)
        x[j] = b.lo;  // forced (cannot be strict if feasible)
      else
        x[j] = (want_open || b.lo_strict || b.hi_strict) ? (b.lo + b.hi) / 2 : b.lo;
    } else if (b.has_lo) {
      x[j] = (want_open || b.lo_strict) ? b.lo + 1 : b.lo;
    } else if (b.has_hi) {
      x[j] = (want_open || b.hi_strict) ? b.hi - 1 : b.hi;
    } else {
      x[j] = 0;
    }
  }
  return x;
}

std::vector<QVec> Polyhedron::lineality_space() const {
  QMat m;
  for (const auto& iq : ineqs_) m.push_back(iq.a);
  if (m.empty()) {
    std::vector<QVec> full;
    for (size_t i = 0; i < dim_; ++i) {
      QVec e = qvec_zero(dim_);
      e[i] = 1;
      full.push_back(e);
    }
    return full;
  }
  return nullspace(m);
}

Polyhedron Polyhedron::recession_cone() const {
  Polyhedron r(dim_);
  for (const auto& iq : ineqs_) r.add_ineq(iq.a, Rat(0));
  return r;
}

std::vector<QVec> Polyhedron::vertices() const {
  std::vector<QVec> result;
  if (!lineality_space().empty()) return result;
  size_t m = ineqs_.size();
  size_t d = dim_;
  if (d == 0) {
    if (!is_empty()) result.push_back(QVec{});
    return result;
  }
  std::set<std::string> seen;
  // All size-d subsets of inequalities.
  std::vector<size_t> comb;
  std::function<void(size_t)> rec = [&](size_t start) {
    if (comb.size() == d) {
      QMat a;
      QVec b;
      for (size_t i : comb) {
        a.push_back(ineqs_[i].a);
        b.push_back(ineqs_[i].c);
      }
      if (mat_rank(a) != d) return;
      auto sol = solve_linear(a, b);
      if (!sol || !contains(*sol)) return;
      std::string key = qvec_to_string(*sol);
      if (seen.insert(key).second) result.push_back(*sol);
      return;
    }
    for (size_t i = start; i < m; ++i) {
      comb.push_back(i);
      rec(i + 1);
      comb.pop_back();
    }
  };
  rec(0);
  std::sort(result.begin(), result.end());
  return result;
}

std::vector<QVec> Polyhedron::extreme_rays() const {
  Polyhedron rc = recession_cone();
  std::vector<QVec> lin = lineality_space();
  size_t l = lin.size(), d = dim_;
  if (d == 0) return {};
  size_t need = (d - l >= 1) ? d - l - 1 : 0;
  std::vector<QVec> rays;
  std::set<std::string> seen;
  // Orthogonal projection away from the lineality space, for canonical reps.
  QMat linmat;
  for (const auto& v : lin) linmat.push_back(v);
  auto project_off_lineality = [&](QVec w) {
    for (const auto& v : lin) {
      Rat f = qvec_dot(w, v) / qvec_dot(v, v);
      w = qvec_sub(w, qvec_scale(f, v));
    }
    return w;
  };
  auto try_direction = [&](const QVec& w0) {
    QVec w = project_off_lineality(w0);
    if (qvec_is_zero(w)) return;
    QVec cand = to_qvec(primitive_vector(w));
    for (int sgn = 0; sgn < 2; ++sgn) {
      QVec r = sgn ? qvec_scale(Rat(-1), cand) : cand;
      if (!rc.contains(r)) continue;
      std::string key = qvec_to_string(r);
      if (seen.insert(key).second) rays.push_back(r);
      return;
    }
  };
  if (d - l == 1) {
    // Up to one ray pair with no active constraints.
    std::vector<QVec> basis = lin.empty() ? std::vector<QVec>{} : nullspace(linmat);
    if (lin.empty()) {
      QVec e = qvec_zero(d);
      e[0] = 1;
      basis = {e};
    }
    for (const auto& b : basis) try_direction(b);
    std::sort(rays.begin(), rays.end());
    return rays;
  }
  size_t m = ineqs_.size();
  std::vector<size_t> comb;
  std::function<void(size_t)> rec = [&](size_t start) {
    if (comb.size() == need) {
      QMat a;
      for (size_t i : comb) a.push_back(ineqs_[i].a);
      auto ns = nullspace(a.empty() ? QMat{qvec_zero(d)} : a);
      if (ns.size() != l + 1) return;
      // Find a vector in the solution space outside the lineality.
      for (const auto& w : ns) {
        QVec proj = project_off_lineality(w);
        if (!qvec_is_zero(proj)) {
          try_direction(w);
          break;
        }
      }
      return;
    }
    for (size_t i = start; i < m; ++i) {
      comb.push_back(i);
      rec(i + 1);
      comb.pop_back();
    }
  };
  rec(0);
  std::sort(rays.begin(), rays.end());
  return rays;
}

bool Polyhedron::is_bounded() const {
  if (is_empty()) return true;
  return lineality_space().empty() && extreme_rays().empty();
}

Polyhedron Polyhedron::minimal_face() const {
  if (is_empty()) throw std::invalid_argument("minimal_face: empty polyhedron");
  Polyhedron f = *this;
  for (const auto& iq : ineqs_) {
    Polyhedron g = f;
    g.add_eq(iq.a, iq.c);
    if (!g.is_empty()) f = g;
  }
  return f;
}

QVec Polyhedron::apex_point() const { return nearest_point(minimal_face()); }

std::vector<Polyhedron> Polyhedron::faces() const {
  std::vector<Polyhedron> result;
  if (is_empty()) return result;
  // BFS over closures of active sets.
  auto closure_key = [&](const Polyhedron& f) {
    std::string key;
    for (size_t i = 0; i < ineqs_.size(); ++i) {
      Polyhedron g = f;
      // Is inequality i tight on all of f?
      auto cs = to_constraints(f);
      cs.push_back({ineqs_[i].a, ineqs_[i].c, true});
      key += fm_feasible(cs, dim_) ? '0' : '1';
    }
    return key;
  };
  std::map<std::string, Polyhedron> seen;
  std::vector<Polyhedron> frontier{*this};
  seen.emplace(closure_key(*this), *this);
  while (!frontier.empty()) {
    std::vector<Polyhedron> next;
    for (const auto& f : frontier) {
      for (const auto& iq : ineqs_) {
        Polyhedron g = f;
        g.add_eq(iq.a, iq.c);
        if (g.is_empty()) continue;
        std::string key = closure_key(g);
        if (seen.count(key)) continue;
        seen.emplace(key, g);
        next.push_back(g);
      }
    }
    frontier = std::move(next);
  }
  for (auto& [k, f] : seen) result.push_back(f);
  return result;
}

std::vector<Polyhedron> Polyhedron::faces_of_dim(size_t k) const {
  std::vector<Polyhedron> result;
  for (const auto& f : faces())
    if (f.affine_dim() == k) result.push_back(f);
  return result;
}

Polyhedron Polyhedron::tangent_cone_at(const QVec& v) const {
  if (!contains(v)) return Polyhedron::empty(dim_);
  Polyhedron t(dim_);
  for (const auto& iq : ineqs_)
    if (qvec_dot(iq.a, v) == iq.c) t.add_ineq(iq.a, qvec_dot(iq.a, v));
  return t;
}

std::string Polyhedron::canonical_key() const {
  if (is_empty()) return "empty:" + std::to_string(dim_);
  std::vector<QVec> lin = lineality_space();
  size_t l = lin.size();
  // Canonical points: nearest point of each minimal face (dimension-l faces).
  std::vector<std::string> pts;
  for (const auto& f : faces())
    if (f.affine_dim() == l) pts.push_back(qvec_to_string(nearest_point(f)));
  std::sort(pts.begin(), pts.end());
  std::vector<std::string> rays;
  for (const auto& r : extreme_rays()) rays.push_back(qvec_to_string(r));
  std::sort(rays.begin(), rays.end());
  std::string linkey;
  if (!lin.empty()) {
    IMat sat = saturate_lattice(lin, dim_);
    for (const auto& row : lattice_basis_hnf(sat)) {
      linkey += "[";
      for (const auto& x : row) linkey += x.str() + ",";
      linkey += "]";
    }
  }
  std::string key = "d" + std::to_string(dim_) + "|P:";
  for (const auto& s : pts) key += s + ";";
  key += "|R:";
  for (const auto& s : rays) key += s + ";";
  key += "|L:" + linkey;
  return key;
}

std::string Polyhedron::to_string() const {
  std::string s = "{";
  for (size_t i = 0; i < ineqs_.size(); ++i) {
    if (i) s += ", ";
    s += qvec_to_string(ineqs_[i].a) + "·v >= " + rat_to_string(ineqs_[i].c);
  }
  return s + "}";
}

// --- V-representation conversions -----------------------------------------

namespace {

// H-representation of conv(points) + cone(rays) + span(lineality), all
// origin-based for the conic part.  Brute-force facet search inside the
// affine hull.
Polyhedron hull_to_hrep(size_t dim, const std::vector<QVec>& points, const std::vector<QVec>& rays,
                        const std::vector<QVec>& lineality) {
  if (points.empty()) throw std::invalid_argument("hull_to_hrep: needs at least one point");
  const QVec& p0 = points[0];
  // Directions spanning the affine hull.
  std::vector<QVec> dirs;
  for (size_t i = 1; i < points.size(); ++i) dirs.push_back(qvec_sub(points[i], p0));
  for (const auto& r : rays) dirs.push_back(r);
  for (const auto& v : lineality) dirs.push_back(v);
  QMat dirmat;
  for (const auto& v : dirs) dirmat.push_back(v);
  Polyhedron result(dim);
  // Equalities cutting out the affine hull.
  std::vector<QVec> normals =
      dirmat.empty() ? [&] {
        std::vector<QVec> basis;
        for (size_t i = 0; i < dim; ++i) {
          QVec e = qvec_zero(dim);
          e[i] = 1;
          basis.push_back(e);
        }
        return basis;
      }()
                     : nullspace(dirmat);
  for (const auto& n : normals) result.add_eq(n, qvec_dot(n, p0));
  size_t r = dim - normals.size();  // affine dimension
  if (r == 0) return result;
  // Candidate facet hyperplanes: affine spans of subsets of generators of
  // affine dimension r-1 (within the hull).
  struct Gen {
    QVec dir;     // direction from p0 (for points) or ray
    bool is_ray;  // rays/lineality must lie in the hyperplane direction space
  };
  std::vector<Gen> gens;
  for (const auto& p : points) gens.push_back({qvec_sub(p, p0), false});
  for (const auto& v : rays) gens.push_back({v, true});
  // Lineality is part of every facet.
  size_t n = gens.size();
  std::set<std::string> seen;
  std::vector<size_t> comb;
  // Subsets of every size up to r: lineality (included in every candidate
  // below) may supply facet directions, so facets can be spanned by fewer
  // than r generators.  Supporting non-facet hyperplanes found along the way
  // are valid, merely redundant.
  std::function<void(size_t)> rec = [&](size_t start) {
    {
      // Build the direction space of the candidate hyperplane: differences
      // among chosen point-gens, chosen rays, and all lineality.
      QMat span;
      std::optional<size_t> base_pt;
      for (size_t i : comb)
        if (!gens[i].is_ray) { base_pt = i; break; }
      for (size_t i : comb) {
        if (gens[i].is_ray)
          span.push_back(gens[i].dir);
        else if (base_pt && i != *base_pt)
          span.push_back(qvec_sub(gens[i].dir, gens[*base_pt].dir));
      }
      for (const auto& v : lineality) span.push_back(v);
      // Candidate normals: covectors vanishing on the hyperplane directions.
      auto ns = nullspace(span.empty() ? QMat{qvec_zero(dim)} : span);
      QVec offset_base = base_pt ? gens[*base_pt].dir : qvec_zero(dim);
      for (const auto& cand : ns) {
        // Check one-sidedness of all generators.
        int side = 0;
        bool ok = true;
        for (const auto& g : gens) {
          Rat val = g.is_ray ? qvec_dot(cand, g.dir)
                             : qvec_dot(cand, qvec_sub(g.dir, offset_base));
          if (val == 0) continue;
          int s = val > 0 ? 1 : -1;
          if (side == 0)
            side = s;
          else if (side != s) {
            ok = false;
            break;
          }
        }
        if (!ok || side == 0) continue;
        QVec a = side > 0 ? cand : qvec_scale(Rat(-1), cand);
        a = to_qvec(primitive_vector(a));
        Rat c = qvec_dot(a, qvec_add(p0, offset_base));
        std::string key = qvec_to_string(a) + "|" + rat_to_string(c);
        if (seen.insert(key).second) result.add_ineq(a, c);
      }
    }
    if (comb.size() < r)
      for (size_t i = start; i < n; ++i) {
        comb.push_back(i);
        rec(i + 1);
        comb.pop_back();
      }
  };
  if (r >= 1) rec(0);
  return result;
}

}  // namespace

Polyhedron Polyhedron::from_points(size_t dim, const std::vector<QVec>& pts) {
  return hull_to_hrep(dim, pts, {}, {});
}

Polyhedron Polyhedron::from_cone_generators(size_t dim, const QVec& apex,
                                            const std::vector<QVec>& rays,
                                            const std::vector<QVec>& lineality) {
  return hull_to_hrep(dim, {apex}, rays, lineality);
}

// --- signed decompositions -------------------------------------------------

std::vector<SignedPiece> brianchon_gram(const Polyhedron& p) {
  if (p.is_empty()) throw std::invalid_argument("brianchon_gram: empty polyhedron");
  if (!p.is_bounded()) throw std::invalid_argument("brianchon_gram: unbounded input (pre-split or pass cones directly)");
  std::vector<SignedPiece> pieces;
  for (const auto& f : p.faces()) {
    size_t fd = f.affine_dim();
    QVec x = f.find_point(true);
    pieces.push_back({fd % 2 == 0 ? 1 : -1, p.tangent_cone_at(x)});
  }
  return pieces;
}

bool SimplicialCone::contains(const QVec& v) const {
  QMat cols;  // columns: rays then lineality
  QMat sys(apex.size(), QVec(rays.size() + lineality.size()));
  for (size_t i = 0; i < apex.size(); ++i) {
    for (size_t j = 0; j < rays.size(); ++j) sys[i][j] = rays[j][i];
    for (size_t j = 0; j < lineality.size(); ++j) sys[i][rays.size() + j] = lineality[j][i];
  }
  QVec rhs = qvec_sub(v, apex);
  auto sol = solve_linear(sys, rhs);
  if (!sol) return false;
  // Verify (underdetermined impossible: generators independent; but guard).
  QVec check = qvec_zero(apex.size());
  for (size_t j = 0; j < rays.size(); ++j) check = qvec_add(check, qvec_scale((*sol)[j], rays[j]));
  for (size_t j = 0; j < lineality.size(); ++j)
    check = qvec_add(check, qvec_scale((*sol)[rays.size() + j], lineality[j]));
  if (check != rhs) return false;
  for (size_t j = 0; j < rays.size(); ++j) {
    if (open_facet[j] ? !((*sol)[j] > 0) : !((*sol)[j] >= 0)) return false;
  }
  return true;
}

Polyhedron SimplicialCone::closed_polyhedron() const {
  return Polyhedron::from_cone_generators(apex.size(), apex, rays, lineality);
}

namespace {

// Recursive facet triangulation of the pointed cone generated by `rays`
// (origin-based).  Returns subsets of ray indices forming simplicial cones.
std::vector<std::vector<size_t>> triangulate_ray_fan(size_t dim, const std::vector<QVec>& rays,
                                                     const std::vector<size_t>& subset) {
  QMat m;
  for (size_t i : subset) m.push_back(rays[i]);
  size_t rank = mat_rank(m);
  if (subset.size() == rank) return {subset};  // already simplicial
  std::vector<QVec> sub;
  for (size_t i : subset) sub.push_back(rays[i]);
  Polyhedron cone = Polyhedron::from_cone_generators(dim, qvec_zero(dim), sub, {});
  size_t pivot = subset[0];
  std::vector<std::vector<size_t>> out;
  std::set<std::string> seen;
  for (const auto& iq : cone.ineqs()) {
    // Each facet: rays with <a,r> = 0 for a genuine inequality (skip the
    // affine-hull equalities, which all rays satisfy).
    std::vector<size_t> on;
    bool all_on = true;
    for (size_t i : subset) {
      if (qvec_dot(iq.a, rays[i]) == 0)
        on.push_back(i);
      else
        all_on = false;
    }
    if (all_on) continue;                                    // equality, not a facet
    if (std::count(on.begin(), on.end(), pivot)) continue;   // facet contains pivot
    // Keep only genuine facets (touching rank = cone rank - 1).
    QMat onmat;
    for (size_t i : on) onmat.push_back(rays[i]);
    if (onmat.empty() || mat_rank(onmat) != rank - 1) continue;
    std::string key;
    for (size_t i : on) key += std::to_string(i) + ",";
    if (!seen.insert(key).second) continue;
    for (auto piece : triangulate_ray_fan(dim, rays, on)) {
      piece.push_back(pivot);
      out.push_back(piece);
    }
  }
  return out;
}

}  // namespace

std::vector<SimplicialCone> half_open_triangulation(const Polyhedron& cone) {
  if (cone.is_empty()) return {};
  std::vector<QVec> lin = cone.lineality_space();
  std::vector<QVec> rays = cone.extreme_rays();
  QVec apex = cone.apex_point();
  if (rays.empty()) {
    SimplicialCone c{apex, {}, {}, lin};
    return {c};
  }
  std::vector<size_t> all(rays.size());
  for (size_t i = 0; i < rays.size(); ++i) all[i] = i;
  auto fan = triangulate_ray_fan(cone.space_dim(), rays, all);
  // Choose a generic interior reference point z = sum t^i * ray_i and assign
  // half-open facets: a wall is kept by the cell on z's side.
  std::vector<long> ts = {2, 3, 5, 7, 11, 13};
  for (long t : ts) {
    QVec z = qvec_zero(cone.space_dim());
    Rat w = 1;
    for (const auto& r : rays) {
      z = qvec_add(z, qvec_scale(w, r));
      w /= t;
    }
    bool generic = true;
    std::vector<SimplicialCone> cells;
    for (const auto& piece : fan) {
      SimplicialCone cell;
      cell.apex = apex;
      for (size_t i : piece) cell.rays.push_back(rays[i]);
      cell.lineality = lin;
      cell.open_facet.assign(cell.rays.size(), false);
      for (size_t j = 0; j < cell.rays.size() && generic; ++j) {
        // Normal of the facet spanned by the other rays + lineality,
        // oriented towards ray j.
        QMat span;
        for (size_t i = 0; i < cell.rays.size(); ++i)
          if (i != j) span.push_back(cell.rays[i]);
        for (const auto& v : lin) span.push_back(v);
        auto ns = nullspace(span.empty() ? QMat{qvec_zero(cone.space_dim())} : span);
        QVec n;
        for (const auto& cand : ns)
          if (qvec_dot(cand, cell.rays[j]) != 0) { n = cand; break; }
        if (n.empty()) { generic = false; break; }  // should not happen
        if (qvec_dot(n, cell.rays[j]) < 0) n = qvec_scale(Rat(-1), n);
        Rat side = qvec_dot(n, z);
        if (side == 0) { generic = false; break; }
        cell.open_facet[j] = (side < 0);
      }
      if (!generic) break;
      cells.push_back(std::move(cell));
    }
    if (generic) return cells;
  }
  throw std::logic_error("half_open_triangulation: failed to find generic reference point");
}

std::vector<std::pair<int, SimplicialCone>> closed_cone_decomposition(const Polyhedron& cone) {
  std::vector<std::pair<int, SimplicialCone>> out;
  for (const auto& cell : half_open_triangulation(cone)) {
    std::vector<size_t> open_idx;
    for (size_t i = 0; i < cell.open_facet.size(); ++i)
      if (cell.open_facet[i]) open_idx.push_back(i);
    size_t k = open_idx.size();
    for (size_t mask = 0; mask < (size_t(1) << k); ++mask) {
      SimplicialCone face;
      face.apex = cell.apex;
      face.lineality = cell.lineality;
      int sign = 1;
      std::set<size_t> dropped;
      for (size_t b = 0; b < k; ++b)
        if (mask & (size_t(1) << b)) {
          dropped.insert(open_idx[b]);
          sign = -sign;
        }
      for (size_t i = 0; i < cell.rays.size(); ++i)
        if (!dropped.count(i)) face.rays.push_back(cell.rays[i]);
      face.open_facet.assign(face.rays.size(), false);
      out.push_back({sign, std::move(face)});
    }
  }
  return out;
}

std::vector<std::pair<int, SimplicialCone>> polarized_vertex_decomposition(
    const Polyhedron& p, const QVec& primary_direction) {
  if (p.is_empty()) return {};
  if (!p.is_bounded())
    throw std::invalid_argument("polarized_vertex_decomposition: input must be bounded");
  size_t d = p.space_dim();
  // Lexicographic direction (primary, tiebreaks); tiebreaks from a
  // deterministic generic sequence.
  auto lex_sign = [&](const QVec& r, const QVec& tiebreak) {
    Rat v1 = qvec_dot(primary_direction, r);
    if (v1 != 0) return v1 > 0 ? 1 : -1;
    Rat v2 = qvec_dot(tiebreak, r);
    if (v2 != 0) return v2 > 0 ? 1 : -1;
    return 0;
  };
  std::vector<std::pair<int, SimplicialCone>> half_open;
  for (long t : {2, 3, 5, 7, 11, 13, 17}) {
    half_open.clear();
    QVec tiebreak(d);
    Rat w = 1;
    for (size_t i = 0; i < d; ++i) {
      tiebreak[i] = w;
      w /= t;
    }
    bool generic = true;
    for (const auto& v : p.vertices()) {
      Polyhedron tc = p.tangent_cone_at(v);
      for (auto cell : half_open_triangulation(tc)) {
        int sign = 1;
        for (size_t i = 0; i < cell.rays.size(); ++i) {
          int s = lex_sign(cell.rays[i], tiebreak);
          if (s == 0) { generic = false; break; }
          if (s < 0) {
            cell.rays[i] = qvec_scale(Rat(-1), cell.rays[i]);
            cell.open_facet[i] = !cell.open_facet[i];
            sign = -sign;
          }
        }
        if (!generic) break;
        half_open.push_back({sign, std::move(cell)});
      }
      if (!generic) break;
    }
    if (generic) break;
    half_open.clear();
  }
  if (half_open.empty() && !p.vertices().empty())
    throw std::logic_error("polarized_vertex_decomposition: no generic tiebreak found");
  // Close the half-open cones by inclusion-exclusion.
  std::vector<std::pair<int, SimplicialCone>> out;
  for (const auto& [sgn, cell] : half_open) {
    std::vector<size_t> open_idx;
    for (size_t i = 0; i < cell.open_facet.size(); ++i)
      if (cell.open_facet[i]) open_idx.push_back(i);
    size_t k = open_idx.size();
    for (size_t mask = 0; mask < (size_t(1) << k); ++mask) {
      SimplicialCone face;
      face.apex = cell.apex;
      face.lineality = cell.lineality;
      int sign = sgn;
      std::set<size_t> dropped;
      for (size_t b = 0; b < k; ++b)
        if (mask & (size_t(1) << b)) {
          dropped.insert(open_idx[b]);
          sign = -sign;
        }
      for (size_t i = 0; i < cell.rays.size(); ++i)
        if (!dropped.count(i)) face.rays.push_back(cell.rays[i]);
      face.open_facet.assign(face.rays.size(), false);
      out.push_back({sign, std::move(face)});
    }
  }
  return out;
}

// --- metric / lattice ------------------------------------------------------

QVec nearest_point(const Polyhedron& p, const QVec& target) {
  if (p.is_empty()) throw std::invalid_argument("nearest_point: empty polyhedron");
  size_t d = p.space_dim(), m = p.ineqs().size();
  std::optional<QVec> best;
  Rat best_dist;
  auto consider = [&](const QVec& v) {
    if (!p.contains(v)) return;
    QVec diff = qvec_sub(v, target);
    Rat dist = qvec_dot(diff, diff);
    if (!best || dist < best_dist) {
      best = v;
      best_dist = dist;
    }
  };
  // Project target onto the affine span of each equality subset of size <= d.
  std::vector<size_t> comb;
  std::function<void(size_t)> rec = [&](size_t start) {
    QMat eqs;
    QVec rhs;
    for (size_t i : comb) {
      eqs.push_back(p.ineqs()[i].a);
      rhs.push_back(p.ineqs()[i].c);
    }
    if (eqs.empty()) {
      consider(target);
    } else {
      auto sol = solve_linear(eqs, rhs);
      if (sol) {
        // Minimize |p0 + B y - target|^2 over the solution space.
        auto basis = nullspace(eqs);
        QVec p0 = *sol;
        if (basis.empty()) {
          consider(p0);
        } else {
          size_t r = basis.size();
          QMat gram(r, QVec(r));
          QVec rhs2(r);
          QVec diff = qvec_sub(target, p0);
          for (size_t i = 0; i < r; ++i) {
            for (size_t j = 0; j < r; ++j) gram[i][j] = qvec_dot(basis[i], basis[j]);
            rhs2[i] = qvec_dot(basis[i], diff);
          }
          auto y = solve_linear(gram, rhs2);
          if (y) {
            QVec v = p0;
            for (size_t i = 0; i < r; ++i) v = qvec_add(v, qvec_scale((*y)[i], basis[i]));
            consider(v);
          }
        }
      }
    }
    if (comb.size() == std::min(d, m)) return;
    for (size_t i = comb.empty() ? 0 : comb.back() + 1; i < m; ++i) {
      comb.push_back(i);
      rec(i + 1);
      comb.pop_back();
    }
  };
  rec(0);
  if (!best) throw std::logic_error("nearest_point: no feasible projection found");
  return *best;
}

std::vector<IVec> enumerate_lattice_points(const Polyhedron& p) {
  if (p.is_empty()) return {};
  if (!p.is_bounded()) throw std::invalid_argument("enumerate_lattice_points: unbounded polyhedron");
  size_t d = p.space_dim();
  auto verts = p.vertices();
  if (verts.empty()) return {};  // bounded + nonempty implies vertices unless dim 0
  std::vector<Int> lo(d), hi(d);
  for (size_t i = 0; i < d; ++i) {
    Rat mn = verts[0][i], mx = verts[0][i];
    for (const auto& v : verts) {
      mn = std::min(mn, v[i]);
      mx = std::max(mx, v[i]);
    }
    lo[i] = rat_ceil(mn);
    hi[i] = rat_floor(mx);
  }
  std::vector<IVec> out;
  IVec cur(d);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == d) {
      QVec q(d);
      for (size_t j = 0; j < d; ++j) q[j] = Rat(cur[j]);
      if (p.contains(q)) out.push_back(cur);
      return;
    }
    for (Int x = lo[i]; x <= hi[i]; ++x) {
      cur[i] = x;
      rec(i + 1);
    }
  };
  if (d == 0) {
    out.push_back({});
    return out;
  }
  rec(0);
  return out;
}

IMat face_direction_lattice(const Polyhedron& f) {
  auto hull = f.affine_hull();
  return saturate_lattice(hull.basis, f.space_dim());
}

std::vector<std::vector<QVec>> triangulate_polytope(const Polyhedron& p) {
  if (p.is_empty()) return {};
  if (!p.is_bounded()) throw std::invalid_argument("triangulate_polytope: unbounded polyhedron");
  size_t r = p.affine_dim();
  auto verts = p.vertices();
  if (r == 0) return {{verts.at(0)}};
  QVec v0 = verts.at(0);  // lexicographically minimal (vertices sorted)
  std::vector<std::vector<QVec>> out;
  for (const auto& facet : p.faces_of_dim(r - 1)) {
    if (facet.contains(v0)) continue;
    for (auto simplex : triangulate_polytope(facet)) {
      simplex.push_back(v0);
      out.push_back(simplex);
    }
  }
  return out;
}

namespace {

Rat factorial(int n) {
  Int f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return Rat(f);
}

// det of square rational matrix
Rat determinant(QMat m) {
  size_t n = m.size();
  Rat det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (size_t i = c + 1; i < n; ++i) {
      if (m[i][c] == 0) continue;
      Rat f = m[i][c] / m[c][c];
      for (size_t j = c; j < n; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

}  // namespace

Cyclotomic integrate_poly_over_polytope(const MultiPoly& p, const Polyhedron& f) {
  if (f.is_empty()) return Cyclotomic();
  if (!f.is_bounded()) throw std::invalid_argument("integrate_poly_over_polytope: unbounded face");
  size_t d = f.space_dim();
  if (p.nvars() != d) throw std::invalid_argument("integrate_poly_over_polytope: arity mismatch");
  size_t r = f.affine_dim();
  if (r == 0) {
    // Counting measure on points.
    return p.evaluate(f.vertices().at(0));
  }
  IMat lattice = face_direction_lattice(f);
  if (lattice.size() != r)
    throw std::invalid_argument("integrate_poly_over_polytope: irrational face direction lattice");
  auto verts = f.vertices();
  QVec p0 = verts.at(0);
  // Coordinates: v = p0 + sum_j y_j b_j  with b_j the lattice basis.
  QMat bmat(d, QVec(r));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < r; ++j) bmat[i][j] = Rat(lattice[j][i]);
  auto coords = [&](const QVec& v) {
    auto y = solve_linear(bmat, qvec_sub(v, p0));
    if (!y) throw std::logic_error("integrate_poly_over_polytope: point outside affine hull");
    return *y;
  };
  // Substitute into the polynomial: poly in y (r vars).
  std::vector<MultiPoly> subs;
  for (size_t i = 0; i < d; ++i) {
    MultiPoly s = MultiPoly::constant(r, p0[i]);
    for (size_t j = 0; j < r; ++j)
      s += MultiPoly::variable(r, j).scaled(Rat(lattice[j][i]));
    subs.push_back(s);
  }
  MultiPoly q = p.compose(subs);
  Cyclotomic total;
  for (const auto& simplex : triangulate_polytope(f)) {
    // y-coordinates of the simplex vertices.
    std::vector<QVec> ys;
    for (const auto& v : simplex) ys.push_back(coords(v));
    // Affine map from the standard simplex: y = w0 + sum u_i (w_i - w0).
    QMat jac(r, QVec(r));
    for (size_t i = 0; i < r; ++i)
      for (size_t j = 0; j < r; ++j) jac[j][i] = ys[i + 1][j] - ys[0][j];
    Rat jdet = abs(determinant(jac));
    if (jdet == 0) continue;
    std::vector<MultiPoly> usubs;
    for (size_t j = 0; j < r; ++j) {
      MultiPoly s = MultiPoly::constant(r, ys[0][j]);
      for (size_t i = 0; i < r; ++i)
        s += MultiPoly::variable(r, i).scaled(ys[i + 1][j] - ys[0][j]);
      usubs.push_back(s);
    }
    MultiPoly qu = q.compose(usubs);
    Cyclotomic piece;
    for (const auto& [e, c] : qu.terms()) {
      int total_deg = 0;
      Rat mono = 1;
      for (size_t i = 0; i < r; ++i) {
        mono *= factorial(e[i]);
        total_deg += e[i];
      }
      mono /= factorial(total_deg + static_cast<int>(r));
      piece += c.scaled(mono);
    }
    total += piece.scaled(jdet);
  }
  return total;
}

std::vector<IVec> parallelepiped_representatives(const std::vector<QVec>& rays, size_t dim) {
  size_t r = rays.size();
  IMat irays;
  for (const auto& ray : rays) irays.push_back(primitive_vector(ray));
  // delta = sum t_i alpha_i with t_i in [0,1): solve for coordinates of each
  // candidate lattice point in the box hull of the parallelepiped.
  QMat amat(dim, QVec(r));
  for (size_t i = 0; i < dim; ++i)
    for (size_t j = 0; j < r; ++j) amat[i][j] = Rat(irays[j][i]);
  // Bounding box of the closed parallelepiped corners.
  QVec lo = qvec_zero(dim), hi = qvec_zero(dim);
  for (size_t mask = 0; mask < (size_t(1) << r); ++mask) {
    QVec corner = qvec_zero(dim);
    for (size_t j = 0; j < r; ++j)
      if (mask & (size_t(1) << j)) corner = qvec_add(corner, to_qvec(irays[j]));
    for (size_t i = 0; i < dim; ++i) {
      lo[i] = std::min(lo[i], corner[i]);
      hi[i] = std::max(hi[i], corner[i]);
    }
  }
  std::vector<IVec> out;
  IVec cur(dim);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == dim) {
      QVec v(dim);
      for (size_t j = 0; j < dim; ++j) v[j] = Rat(cur[j]);
      auto t = solve_linear(amat, v);
      if (!t) return;
      // Verify the solution (columns may not span Q^dim).
      QVec check = qvec_zero(dim);
      for (size_t j = 0; j < r; ++j) check = qvec_add(check, qvec_scale((*t)[j], to_qvec(irays[j])));
      if (check != v) return;
      for (size_t j = 0; j < r; ++j)
        if (!((*t)[j] >= 0 && (*t)[j] < 1)) return;
      out.push_back(cur);
      return;
    }
    for (Int x = rat_ceil(lo[i]); x <= rat_floor(hi[i]); ++x) {
      cur[i] = x;
      rec(i + 1);
    }
  };
  if (dim == 0) return {{}};
  rec(0);
  return out;
}

std::vector<QVec> probe_grid(const std::vector<Polyhedron>& polys, size_t n_random) {
  std::set<std::string> seen;
  std::vector<QVec> pts;
  size_t d = polys.empty() ? 0 : polys[0].space_dim();
  auto push = [&](const QVec& v) {
    std::string key = qvec_to_string(v);
    if (seen.insert(key).second) pts.push_back(v);
  };
  std::vector<QVec> anchors;
  for (const auto& p : polys) {
    if (p.is_empty()) continue;
    for (const auto& f : p.faces()) {
      anchors.push_back(f.find_point(true));
      for (const auto& v : f.vertices()) anchors.push_back(v);
      QVec rp = f.find_point(true);
      for (const auto& r : f.extreme_rays()) {
        anchors.push_back(qvec_add(rp, r));
        anchors.push_back(qvec_add(rp, qvec_scale(Rat(3), r)));
      }
    }
  }
  for (const auto& a : anchors) {
    push(a);
    for (size_t i = 0; i < d; ++i) {
      QVec v = a;
      v[i] += Rat(1, 7);
      push(v);
      v[i] -= Rat(2, 7);
      push(v);
    }
  }
  // Random rational points in an inflated bounding box.
  Rat lo = -2, hi = 2;
  for (const auto& a : anchors)
    for (const Rat& x : a) {
      lo = std::min(lo, Rat(x - 2));
      hi = std::max(hi, Rat(x + 2));
    }
  std::mt19937 rng(12345);
  for (size_t t = 0; t < n_random; ++t) {
    QVec v(d);
    for (size_t i = 0; i < d; ++i) {
      long den = 1 + static_cast<long>(rng() % 8);
      long span = static_cast<long>(rat_to_long(Rat(rat_floor(hi - lo)))) + 1;
      long num = static_cast<long>(rng() % static_cast<unsigned long>(std::max(1L, span * den)));
      v[i] = lo + Rat(num, den);
    }
    push(v);
  }
  return pts;
}

}  // namespace asq
