#include <asq/piecewise.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace asq {

namespace {

// Orthogonal projection of x onto the span of the given vectors.
QVec project_onto_span(const QVec& x, const std::vector<QVec>& span) {
  if (span.empty()) return qvec_zero(x.size());
  size_t r = span.size();
  QMat gram(r, QVec(r));
  QVec rhs(r);
  for (size_t i = 0; i < r; ++i) {
    for (size_t j = 0; j < r; ++j) gram[i][j] = qvec_dot(span[i], span[j]);
    rhs[i] = qvec_dot(span[i], x);
  }
  auto t = solve_linear(gram, rhs);
  if (!t) throw std::logic_error("project_onto_span: singular Gram matrix");
  QVec proj = qvec_zero(x.size());
  for (size_t i = 0; i < r; ++i) proj = qvec_add(proj, qvec_scale((*t)[i], span[i]));
  return proj;
}

Rat one_norm(const QVec& v) {
  Rat s = 0;
  for (const Rat& x : v) s += abs(x);
  return s;
}

Rat inf_norm(const QVec& v) {
  Rat s = 0;
  for (const Rat& x : v) s = std::max(s, Rat(abs(x)));
  return s;
}

}  // namespace

bool ShiftedCone::contains(const Int& k, const QVec& lambda) const {
  if (k <= 0) return false;
  QVec v = qvec_scale(Rat(1) / Rat(k), qvec_sub(lambda, shift));
  return base.contains(v);
}

PiecewiseQP PiecewiseQP::indicator(const Polyhedron& p, const QVec& shift) {
  PiecewiseQP m(p.space_dim());
  m.add_piece(QuasiPolynomial::constant(p.space_dim(), Cyclotomic(Rat(1))), p, shift);
  return m;
}

PiecewiseQP PiecewiseQP::indicator(const Polyhedron& p) {
  return indicator(p, qvec_zero(p.space_dim()));
}

void PiecewiseQP::add_piece(const QuasiPolynomial& q, const Polyhedron& p, const QVec& shift) {
  if (p.space_dim() != dim_ || q.dim() != dim_ || shift.size() != dim_)
    throw std::invalid_argument("PiecewiseQP::add_piece: dimension mismatch");
  if (q.is_zero() || p.is_empty()) return;
  pieces_.push_back({q, {p, shift}});
}

PiecewiseQP PiecewiseQP::operator-() const { return scaled(Cyclotomic(Rat(-1))); }

PiecewiseQP operator+(const PiecewiseQP& a, const PiecewiseQP& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("PiecewiseQP: dimension mismatch");
  PiecewiseQP r = a;
  for (const auto& pc : b.pieces_) r.pieces_.push_back(pc);
  return r;
}

PiecewiseQP operator-(const PiecewiseQP& a, const PiecewiseQP& b) { return a + (-b); }

PiecewiseQP PiecewiseQP::scaled(const Cyclotomic& c) const {
  PiecewiseQP r(dim_);
  if (c.is_zero()) return r;
  for (const auto& pc : pieces_) r.pieces_.push_back({pc.q.scaled(c), pc.cone});
  return r;
}

std::string PiecewiseQP::to_string() const {
  if (pieces_.empty()) return "0";
  std::string s;
  for (const auto& pc : pieces_) {
    if (!s.empty()) s += " + ";
    s += "(" + pc.q.to_string() + ")*[C(" + pc.cone.base.to_string() + "; " +
         qvec_to_string(pc.cone.shift) + ")]";
  }
  return s;
}

Cyclotomic pqp_evaluate(const PiecewiseQP& m, const Int& k, const QVec& lambda) {
  if (k <= 0) throw std::invalid_argument("pqp_evaluate: k must be positive");
  Cyclotomic sum;
  for (const auto& pc : m.pieces())
    if (pc.cone.contains(k, lambda)) sum += pc.q.evaluate(k, lambda);
  return sum;
}

Cyclotomic pqp_evaluate(const PiecewiseQP& m, const Int& k, const IVec& lambda) {
  QVec l;
  l.reserve(lambda.size());
  for (const Int& x : lambda) l.push_back(Rat(x));
  return pqp_evaluate(m, k, l);
}

PiecewiseQP pqp_scale(const PiecewiseQP& m, const QuasiPolynomial& h) {
  PiecewiseQP r(m.dim());
  for (const auto& pc : m.pieces()) r.add_piece(h * pc.q, pc.cone.base, pc.cone.shift);
  return r;
}

PiecewiseQP pqp_twist(const PiecewiseQP& m, const Character& g) {
  PiecewiseQP r(m.dim());
  for (const auto& pc : m.pieces()) r.add_piece(pc.q.twisted(g), pc.cone.base, pc.cone.shift);
  return r;
}

PiecewiseQP pqp_translate(const PiecewiseQP& m, const IVec& sigma) {
  if (sigma.size() != m.dim()) throw std::invalid_argument("pqp_translate: dimension mismatch");
  PiecewiseQP r(m.dim());
  QVec sq;
  for (const Int& x : sigma) sq.push_back(Rat(x));
  for (const auto& pc : m.pieces())
    r.add_piece(qp_translate(pc.q, sigma), pc.cone.base, qvec_add(pc.cone.shift, sq));
  return r;
}

PiecewiseQP pqp_shear(const PiecewiseQP& m, const QVec& sigma) {
  size_t d = m.dim();
  if (sigma.size() != d) throw std::invalid_argument("pqp_shear: dimension mismatch");
  // lambda_i -> lambda_i - k sigma_i inside polynomials.
  std::vector<MultiPoly> subs;
  MultiPoly k = MultiPoly::variable(d + 1, 0);
  subs.push_back(k);
  for (size_t i = 0; i < d; ++i)
    subs.push_back(MultiPoly::variable(d + 1, i + 1) - k.scaled(sigma[i]));
  PiecewiseQP r(d);
  for (const auto& pc : m.pieces()) {
    QuasiPolynomial q(d);
    for (const auto& [key, p] : pc.q.terms()) {
      // g^{lambda - k sigma} = e^{-2 pi i <g, sigma> k} g^lambda
      Rat du = -qvec_dot(key.second.value, sigma);
      q.add_term(key.first + du, key.second, p.compose(subs));
    }
    r.add_piece(q, pc.cone.base.translated(sigma), pc.cone.shift);
  }
  return r;
}

PiecewiseQP pqp_difference(const PiecewiseQP& m, const IVec& eta, const Rat& zeta_turn) {
  return m - pqp_translate(m, eta).scaled(Cyclotomic::from_turn(zeta_turn));
}

bool pqp_structurally_zero(const PiecewiseQP& m) {
  std::map<std::string, QuasiPolynomial> groups;
  for (const auto& pc : m.pieces()) {
    if (pc.cone.base.is_empty() || pc.q.is_zero()) continue;
    auto lin = pc.cone.base.lineality_space();
    QVec reduced = qvec_sub(pc.cone.shift, project_onto_span(pc.cone.shift, lin));
    std::string key = pc.cone.base.canonical_key() + "|" + qvec_to_string(reduced);
    auto it = groups.find(key);
    if (it == groups.end())
      groups.emplace(key, pc.q);
    else
      it->second += pc.q;
  }
  for (const auto& [key, q] : groups)
    if (!q.is_zero()) return false;
  return true;
}

bool pqp_equal_on_window(const PiecewiseQP& a, const PiecewiseQP& b, const Int& kmax,
                         const Int& radius) {
  if (a.dim() != b.dim()) throw std::invalid_argument("pqp_equal_on_window: dimension");
  size_t d = a.dim();
  long r = rat_to_long(Rat(radius));
  std::vector<long> lambda(d, -r);
  for (Int k = 1; k <= kmax; ++k) {
    std::fill(lambda.begin(), lambda.end(), -r);
    while (true) {
      QVec l;
      for (long x : lambda) l.push_back(Rat(x));
      if (!(pqp_evaluate(a, k, l) == pqp_evaluate(b, k, l))) return false;
      size_t i = 0;
      for (; i < d; ++i) {
        if (lambda[i] < r) {
          ++lambda[i];
          break;
        }
        lambda[i] = -r;
      }
      if (i == d) break;
      if (d == 0) break;
    }
    if (d == 0) {
      // no lattice directions: nothing more to check per k
    }
  }
  return true;
}

bool pqp_is_zero(const PiecewiseQP& m) {
  if (m.no_pieces()) return true;
  if (pqp_structurally_zero(m)) return true;
  // Windowed brute force sized from the data.
  Int period = 1;
  Rat shift_mag = 0, vert_mag = 1;
  for (const auto& pc : m.pieces()) {
    period = int_lcm(period, pc.q.twist_denominator_lcm());
    for (const Rat& x : pc.cone.shift) period = int_lcm(period, rat_den(x));
    shift_mag = std::max(shift_mag, inf_norm(pc.cone.shift));
    if (!pc.cone.base.is_empty()) {
      for (const auto& v : pc.cone.base.vertices()) vert_mag = std::max(vert_mag, inf_norm(v));
      vert_mag = std::max(vert_mag, inf_norm(pc.cone.base.find_point()));
    }
  }
  Int kmax = std::max(Int(8), Int(2 * period));
  if (kmax > 24) kmax = 24;
  Rat rad = Rat(kmax) * (vert_mag + 1) + shift_mag;
  Int radius = rat_ceil(rad);
  Int cap = m.dim() >= 2 ? 16 : 48;
  if (radius > cap) radius = cap;
  return pqp_zero_on_window(m, kmax, radius);
}

std::optional<KernelWitness> pqp_kernel_witness(const PiecewiseQP& m,
                                                const std::vector<KernelCandidate>& candidates,
                                                const Int& n_max) {
  for (const auto& cand : candidates) {
    if (rat_frac(cand.zeta_turn) == 0) continue;  // zeta must differ from 1
    bool eta_zero = true;
    for (const Int& x : cand.eta)
      if (x != 0) eta_zero = false;
    if (eta_zero) continue;
    PiecewiseQP cur = m;
    for (Int n = 1; n <= n_max; ++n) {
      cur = pqp_difference(cur, cand.eta, cand.zeta_turn);
      if (pqp_is_zero(cur)) return KernelWitness{cand.eta, cand.zeta_turn, n};
    }
  }
  return std::nullopt;
}

PiecewiseQP tangent_cone_map(const PiecewiseQP& m, const QVec& v) {
  PiecewiseQP r(m.dim());
  for (const auto& pc : m.pieces()) {
    Polyhedron t = pc.cone.base.tangent_cone_at(v);
    if (t.is_empty()) continue;
    r.add_piece(pc.q, t, pc.cone.shift);
  }
  return r;
}

TangentWindow tangent_cone_window(const PiecewiseQP& m, const QVec& v) {
  // rho: within |x - v|_inf < rho, every non-active inequality of every base
  // keeps its strict sign, so membership in P and in T_v P coincide.
  Rat rho = 1;
  bool have = false;
  Rat shift_mag = 0;
  for (const auto& pc : m.pieces()) {
    shift_mag = std::max(shift_mag, inf_norm(pc.cone.shift));
    for (const auto& iq : pc.cone.base.ineqs()) {
      Rat val = qvec_dot(iq.a, v) - iq.c;
      if (val == 0) continue;
      Rat n1 = one_norm(iq.a);
      if (n1 == 0) continue;
      Rat margin = abs(val) / n1;
      rho = have ? std::min(rho, margin) : margin;
      have = true;
    }
  }
  TangentWindow w;
  w.radius = rho / 2;
  // |(lambda - sigma)/k - lambda/k| < rho/2 once k > 2 |sigma| / rho.
  w.threshold = shift_mag == 0 ? Int(0) : rat_ceil(Rat(2) * shift_mag / rho);
  if (w.threshold < 1) w.threshold = 1;
  return w;
}

PiecewiseQP shift_reduction(const Polyhedron& p, const QVec& sigma) {
  size_t d = p.space_dim();
  if (sigma.size() != d) throw std::invalid_argument("shift_reduction: dimension mismatch");
  if (p.is_empty()) throw std::invalid_argument("shift_reduction: empty polyhedron");
  // sigma must lie in lin(P).
  {
    auto hull = p.affine_hull();
    QMat mtx = hull.basis;
    size_t r0 = mat_rank(mtx);
    mtx.push_back(sigma);
    if (!qvec_is_zero(sigma) && mat_rank(mtx) != r0)
      throw std::invalid_argument("shift_reduction: shift outside lin(P)");
  }
  PiecewiseQP out(d);
  if (qvec_is_zero(sigma)) return out;

  // Split the description into implicit equalities and irredundant facets.
  auto implicit = p.implicit_equalities();
  std::set<size_t> eqset(implicit.begin(), implicit.end());
  std::vector<Inequality> eqs, facets;
  std::set<std::string> seen;
  for (size_t i = 0; i < p.ineqs().size(); ++i) {
    Inequality iq = p.ineqs()[i];
    // normalize by the first nonzero entry's absolute value
    Rat scale = 0;
    for (const Rat& x : iq.a)
      if (x != 0) { scale = abs(x); break; }
    if (scale == 0) continue;
    Inequality norm{qvec_scale(Rat(1) / scale, iq.a), iq.c / scale};
    std::string key = qvec_to_string(norm.a) + ";" + rat_to_string(norm.c);
    if (eqset.count(i)) {
      if (seen.insert("eq:" + key).second) eqs.push_back(norm);
      continue;
    }
    if (!seen.insert("in:" + key).second) continue;
    // Redundancy test: does dropping this inequality change the set?
    Polyhedron rest(d);
    for (size_t j = 0; j < p.ineqs().size(); ++j)
      if (j != i) rest.add_ineq(p.ineqs()[j].a, p.ineqs()[j].c);
    Polyhedron flipped = rest;
    flipped.add_ineq(qvec_scale(Rat(-1), iq.a), -iq.c);
    bool redundant = flipped.is_empty();
    if (!redundant) {
      // points with <a,v> <= c exist; redundant iff they all satisfy equality
      auto impl = flipped.implicit_equalities();
      for (size_t t : impl)
        if (flipped.ineqs()[t].a == qvec_scale(Rat(-1), iq.a) && flipped.ineqs()[t].c == -iq.c)
          redundant = true;
    }
    if (!redundant) facets.push_back(norm);
  }

  // Simplicity: facet normals independent modulo the equality rows.
  {
    QMat mtx;
    for (const auto& e : eqs) mtx.push_back(e.a);
    size_t base_rank = mtx.empty() ? 0 : mat_rank(mtx);
    for (const auto& f : facets) mtx.push_back(f.a);
    if (mat_rank(mtx) != base_rank + facets.size())
      throw std::invalid_argument("shift_reduction: polyhedron is not simple");
  }

  for (size_t i = 0; i < facets.size(); ++i) {
    // Scale the facet normal to a primitive integer covector.
    IVec prim = primitive_vector(facets[i].a);
    QVec mu = to_qvec(prim);
    Rat scale = 0;
    for (size_t t = 0; t < d; ++t)
      if (mu[t] != 0) { scale = mu[t] / facets[i].a[t]; break; }
    Rat c = facets[i].c * scale;
    if (scale < 0) {
      // keep the inequality direction <mu, v> >= c
      // (primitive_vector preserves direction, so this should not happen)
      mu = qvec_scale(Rat(-1), mu);
      c = -c;
    }
    Rat w = qvec_dot(mu, sigma);
    if (w == 0) continue;
    int sign = w > 0 ? 1 : -1;
    // s-grid: possible values of <mu,lambda> - k c lie in (1/q)Z, q = den(c).
    Rat step = Rat(1, 1) / Rat(rat_den(c));
    QVec sbar = qvec_scale(Rat(1) / w, sigma);
    // enumerate s in [0, w) (w > 0) or [w, 0) (w < 0)
    Rat lo = w > 0 ? Rat(0) : w;
    Rat hi = w > 0 ? w : Rat(0);
    for (Rat s = lo; s < hi; s += step) {
      // sigma' solving: <a_r, s'> = 0; <mu_j, s'> = 0 (j < i), s (j = i),
      // <mu_j, sigma> (j > i).
      QMat rows;
      QVec rhs;
      for (const auto& e : eqs) {
        rows.push_back(e.a);
        rhs.push_back(Rat(0));
      }
      for (size_t j = 0; j < facets.size(); ++j) {
        rows.push_back(facets[j].a);
        if (j < i)
          rhs.push_back(Rat(0));
        else if (j == i)
          rhs.push_back(s / scale);  // in the facet's own normalization
        else
          rhs.push_back(qvec_dot(facets[j].a, sigma));
      }
      auto sp = solve_linear(rows, rhs);
      if (!sp) throw std::logic_error("shift_reduction: shift system inconsistent");
      // P' : equalities, facets j < i, equality on facet i, facets j > i.
      Polyhedron pp(d);
      for (const auto& e : eqs) pp.add_eq(e.a, e.c);
      for (size_t j = 0; j < facets.size(); ++j) {
        if (j == i)
          pp.add_eq(mu, c);
        else
          pp.add_ineq(facets[j].a, facets[j].c);
      }
      out.add_piece(QuasiPolynomial::constant(d, Cyclotomic(Rat(sign))), pp, *sp);
    }
    (void)sbar;
  }
  return out;
}

PiecewiseQP pqp_polarize(const PiecewiseQP& m, const QVec& primary_direction) {
  PiecewiseQP r(m.dim());
  for (const auto& pc : m.pieces()) {
    const Polyhedron& base = pc.cone.base;
    if (base.is_empty()) continue;
    // Already a cone (equal to its tangent cone at the apex): keep it.
    Polyhedron apex_cone = base.tangent_cone_at(base.apex_point());
    if (base.set_equals(apex_cone)) {
      r.add_piece(pc.q, base, pc.cone.shift);
      continue;
    }
    if (!base.is_bounded())
      throw std::invalid_argument("pqp_polarize: unbounded non-conical base");
    for (const auto& [sign, sc] : polarized_vertex_decomposition(base, primary_direction))
      r.add_piece(pc.q.scaled(Cyclotomic(Rat(sign))), sc.closed_polyhedron(), pc.cone.shift);
  }
  return r;
}

PiecewiseQP pqp_polarize(const PiecewiseQP& m) {
  return pqp_polarize(m, qvec_zero(m.dim()));
}

}  // namespace asq
