#include <asq/pushforward.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace asq {

namespace {

// kP + sigma in lambda-space.
Polyhedron scaled_shifted_base(const Polyhedron& p, const Int& k, const QVec& sigma) {
  Polyhedron r(p.space_dim());
  for (const Inequality& in : p.ineqs()) r.add_ineq(in.a, Rat(k) * in.c + qvec_dot(in.a, sigma));
  return r;
}

// Fiber sum without the properness precondition check (callers check once).
Cyclotomic fiber_sum(const PiecewiseQP& m, const QuotientMap& pi, const Int& k,
                     const QVec& lambda_prime) {
  Cyclotomic total;
  for (const QPPiece& piece : m.pieces()) {
    Polyhedron f = scaled_shifted_base(piece.cone.base, k, piece.cone.shift);
    for (size_t i = 0; i < pi.reduced.size(); ++i) f.add_eq(pi.reduced[i], lambda_prime[i]);
    if (f.is_empty()) continue;
    for (const IVec& lam : enumerate_lattice_points(f)) total += piece.q.evaluate(k, lam);
  }
  return total.reduced();
}

void require_proper(const PiecewiseQP& m, const QuotientMap& pi, const char* where) {
  PropernessCertificate cert = properness_check(m, pi);
  if (cert.proper) return;
  std::ostringstream os;
  os << where << ": map is not proper on the support";
  if (cert.violating_ray) os << " (recession direction " << qvec_to_string(*cert.violating_ray)
                             << " in the kernel, piece " << *cert.piece_index << ")";
  throw std::invalid_argument(os.str());
}

// Visit every integer vector in the box [lo, hi] (componentwise).
void for_each_lattice_in_box(const IVec& lo, const IVec& hi,
                             const std::function<void(const IVec&)>& fn) {
  size_t d = lo.size();
  for (size_t i = 0; i < d; ++i)
    if (lo[i] > hi[i]) return;
  IVec cur = lo;
  while (true) {
    fn(cur);
    size_t i = 0;
    while (i < d && cur[i] == hi[i]) {
      cur[i] = lo[i];
      ++i;
    }
    if (i == d) return;
    ++cur[i];
  }
}

QVec ivec_to_qvec(const IVec& v) {
  QVec r(v.size());
  for (size_t i = 0; i < v.size(); ++i) r[i] = Rat(v[i]);
  return r;
}

Int mod_nonneg(const Int& x, const Int& t) {
  Int r = x % t;
  if (r < 0) r += t;
  return r;
}

// Pointed polyhedron with the same projections of interest: slice off the
// lineality space through some point.
Polyhedron pointed_slice(const Polyhedron& p) {
  std::vector<QVec> lin = p.lineality_space();
  if (lin.empty()) return p;
  Polyhedron q = p;
  QVec p0 = p.find_point();
  for (const QVec& l : lin) q.add_eq(l, qvec_dot(l, p0));
  return q;
}

bool relint_contains(const Polyhedron& c, const std::vector<size_t>& implicit, const QVec& v) {
  const auto& ins = c.ineqs();
  for (size_t i = 0; i < ins.size(); ++i) {
    Rat s = qvec_dot(ins[i].a, v) - ins[i].c;
    bool eq = std::find(implicit.begin(), implicit.end(), i) != implicit.end();
    if (eq ? (s != 0) : (s <= 0)) return false;
  }
  return true;
}

std::vector<std::vector<int>> exponents_up_to(size_t nvars, int deg) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(nvars, 0);
  std::function<void(size_t, int)> rec = [&](size_t i, int left) {
    if (i == nvars) {
      out.push_back(cur);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      cur[i] = e;
      rec(i + 1, left - e);
    }
    cur[i] = 0;
  };
  rec(0, deg);
  return out;
}

struct Sample {
  QVec point;  // (k, lambda') as rationals
  Cyclotomic value;
};

// Exact interpolation of a polynomial with the given monomial support through
// the samples; nullopt if the (typically overdetermined) system is
// inconsistent, i.e. the model does not fit.
std::optional<MultiPoly> fit_polynomial(const std::vector<Sample>& samples,
                                        const std::vector<std::vector<int>>& exps, size_t nvars) {
  size_t n = exps.size();
  long level = 1;
  for (const Sample& s : samples) level = static_cast<long>(int_lcm(level, s.value.level()));
  size_t slots = static_cast<size_t>(euler_phi(level));

  QMat a;
  std::vector<std::vector<Rat>> b(slots);
  for (const Sample& s : samples) {
    QVec row(n);
    for (size_t j = 0; j < n; ++j) {
      Rat v = 1;
      for (size_t i = 0; i < nvars; ++i)
        for (int e = 0; e < exps[j][i]; ++e) v *= s.point[i];
      row[j] = v;
    }
    a.push_back(row);
    std::vector<Rat> cs = s.value.lifted_to(level).coeffs();
    cs.resize(slots, Rat(0));
    for (size_t t = 0; t < slots; ++t) b[t].push_back(cs[t]);
  }

  std::vector<QVec> coeff_slots;  // per slot, solution vector of length n
  for (size_t t = 0; t < slots; ++t) {
    auto sol = solve_linear(a, b[t]);
    if (!sol) return std::nullopt;
    coeff_slots.push_back(*sol);
  }

  MultiPoly result(nvars);
  for (size_t j = 0; j < n; ++j) {
    std::vector<Rat> raw(slots);
    for (size_t t = 0; t < slots; ++t) raw[t] = coeff_slots[t][j];
    Cyclotomic c = Cyclotomic::normalize(raw, level).reduced();
    if (!c.is_zero()) result.add_term(exps[j], c);
  }
  return result;
}

}  // namespace

QuotientMap QuotientMap::from_matrix(const QMat& matrix) {
  if (matrix.empty() || matrix[0].empty())
    throw std::invalid_argument("QuotientMap: empty matrix");
  size_t dp = matrix.size(), d = matrix[0].size();
  if (dp > d || mat_rank(matrix) != dp)
    throw std::invalid_argument("QuotientMap: matrix must have full row rank");

  // Lattice generated by the images of the standard basis vectors.
  Int den = 1;
  for (const QVec& row : matrix) den = int_lcm(den, lcm_of_denominators(row));
  IMat gens;
  for (size_t j = 0; j < d; ++j) {
    IVec g(dp);
    for (size_t i = 0; i < dp; ++i) g[i] = rat_num(matrix[i][j] * Rat(den));
    gens.push_back(g);
  }
  IMat h = lattice_basis_hnf(gens);
  if (h.size() != dp) throw std::invalid_argument("QuotientMap: image lattice rank deficient");

  QuotientMap out;
  out.matrix = matrix;
  out.image_basis.assign(dp, QVec(dp));
  for (size_t i = 0; i < dp; ++i)
    for (size_t j = 0; j < dp; ++j) out.image_basis[i][j] = Rat(h[i][j], den);
  auto binv = mat_inverse(mat_transpose(out.image_basis));
  if (!binv) throw std::invalid_argument("QuotientMap: singular image basis");
  out.reduced = mat_mul(*binv, matrix);
  return out;
}

QVec QuotientMap::apply(const QVec& v) const { return mat_vec(reduced, v); }

PropernessCertificate properness_check(const PiecewiseQP& m, const QuotientMap& pi) {
  if (pi.domain_dim() != m.dim())
    throw std::invalid_argument("properness_check: dimension mismatch");
  PropernessCertificate cert;
  for (size_t idx = 0; idx < m.pieces().size(); ++idx) {
    const Polyhedron& p = m.pieces()[idx].cone.base;
    if (p.is_empty()) continue;
    Polyhedron rc = p.recession_cone();
    for (const QVec& row : pi.reduced) rc.add_eq(row, Rat(0));
    if (rc.is_bounded()) continue;  // {0} only
    cert.proper = false;
    cert.piece_index = idx;
    std::vector<QVec> rays = rc.extreme_rays();
    if (!rays.empty())
      cert.violating_ray = rays[0];
    else {
      std::vector<QVec> lin = rc.lineality_space();
      if (!lin.empty()) cert.violating_ray = to_qvec(primitive_vector(lin[0]));
    }
    return cert;
  }
  cert.proper = true;
  return cert;
}

Cyclotomic push_eval(const PiecewiseQP& m, const QuotientMap& pi, const Int& k,
                     const QVec& lambda_prime) {
  if (k <= 0) throw std::invalid_argument("push_eval: k must be positive");
  if (lambda_prime.size() != pi.image_dim())
    throw std::invalid_argument("push_eval: dimension mismatch");
  require_proper(m, pi, "push_eval");
  return fiber_sum(m, pi, k, lambda_prime);
}

ThetaSample push_theta(const PiecewiseQP& m, const QuotientMap& pi, const Int& k,
                       const WindowBox& window) {
  if (k <= 0) throw std::invalid_argument("push_theta: k must be positive");
  size_t dp = pi.image_dim();
  if (window.dim() != dp) throw std::invalid_argument("push_theta: window dimension mismatch");
  require_proper(m, pi, "push_theta");

  IVec lo(dp), hi(dp);
  for (size_t i = 0; i < dp; ++i) {
    lo[i] = rat_ceil(Rat(k) * window.lo[i]);
    hi[i] = rat_floor(Rat(k) * window.hi[i]);
  }
  std::map<QVec, Cyclotomic> acc;
  for_each_lattice_in_box(lo, hi, [&](const IVec& lam) {
    QVec lamq = ivec_to_qvec(lam);
    QVec v(dp);
    for (size_t i = 0; i < dp; ++i) v[i] = lamq[i] / Rat(k);
    if (!window.contains(v)) return;
    Cyclotomic w = fiber_sum(m, pi, k, lamq);
    if (!w.is_zero()) acc[v] = w;
  });

  ThetaSample out;
  out.k = k;
  out.window = window;
  for (const auto& [point, weight] : acc) out.atoms.push_back({point, weight});
  return out;
}

Cyclotomic push_series_pair(const AsymptoticSeries& a, const QuotientMap& pi, const Int& k,
                            const MultiPoly& phi_prime) {
  size_t d = pi.domain_dim(), dp = pi.image_dim();
  if (a.dim != d || phi_prime.nvars() != dp)
    throw std::invalid_argument("push_series_pair: dimension mismatch");
  for (const RDistribution& th : a.theta)
    for (const RTerm& t : th.terms)
      if (!t.face.is_bounded())
        throw std::invalid_argument("push_series_pair: series has an unbounded support face");

  std::vector<MultiPoly> subs(dp, MultiPoly(d));
  for (size_t i = 0; i < dp; ++i)
    for (size_t j = 0; j < d; ++j)
      subs[i] += MultiPoly::variable(d, j).scaled(pi.reduced[i][j]);
  return series_pair_poly(a, k, phi_prime.compose(subs));
}

std::vector<Polyhedron> chambers_1d(const PiecewiseQP& m, const QuotientMap& pi) {
  if (pi.image_dim() != 1) throw std::invalid_argument("chambers_1d: codomain must be 1-D");
  if (pi.domain_dim() != m.dim()) throw std::invalid_argument("chambers_1d: dimension mismatch");
  const QVec& r = pi.reduced[0];

  std::set<Rat> bps;
  bool neg_unbounded = false, pos_unbounded = false, any = false;
  for (const QPPiece& piece : m.pieces()) {
    const Polyhedron& p = piece.cone.base;
    if (p.is_empty()) continue;
    any = true;
    for (const QVec& l : p.lineality_space())
      if (qvec_dot(r, l) != 0) neg_unbounded = pos_unbounded = true;
    for (const QVec& ray : p.extreme_rays()) {
      Rat s = qvec_dot(r, ray);
      if (s > 0) pos_unbounded = true;
      if (s < 0) neg_unbounded = true;
    }
    Polyhedron q = pointed_slice(p);
    std::vector<QVec> vs = q.vertices();
    if (vs.empty()) vs.push_back(q.find_point());
    for (const QVec& v : vs) bps.insert(qvec_dot(r, v));
  }
  if (!any) return {};

  std::vector<Rat> b(bps.begin(), bps.end());
  std::vector<Polyhedron> out;
  if (neg_unbounded) {
    Polyhedron c(1);
    c.add_ineq({Rat(-1)}, -b.front());
    out.push_back(c);
  }
  for (size_t i = 0; i + 1 < b.size(); ++i) {
    Polyhedron c(1);
    c.add_ineq({Rat(1)}, b[i]);
    c.add_ineq({Rat(-1)}, -b[i + 1]);
    out.push_back(c);
  }
  if (pos_unbounded) {
    Polyhedron c(1);
    c.add_ineq({Rat(1)}, b.back());
    out.push_back(c);
  }
  for (const Rat& x : b) {
    Polyhedron c(1);
    c.add_eq({Rat(1)}, x);
    out.push_back(c);
  }
  return out;
}

PiecewiseQP push_reconstruct(const PiecewiseQP& m, const QuotientMap& pi,
                             const std::vector<Polyhedron>& chambers) {
  size_t d = pi.domain_dim(), dp = pi.image_dim();
  if (m.dim() != d) throw std::invalid_argument("push_reconstruct: dimension mismatch");
  require_proper(m, pi, "push_reconstruct");

  // Period bound: twist denominators of the data, shift denominators, and
  // denominators of (projected) vertices of the pieces.
  Int period = 1;
  for (const QPPiece& piece : m.pieces()) {
    if (piece.cone.base.is_empty()) continue;
    period = int_lcm(period, piece.q.twist_denominator_lcm());
    period = int_lcm(period, lcm_of_denominators(piece.cone.shift));
    period = int_lcm(period, lcm_of_denominators(pi.apply(piece.cone.shift)));
    Polyhedron q = pointed_slice(piece.cone.base);
    std::vector<QVec> vs = q.vertices();
    if (vs.empty()) vs.push_back(q.find_point());
    for (const QVec& v : vs) {
      period = int_lcm(period, lcm_of_denominators(v));
      period = int_lcm(period, lcm_of_denominators(pi.apply(v)));
    }
  }
  long t_long = static_cast<long>(period);

  // Degree bound: value degree of the pieces plus the fiber dimension.
  int deg = 0;
  for (const QPPiece& piece : m.pieces()) {
    if (piece.q.is_zero()) continue;
    deg = std::max(deg, piece.q.k_degree() + piece.q.lambda_degree());
  }
  deg += static_cast<int>(d - dp);

  // Fit chambers in order of decreasing dimension; point chambers absorb the
  // residual left by the full-dimensional ones.
  std::vector<size_t> order(chambers.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<size_t> cdim(chambers.size());
  for (size_t i = 0; i < chambers.size(); ++i) {
    if (chambers[i].space_dim() != dp)
      throw std::invalid_argument("push_reconstruct: chamber dimension mismatch");
    if (chambers[i].is_empty()) throw std::invalid_argument("push_reconstruct: empty chamber");
    cdim[i] = chambers[i].affine_dim();
    if (cdim[i] != 0 && cdim[i] != dp)
      throw std::invalid_argument(
          "push_reconstruct: chambers must be full-dimensional or single points");
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t x, size_t y) { return cdim[x] > cdim[y]; });

  PiecewiseQP result(dp);
  auto target = [&](const Int& k, const QVec& lamq) {
    return (fiber_sum(m, pi, k, lamq) - pqp_evaluate(result, k, lamq)).reduced();
  };

  Int period_all = period;  // grows with point-chamber denominators, for verification

  for (size_t ci : order) {
    const Polyhedron& chamber = chambers[ci];
    QuasiPolynomial fitted(dp);

    if (cdim[ci] == dp) {
      auto exps = exponents_up_to(1 + dp, deg);
      size_t want = exps.size() + 4;
      std::vector<size_t> implicit = chamber.implicit_equalities();
      QVec vstar = chamber.find_point(true);
      Int radius = period * (deg + 3) + 2;

      IMat unit(1 + dp, IVec(1 + dp, Int(0)));
      for (size_t i = 0; i <= dp; ++i) unit[i][i] = period;
      std::vector<std::pair<IVec, MultiPoly>> cosets;
      IVec res(1 + dp, Int(0));
      std::function<void(size_t)> per_class = [&](size_t pos) {
        if (pos < 1 + dp) {
          for (long r = 0; r < t_long; ++r) {
            res[pos] = r;
            per_class(pos + 1);
          }
          return;
        }
        std::vector<Sample> samples;
        for (long t = 1; t <= deg + 40 && samples.size() < want; ++t) {
          Int k = res[0] + Int(t) * period;
          if (k <= 0) continue;
          Polyhedron w(dp);
          for (const Inequality& in : chamber.ineqs()) w.add_ineq(in.a, Rat(k) * in.c);
          QVec blo(dp), bhi(dp);
          for (size_t i = 0; i < dp; ++i) {
            blo[i] = Rat(k) * vstar[i] - Rat(radius);
            bhi[i] = Rat(k) * vstar[i] + Rat(radius);
          }
          w = w.intersect(Polyhedron::box(blo, bhi));
          if (w.is_empty()) continue;
          for (const IVec& lam : enumerate_lattice_points(w)) {
            bool klass = true;
            for (size_t i = 0; i < dp; ++i)
              if (mod_nonneg(lam[i], period) != res[i + 1]) klass = false;
            if (!klass) continue;
            QVec lamq = ivec_to_qvec(lam);
            QVec v(dp);
            for (size_t i = 0; i < dp; ++i) v[i] = lamq[i] / Rat(k);
            if (!relint_contains(chamber, implicit, v)) continue;
            bool elsewhere = false;
            for (size_t cj = 0; cj < chambers.size() && !elsewhere; ++cj)
              if (cj != ci && chambers[cj].contains(v)) elsewhere = true;
            if (elsewhere) continue;
            QVec point(1 + dp);
            point[0] = Rat(k);
            for (size_t i = 0; i < dp; ++i) point[i + 1] = lamq[i];
            samples.push_back({point, target(k, lamq)});
            if (samples.size() >= want) break;
          }
        }
        MultiPoly poly(1 + dp);
        if (!samples.empty()) {
          auto fit = fit_polynomial(samples, exps, 1 + dp);
          if (!fit)
            throw std::runtime_error(
                "push_reconstruct: interpolation inconsistent on a full-dimensional chamber "
                "(degree or period bound violated)");
          poly = *fit;
        }
        cosets.emplace_back(res, poly);
      };
      per_class(0);
      fitted = qp_character_decompose(dp, unit, cosets);
    } else {
      QVec v0 = chamber.find_point();
      Int tp = int_lcm(period, lcm_of_denominators(v0));
      period_all = int_lcm(period_all, tp);
      long tp_long = static_cast<long>(tp);

      IMat sub(1 + dp, IVec(1 + dp, Int(0)));
      sub[0][0] = tp;
      for (size_t i = 1; i <= dp; ++i) sub[i][i] = 1;
      std::vector<std::pair<IVec, MultiPoly>> cosets;
      for (long r = 0; r < tp_long; ++r) {
        IVec res(1 + dp, Int(0));
        res[0] = r;
        MultiPoly poly(1 + dp);
        // Only residues with k*v0 integral carry support.
        bool integral = true;
        for (const Rat& x : v0)
          if (!rat_is_int(Rat(r) * x)) integral = false;
        if (integral) {
          std::vector<Sample> samples;
          for (long t = (r == 0 ? 1 : 0); samples.size() < static_cast<size_t>(deg) + 5; ++t) {
            Int k = Int(r) + Int(t) * tp;
            if (k <= 0) continue;
            QVec lamq = qvec_scale(Rat(k), v0);
            QVec point(1 + dp);
            point[0] = Rat(k);
            for (size_t i = 0; i < dp; ++i) point[i + 1] = lamq[i];
            samples.push_back({point, target(k, lamq)});
          }
          std::vector<std::vector<int>> exps;
          for (int j = 0; j <= deg; ++j) {
            std::vector<int> e(1 + dp, 0);
            e[0] = j;
            exps.push_back(e);
          }
          auto fit = fit_polynomial(samples, exps, 1 + dp);
          if (!fit)
            throw std::runtime_error(
                "push_reconstruct: interpolation inconsistent on a point chamber "
                "(degree or period bound violated)");
          poly = *fit;
        }
        cosets.emplace_back(res, poly);
      }
      fitted = qp_character_decompose(dp, sub, cosets);
    }

    if (!fitted.is_zero()) result.add_piece(fitted, chamber, qvec_zero(dp));
  }

  // Global verification on an independent grid around the chambers.
  QVec lo(dp), hi(dp);
  bool first = true;
  for (const Polyhedron& chamber : chambers) {
    std::vector<QVec> pts = chamber.vertices();
    if (pts.empty()) pts.push_back(chamber.find_point());
    for (const QVec& v : pts) {
      if (first) {
        lo = hi = v;
        first = false;
        continue;
      }
      for (size_t i = 0; i < dp; ++i) {
        if (v[i] < lo[i]) lo[i] = v[i];
        if (v[i] > hi[i]) hi[i] = v[i];
      }
    }
  }
  Int kmax = 2 * period_all + 2;
  if (kmax < 6) kmax = 6;
  for (Int k = 1; k <= kmax; ++k) {
    IVec blo(dp), bhi(dp);
    for (size_t i = 0; i < dp; ++i) {
      blo[i] = rat_ceil(Rat(k) * (lo[i] - 2));
      bhi[i] = rat_floor(Rat(k) * (hi[i] + 2));
    }
    std::optional<std::string> failure;
    for_each_lattice_in_box(blo, bhi, [&](const IVec& lam) {
      if (failure) return;
      QVec lamq = ivec_to_qvec(lam);
      Cyclotomic expect = fiber_sum(m, pi, k, lamq);
      Cyclotomic got = pqp_evaluate(result, k, lamq);
      if (!(expect - got).is_zero()) {
        std::ostringstream os;
        os << "push_reconstruct: verification failed at k=" << k << ", lambda'="
           << qvec_to_string(lamq) << ": expected " << expect.to_string() << ", reconstructed "
           << got.to_string();
        failure = os.str();
      }
    });
    if (failure) throw std::runtime_error(*failure);
  }
  return result;
}

}  // namespace asq
