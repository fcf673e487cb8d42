#include <asq/expansion.hpp>

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>

namespace asq {

namespace {

Rat factorial(long n) {
  Rat f = 1;
  for (long i = 2; i <= n; ++i) f *= Rat(i);
  return f;
}

long rat_order(const Rat& turn) {  // order of e^{2 pi i turn}
  return static_cast<long>(rat_den(rat_frac(turn)));
}

QVec imat_row_to_qvec(const IVec& v) { return to_qvec(v); }

QMat rows_transposed(const std::vector<QVec>& rows, size_t d) {
  QMat t(d, QVec(rows.size(), Rat(0)));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < d; ++j) t[j][i] = rows[i][j];
  return t;
}

// Solve for the coordinates of v in the (independent) row basis; throws if
// v is outside the span.
QVec coords_in_basis(const std::vector<QVec>& basis, const QVec& v) {
  if (basis.empty()) {
    if (!qvec_is_zero(v)) throw std::logic_error("coords_in_basis: not in span");
    return {};
  }
  auto x = solve_linear(rows_transposed(basis, v.size()), v);
  if (!x) throw std::logic_error("coords_in_basis: not in span");
  return *x;
}

IVec qvec_to_ivec_exact(const QVec& v) {
  IVec r;
  for (const Rat& x : v) {
    if (!rat_is_int(x)) throw std::logic_error("expected integral vector");
    r.push_back(rat_num(x));
  }
  return r;
}

Rat det_rat(QMat m) {
  size_t n = m.size();
  Rat det = 1;
  for (size_t c = 0; c < n; ++c) {
    size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return Rat(0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    Rat inv = Rat(1) / m[c][c];
    for (size_t r2 = c + 1; r2 < n; ++r2) {
      if (m[r2][c] == 0) continue;
      Rat f = m[r2][c] * inv;
      for (size_t j = c; j < n; ++j) m[r2][j] -= f * m[c][j];
    }
  }
  return det;
}

RDistribution zero_rdist(size_t d) { return RDistribution{d, {}}; }

AsymptoticSeries zero_series(size_t d) {
  AsymptoticSeries s;
  s.dim = d;
  s.s = 0;
  s.theta.push_back(zero_rdist(d));
  return s;
}

// e^{2 pi i t k / n0} indicator expansion of {k : k = k0 mod n0}.
QuasiPolynomial index_indicator_qp(size_t d, const Int& k0, const Int& n0) {
  QuasiPolynomial q(d);
  long n = static_cast<long>(n0);
  for (long t = 0; t < n; ++t) {
    Cyclotomic c = Cyclotomic::from_turn(-Rat(t) * Rat(k0) / Rat(n)).scaled(Rat(1, n));
    q += QuasiPolynomial::term(d, Rat(t) / Rat(n), Character::trivial(d),
                               MultiPoly::constant(d + 1, c));
  }
  return q;
}

// Quasi-polynomial in k with trivial characters and k-degree 0, as a periodic
// table of polynomials in v.
PeriodicDiffOp qp_to_periodic_op(const QuasiPolynomial& q, size_t d) {
  Int period = 1;
  for (const auto& [key, p] : q.terms()) {
    if (!key.second.is_trivial())
      throw std::invalid_argument("qp_to_periodic_op: nontrivial character");
    if (p.degree_in(0) > 0) throw std::invalid_argument("qp_to_periodic_op: k-dependent");
    period = int_lcm(period, rat_den(key.first));
  }
  PeriodicDiffOp op;
  op.period = period;
  long np = static_cast<long>(period);
  for (long r = 0; r < np; ++r) {
    MultiPoly acc(d);
    for (const auto& [key, p] : q.terms()) {
      MultiPoly pv(d);
      for (const auto& [e, c] : p.terms()) {
        MultiPoly::Exponent e2(e.begin() + 1, e.end());
        pv.add_term(e2, c);
      }
      acc += pv.scaled(Cyclotomic::from_turn(key.first * Rat(r)));
    }
    std::vector<DiffTerm> row;
    if (!acc.is_zero()) row.push_back({acc, std::vector<int>(d, 0)});
    op.table.push_back(std::move(row));
  }
  return op;
}

struct AxisOption {
  long n;  // 0 = measure term, n >= 1 = (n-1)-st derivative delta
  Int period;
  std::vector<Cyclotomic> table;
};

}  // namespace

long expansion_guard_order() {
  if (const char* e = std::getenv("ASYMPTHETA_GUARD_ORDER")) {
    long g = std::atol(e);
    if (g >= 0) return g;
  }
  return 1;
}

MultiPoly zeta_bernoulli(long n, const Rat& zeta_turn) {
  if (n < 0) throw std::invalid_argument("zeta_bernoulli: n must be >= 0");
  Rat zt = rat_frac(zeta_turn);
  static std::map<std::pair<long, Rat>, MultiPoly> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({n, zt});
    if (it != cache.end()) return it->second;
  }
  MultiPoly result(1);
  if (zt == 0 && n == 0) {
    result = MultiPoly::constant(1, Rat(1));
  } else if (zt != 0 && n == 0) {
    result = MultiPoly(1);  // B_{0,zeta} = 0
  } else {
    // truncated power series with coefficients in Q(zeta)[x]
    std::vector<MultiPoly> num, den;
    MultiPoly x = MultiPoly::variable(1, 0);
    if (zt == 0) {
      // t e^{xt} / (e^t - 1) = e^{xt} / ((e^t - 1)/t)
      MultiPoly xp = MultiPoly::constant(1, Rat(1));
      for (long i = 0; i <= n; ++i) {
        num.push_back(xp.scaled(Rat(1) / factorial(i)));
        den.push_back(MultiPoly::constant(1, Rat(1) / factorial(i + 1)));
        xp = xp * x;
      }
    } else {
      Cyclotomic zeta = Cyclotomic::from_turn(zt);
      MultiPoly xp = MultiPoly::constant(1, Rat(1));
      num.push_back(MultiPoly(1));
      den.push_back(MultiPoly::constant(1, zeta - Cyclotomic(Rat(1))));
      for (long i = 1; i <= n; ++i) {
        num.push_back(xp.scaled(Rat(1) / factorial(i - 1)));
        den.push_back(MultiPoly::constant(1, zeta.scaled(Rat(1) / factorial(i))));
        xp = xp * x;
      }
    }
    Cyclotomic inv0 = den[0].terms().begin()->second.inverse();
    std::vector<MultiPoly> c;
    for (long i = 0; i <= n; ++i) {
      MultiPoly acc = num[static_cast<size_t>(i)];
      for (long j = 0; j < i; ++j)
        acc = acc - c[static_cast<size_t>(j)] * den[static_cast<size_t>(i - j)];
      c.push_back(acc.scaled(inv0));
    }
    result = c[static_cast<size_t>(n)].scaled(factorial(n));
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_pair(n, zt), result);
  return result;
}

AsymptoticSeries euler_maclaurin_1d(const Rat& s, const Rat& sigma, const Rat& zeta_turn,
                                    long n_terms) {
  Rat zt = rat_frac(zeta_turn);
  long ord = rat_order(zt);
  Int period = int_lcm(rat_den(s) * Int(ord), rat_den(sigma));
  AsymptoticSeries a;
  a.dim = 1;
  a.s = 1;
  a.theta.assign(static_cast<size_t>(n_terms) + 1, zero_rdist(1));
  if (zt == 0) {
    Polyhedron ray(1);
    ray.add_ineq({Rat(1)}, s);
    a.theta[0].terms.push_back(
        {ray, PeriodicDiffOp::single({MultiPoly::constant(1, Rat(1)), {0}})});
  }
  Polyhedron pt(1);
  pt.add_eq({Rat(1)}, s);
  long np = static_cast<long>(period);
  for (long n = 1; n <= n_terms; ++n) {
    MultiPoly bn = zeta_bernoulli(n, zt);
    PeriodicDiffOp op;
    op.period = period;
    bool any = false;
    for (long r = 0; r < np; ++r) {
      Rat arg = rat_frac(-Rat(r) * s - sigma) + sigma;
      Cyclotomic pref = Cyclotomic::from_turn(zt * Rat(rat_ceil(Rat(r) * s + sigma)));
      Cyclotomic coef = pref * bn.evaluate({arg});
      coef = coef.scaled(-Rat(1) / factorial(n));
      if (n % 2 == 0) coef = -coef;  // (-1)^{n-1}
      std::vector<DiffTerm> row;
      if (!coef.is_zero()) {
        row.push_back({MultiPoly::constant(1, coef), {static_cast<int>(n - 1)}});
        any = true;
      }
      op.table.push_back(std::move(row));
    }
    if (any) a.theta[static_cast<size_t>(n)].terms.push_back({pt, op});
  }
  return a;
}

AsymptoticSeries euler_maclaurin_full_line(const Rat& zeta_turn, long n_terms) {
  AsymptoticSeries a;
  a.dim = 1;
  a.s = 1;
  a.theta.assign(static_cast<size_t>(n_terms) + 1, zero_rdist(1));
  if (rat_frac(zeta_turn) == 0)
    a.theta[0].terms.push_back({Polyhedron::whole_space(1),
                                PeriodicDiffOp::single({MultiPoly::constant(1, Rat(1)), {0}})});
  return a;
}

namespace {

// Expansion of e^{2 pi i u k} g^lambda p(k,lambda) [C_{K,sigma}] for one
// simplicial cone K (apex + rays + lineality), truncated at `budget`
// coefficients below the leading grading dim(K).
AsymptoticSeries expand_simplicial(const Rat& piece_sign, const QVec& apex,
                                   const std::vector<QVec>& rays,
                                   const std::vector<QVec>& lineality, const Rat& u,
                                   const Character& g, const MultiPoly& p, const QVec& sigma,
                                   long budget) {
  size_t d = apex.size();
  // lattice of the lineality space
  IMat lmat = lineality.empty() ? IMat{} : saturate_lattice(lineality, d);
  size_t l = lmat.size();
  if (!g.trivial_on(lmat)) return zero_series(d);  // full-line twisted factor

  std::vector<QVec> gens = rays;
  for (const auto& b : lineality) gens.push_back(b);
  IMat cmat = gens.empty() ? IMat{} : saturate_lattice(gens, d);
  size_t rc = cmat.size();
  size_t r = rays.size();
  if (rc != l + r) throw std::logic_error("expand_simplicial: dependent generators");

  std::vector<QVec> cbasis;
  for (const auto& row : cmat) cbasis.push_back(imat_row_to_qvec(row));

  // complement of the lineality lattice inside the cone's lattice
  IMat mbasis_rows;  // rows in Z^d
  if (r > 0) {
    IMat lcoord;
    for (const auto& row : lmat) lcoord.push_back(qvec_to_ivec_exact(coords_in_basis(cbasis, imat_row_to_qvec(row))));
    IMat mcoord;
    if (l == 0) {
      for (size_t i = 0; i < rc; ++i) {
        IVec e(rc, 0);
        e[i] = 1;
        mcoord.push_back(e);
      }
    } else {
      mcoord = hermite_complement(lcoord, rc);
    }
    for (const auto& mc : mcoord) {
      IVec row(d, 0);
      for (size_t i = 0; i < rc; ++i)
        for (size_t j = 0; j < d; ++j) row[j] += mc[i] * cmat[i][j];
      mbasis_rows.push_back(row);
    }
  }
  std::vector<QVec> lbq, mbq, lm_basis;
  for (const auto& row : lmat) lbq.push_back(imat_row_to_qvec(row));
  for (const auto& row : mbasis_rows) mbq.push_back(imat_row_to_qvec(row));
  lm_basis = lbq;
  for (const auto& v : mbq) lm_basis.push_back(v);

  // project rays onto the complement along the lineality space
  std::vector<QVec> alpha;  // in span of mbasis
  for (const auto& ray : rays) {
    QVec co = coords_in_basis(lm_basis, ray);
    QVec a = qvec_zero(d);
    for (size_t i = 0; i < r; ++i) a = qvec_add(a, qvec_scale(co[l + i], mbq[i]));
    alpha.push_back(to_qvec(primitive_vector(a)));  // primitive lattice step
  }

  // transverse complement and the arithmetic progression of feasible k
  IMat rmat = (rc == d) ? IMat{}
                        : (rc == 0 ? [&] {
                            IMat id;
                            for (size_t i = 0; i < d; ++i) {
                              IVec e(d, 0);
                              e[i] = 1;
                              id.push_back(e);
                            }
                            return id;
                          }()
                                   : hermite_complement(cmat, d));
  std::vector<QVec> rbq;
  for (const auto& row : rmat) rbq.push_back(imat_row_to_qvec(row));
  std::vector<QVec> cr_basis = cbasis;
  for (const auto& v : rbq) cr_basis.push_back(v);

  auto r_part = [&](const QVec& v) {  // (R-coordinates, ambient R-component)
    QVec co = coords_in_basis(cr_basis, v);
    QVec rco(co.begin() + static_cast<long>(rc), co.end());
    QVec amb = qvec_zero(d);
    for (size_t i = 0; i < rbq.size(); ++i) amb = qvec_add(amb, qvec_scale(rco[i], rbq[i]));
    return std::make_pair(rco, amb);
  };

  auto [a_rco, xi0] = r_part(apex);
  auto [s_rco, sigma_r] = r_part(sigma);
  Int n0 = 1;
  for (const Rat& x : a_rco) n0 = int_lcm(n0, rat_den(x));
  Int k0 = 0;
  for (Int k = 1; k <= n0; ++k) {
    bool ok = true;
    for (size_t i = 0; i < a_rco.size(); ++i)
      if (!rat_is_int(Rat(k) * a_rco[i] + s_rco[i])) ok = false;
    if (ok) {
      k0 = k;
      break;
    }
  }
  if (k0 == 0) return zero_series(d);  // no lattice points for any k
  QVec nu0 = qvec_add(qvec_scale(Rat(k0), xi0), sigma_r);

  QVec a_c = qvec_sub(apex, xi0);
  QVec sigma_c = qvec_sub(sigma, sigma_r);
  QVec s_ax, sg_ax;  // alpha-basis coordinates of apex / shift components
  std::vector<Rat> zeta_turns;
  if (r > 0) {
    std::vector<QVec> lam_basis = lbq;
    for (const auto& v : alpha) lam_basis.push_back(v);
    QVec ac = coords_in_basis(lam_basis, a_c);
    QVec sc = coords_in_basis(lam_basis, sigma_c);
    s_ax.assign(ac.begin() + static_cast<long>(l), ac.end());
    sg_ax.assign(sc.begin() + static_cast<long>(l), sc.end());
    for (const auto& aj : alpha) zeta_turns.push_back(rat_frac(qvec_dot(g.value, aj)));
  }

  std::vector<IVec> cosets =
      r > 0 ? parallelepiped_representatives(alpha, d) : std::vector<IVec>{IVec{}};

  // scalar phases independent of the coset
  Rat g_xi0 = qvec_dot(g.value, xi0);
  Cyclotomic phase0 =
      Cyclotomic::from_turn(qvec_dot(g.value, nu0) - Rat(k0) * g_xi0).scaled(piece_sign);

  AsymptoticSeries total = zero_series(d);
  total.theta.clear();

  for (const auto& coset : cosets) {
    QVec delta = r > 0 ? to_qvec(coset) : qvec_zero(d);
    QVec d_ax = r > 0 ? coords_in_basis(alpha, delta) : QVec{};

    // per-axis one-dimensional expansions
    std::vector<std::vector<AxisOption>> options(r);
    for (size_t j = 0; j < r; ++j) {
      Rat sj = s_ax[j];
      Rat sp = sg_ax[j] - d_ax[j];
      Rat zt = zeta_turns[j];
      long ord = rat_order(zt);
      if (zt == 0) options[j].push_back({0, 1, {Cyclotomic(Rat(1))}});
      Int dj = int_lcm(rat_den(sj) * Int(ord), rat_den(sp));
      long ndj = static_cast<long>(dj);
      for (long n = 1; n <= budget; ++n) {
        MultiPoly bn = zeta_bernoulli(n, zt);
        AxisOption opt{n, dj, {}};
        for (long rr = 0; rr < ndj; ++rr) {
          Rat arg = rat_frac(-Rat(rr) * sj - sp) + sp;
          Cyclotomic pref = Cyclotomic::from_turn(zt * Rat(rat_ceil(Rat(rr) * sj + sp)));
          Cyclotomic coef = pref * bn.evaluate({arg});
          coef = coef.scaled(-Rat(1) / factorial(n));
          if (n % 2 == 0) coef = -coef;
          opt.table.push_back(coef);
        }
        options[j].push_back(std::move(opt));
      }
    }

    AsymptoticSeries base;
    base.dim = d;
    base.s = static_cast<long>(l + r);
    base.theta.assign(static_cast<size_t>(budget) + 1, zero_rdist(d));

    std::vector<size_t> pick(r, 0);
    std::function<void(size_t, long)> rec = [&](size_t j, long used) {
      if (j == r) {
        // assemble one product term
        std::vector<QVec> free_rays;
        std::vector<std::pair<QVec, long>> derivs;
        Int period = 1;
        for (size_t i = 0; i < r; ++i) {
          const AxisOption& o = options[i][pick[i]];
          period = int_lcm(period, o.period);
          if (o.n == 0)
            free_rays.push_back(alpha[i]);
          else
            derivs.push_back({alpha[i], o.n - 1});
        }
        long np = static_cast<long>(period);
        std::vector<Cyclotomic> table(static_cast<size_t>(np), Cyclotomic(Rat(1)));
        for (size_t i = 0; i < r; ++i) {
          const AxisOption& o = options[i][pick[i]];
          long oj = static_cast<long>(o.period);
          for (long rr = 0; rr < np; ++rr)
            table[static_cast<size_t>(rr)] *= o.table[static_cast<size_t>(rr % oj)];
        }
        // lattice normalization of the face measure
        std::vector<QVec> face_gens = free_rays;
        for (const auto& b : lbq) face_gens.push_back(b);
        Rat norm = 1;
        if (!face_gens.empty()) {
          IMat fsat = saturate_lattice(face_gens, d);
          std::vector<QVec> fb;
          for (const auto& row : fsat) fb.push_back(imat_row_to_qvec(row));
          QMat coords;
          for (const auto& gen : face_gens) coords.push_back(coords_in_basis(fb, gen));
          Rat det = det_rat(coords);
          norm = Rat(1) / (det < 0 ? -det : det);
        }
        Polyhedron face = Polyhedron::from_cone_generators(d, apex, free_rays, lineality);
        PeriodicDiffOp op;
        op.period = period;
        bool any = false;
        for (long rr = 0; rr < np; ++rr) {
          Cyclotomic c = table[static_cast<size_t>(rr)].scaled(norm);
          std::vector<DiffTerm> row;
          if (!c.is_zero()) {
            row.push_back({MultiPoly::constant(d, c), std::vector<int>(d, 0)});
            any = true;
          }
          op.table.push_back(std::move(row));
        }
        if (any) {
          RDistribution term{d, {{face, op}}};
          for (const auto& [dir, m] : derivs)
            for (long t = 0; t < m; ++t) term = rdist_derivative(term, dir);
          size_t idx = static_cast<size_t>(used);
          base.theta[idx] = rdist_add(base.theta[idx], term);
        }
        return;
      }
      for (size_t oi = 0; oi < options[j].size(); ++oi) {
        long n = options[j][oi].n;
        if (used + n > budget) continue;
        pick[j] = oi;
        rec(j + 1, used + n);
      }
    };
    rec(0, 0);

    // translation for the O(1/k) offset of the lattice frame
    AsymptoticSeries shifted = series_translate(base, qvec_add(qvec_add(sigma_r, delta),
                                                               qvec_sub(nu0, qvec_add(qvec_scale(Rat(k0), xi0), sigma_r))));
    // scalar phases, index-set indicator and the polynomial factor
    Cyclotomic phase = phase0 * Cyclotomic::from_turn(qvec_dot(g.value, delta));
    QuasiPolynomial h =
        QuasiPolynomial::term(d, u + g_xi0, Character::trivial(d), p).scaled(phase);
    if (n0 > 1) h = h * index_indicator_qp(d, k0, n0);
    if (h.is_zero()) continue;
    total = series_add(total, series_scale(shifted, h));
  }
  if (total.theta.empty()) return zero_series(d);
  return total;
}

}  // namespace

AsymptoticSeries expand_affine_exact(const AffineSubspace& a, const QVec& sigma,
                                     const QuasiPolynomial& q, long order) {
  size_t d = a.ambient_dim();
  AsymptoticSeries total = zero_series(d);
  for (const auto& [key, p] : q.terms())
    total = series_add(total, expand_simplicial(Rat(1), a.point, {}, a.basis, key.first,
                                                key.second, p, sigma, order));
  return total;
}

Expansion expand_with_diagnostics(const PiecewiseQP& m, long order) {
  if (order < 0) throw std::invalid_argument("expand: order must be >= 0");
  size_t d = m.dim();
  long budget = order + expansion_guard_order();
  AsymptoticSeries total = zero_series(d);
  std::vector<Polyhedron> inputs;
  for (const auto& pc : m.pieces()) {
    const Polyhedron& P = pc.cone.base;
    inputs.push_back(P);
    std::vector<std::pair<int, SimplicialCone>> cones;
    AffineSubspace hull = P.affine_hull();
    Polyhedron hull_poly = [&] {
      Polyhedron h(d);
      QMat basis_rows = hull.basis.empty() ? QMat{} : QMat(hull.basis);
      std::vector<QVec> normals;
      if (hull.basis.empty()) {
        for (size_t i = 0; i < d; ++i) {
          QVec e = qvec_zero(d);
          e[i] = 1;
          normals.push_back(e);
        }
      } else {
        normals = nullspace(basis_rows);
      }
      for (const auto& nrm : normals) h.add_eq(nrm, qvec_dot(nrm, hull.point));
      return h;
    }();
    if (P.set_equals(hull_poly)) {
      SimplicialCone sc;
      sc.apex = hull.point;
      sc.lineality = hull.basis;
      cones.push_back({1, sc});
    } else {
      bool conical = false;
      try {
        conical = P.set_equals(P.tangent_cone_at(P.apex_point()));
      } catch (const std::exception&) {
        conical = false;
      }
      if (conical) {
        cones = closed_cone_decomposition(P);
      } else if (P.is_bounded()) {
        for (const auto& sp : brianchon_gram(P))
          for (const auto& [sg, sc] : closed_cone_decomposition(sp.poly))
            cones.push_back({sp.sign * sg, sc});
      } else {
        throw std::invalid_argument(
            "expand: unbounded cone base that is neither affine nor conical");
      }
    }
    for (const auto& [sg, sc] : cones)
      for (const auto& [key, p] : pc.q.terms())
        total = series_add(total, expand_simplicial(Rat(sg), sc.apex, sc.rays, sc.lineality,
                                                    key.first, key.second, p, pc.cone.shift,
                                                    budget));
  }
  total = series_truncated(total, order);
  FaceRewrite fr = series_rewrite_on_faces(total, inputs);
  return {fr.series, fr.warnings};
}

AsymptoticSeries expand(const PiecewiseQP& m, long order) {
  return expand_with_diagnostics(m, order).series;
}

LeadingTerm leading_term(const PiecewiseQP& m) {
  size_t d = m.dim();
  struct PieceLead {
    long s;
    Polyhedron face;
    QuasiPolynomial pd;
    Int k0, n0;
  };
  std::vector<PieceLead> leads;
  long smax = 0;
  bool have = false;
  for (const auto& pc : m.pieces()) {
    DegreeSplit ds = qp_degree_split(pc.q, pc.cone.base, pc.cone.shift);
    if (ds.base.index_empty) continue;
    long deg = -1;
    for (long j = static_cast<long>(ds.p.size()) - 1; j >= 0; --j)
      if (!ds.p[static_cast<size_t>(j)].is_zero()) {
        deg = j;
        break;
      }
    if (deg < 0) continue;
    long s = static_cast<long>(pc.cone.base.affine_dim()) + deg;
    leads.push_back({s, pc.cone.base, ds.p[static_cast<size_t>(deg)], ds.base.k0, ds.base.n0});
    if (!have || s > smax) smax = s;
    have = true;
  }
  LeadingTerm lt;
  lt.theta0 = zero_rdist(d);
  if (!have) return lt;
  lt.s = smax;
  for (const auto& pl : leads) {
    if (pl.s != smax) continue;
    QuasiPolynomial pd = pl.pd;
    if (pl.n0 > 1) pd = pd * index_indicator_qp(d, pl.k0, pl.n0);
    PeriodicDiffOp op = qp_to_periodic_op(pd, d);
    if (!op.is_zero()) lt.theta0.terms.push_back({pl.face, op});
  }
  return lt;
}

AsymptoticSeries series_truncated(const AsymptoticSeries& a, long order) {
  AsymptoticSeries out = a;
  out.theta.resize(static_cast<size_t>(order) + 1, zero_rdist(a.dim));
  return out;
}

bool series_is_zero(const AsymptoticSeries& a) {
  for (const auto& t : a.theta)
    if (!t.is_zero()) return false;
  return true;
}

Cyclotomic series_pair_poly_window(const AsymptoticSeries& a, const Int& k, const MultiPoly& phi,
                                   const Polyhedron& box) {
  AsymptoticSeries clipped = a;
  for (auto& th : clipped.theta) {
    std::vector<RTerm> kept;
    for (auto& t : th.terms) {
      Polyhedron f = t.face.intersect(box);
      if (f.is_empty()) continue;
      kept.push_back({f, t.op});
    }
    th.terms = std::move(kept);
  }
  return series_pair_poly(clipped, k, phi);
}

// ---------------------------------------------------------------------------
// support rewriting

namespace {

struct Lcg {
  unsigned long long state = 0x243f6a8885a308d3ULL;
  unsigned long long next() {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return state >> 16;
  }
  Rat rat(long span) {  // in (-span, span), prime denominator
    long num = static_cast<long>(next() % static_cast<unsigned long long>(2 * span * 1009 + 1)) -
               span * 1009;
    return Rat(num, 1009);
  }
};

Polyhedron hull_polyhedron(const Polyhedron& f) {
  size_t d = f.space_dim();
  AffineSubspace h = f.affine_hull();
  Polyhedron out(d);
  std::vector<QVec> normals;
  if (h.basis.empty()) {
    for (size_t i = 0; i < d; ++i) {
      QVec e = qvec_zero(d);
      e[i] = 1;
      normals.push_back(e);
    }
  } else {
    normals = nullspace(QMat(h.basis));
  }
  for (const auto& nrm : normals) out.add_eq(nrm, qvec_dot(nrm, h.point));
  return out;
}

std::vector<std::vector<int>> monomials_up_to(size_t nvars, long maxdeg) {
  std::vector<std::vector<int>> out = {std::vector<int>(nvars, 0)};
  for (size_t v = 0; v < nvars; ++v) {
    std::vector<std::vector<int>> next;
    for (auto& e : out) {
      long used = 0;
      for (int x : e) used += x;
      for (long t = 0; used + t <= maxdeg; ++t) {
        auto e2 = e;
        e2[v] = static_cast<int>(t);
        next.push_back(e2);
      }
    }
    out = std::move(next);
  }
  return out;
}

// true if v lies on the boundary hyperplane of some non-implicit inequality
bool on_some_facet(const QVec& v, const std::vector<const Polyhedron*>& polys) {
  for (const Polyhedron* p : polys) {
    std::vector<size_t> impl = p->implicit_equalities();
    std::set<size_t> imps(impl.begin(), impl.end());
    for (size_t i = 0; i < p->ineqs().size(); ++i) {
      if (imps.count(i)) continue;
      if (qvec_dot(p->ineqs()[i].a, v) == p->ineqs()[i].c) return true;
    }
  }
  return false;
}

struct HullItem {
  Polyhedron face;
  MultiPoly coeff;
};

// p * product of directional derivatives applied to delta_F, with the pairing
// convention (-1)^{#dirs} int_F p d_dirs phi.
struct DirTerm {
  Polyhedron face;
  MultiPoly coeff;
  std::vector<QVec> dirs;
};

// Split every derivative direction into its component tangent to the affine
// hull of the support plus a complementary part; tangential derivatives are
// integrated by parts (derivative of the coefficient plus facet boundary
// terms weighted by the primitive lattice conormal).  The result only carries
// derivatives transverse to each support's hull, making per-multi-index
// comparison of coefficients on a common hull meaningful.
void tangential_reduce_term(const DirTerm& t, std::vector<DirTerm>& out) {
  size_t d = t.face.space_dim();
  FaceFrame frame = face_frame(t.face);
  size_t h = frame.directions.size();
  for (size_t i = 0; i < t.dirs.size(); ++i) {
    QVec tan = qvec_zero(d);
    for (size_t j = 0; j < h; ++j)
      tan = qvec_add(tan, qvec_scale(qvec_dot(frame.dual[j], t.dirs[i]), frame.directions[j]));
    if (qvec_is_zero(tan)) continue;
    QVec nor = qvec_sub(t.dirs[i], tan);
    std::vector<QVec> rest;
    for (size_t j = 0; j < t.dirs.size(); ++j)
      if (j != i) rest.push_back(t.dirs[j]);
    // complementary part continues as-is
    if (!qvec_is_zero(nor)) {
      DirTerm cont{t.face, t.coeff, rest};
      cont.dirs.push_back(nor);
      tangential_reduce_term(cont, out);
    }
    // tangential part: d_t p stays on the face ...
    MultiPoly dp = t.coeff.directional_derivative(tan);
    if (!dp.is_zero()) tangential_reduce_term({t.face, dp, rest}, out);
    // ... plus boundary terms over the facets of the face
    size_t fdim = t.face.affine_dim();
    if (fdim >= 1) {
      QVec pf = t.face.find_point(true);
      for (const auto& g : t.face.faces()) {
        if (g.affine_dim() + 1 != fdim) continue;
        // primitive conormal of g inside the face lattice, outward-oriented
        QVec ytan;  // face-lattice coordinates of the tangential direction
        for (size_t j = 0; j < h; ++j) ytan.push_back(qvec_dot(frame.dual[j], tan));
        FaceFrame gframe = face_frame(g);
        QMat gdirs;
        for (const auto& gd : gframe.directions) {
          QVec y;
          for (size_t j = 0; j < h; ++j) y.push_back(qvec_dot(frame.dual[j], gd));
          gdirs.push_back(y);
        }
        QVec eta;
        if (gdirs.empty()) {
          eta = QVec{Rat(1)};
        } else {
          auto ns = nullspace(gdirs);
          if (ns.size() != 1) throw std::logic_error("tangential_reduce: bad facet");
          eta = ns[0];
        }
        eta = to_qvec(primitive_vector(eta));
        QVec diff = qvec_sub(pf, g.find_point(true));
        QVec ydiff;
        for (size_t j = 0; j < h; ++j) ydiff.push_back(qvec_dot(frame.dual[j], diff));
        if (qvec_dot(eta, ydiff) > 0) eta = qvec_scale(Rat(-1), eta);
        Rat weight = -qvec_dot(eta, ytan);
        if (weight == 0) continue;
        tangential_reduce_term({g, t.coeff.scaled(weight), rest}, out);
      }
    }
    return;
  }
  out.push_back(t);
}

RDistribution tangential_reduced(const RDistribution& a) {
  size_t d = a.dim;
  RDistribution out{d, {}};
  for (const auto& term : a.terms) {
    Int period = term.op.period;
    long np = static_cast<long>(period);
    PeriodicDiffOp op;
    op.period = period;
    op.table.assign(static_cast<size_t>(np), {});
    std::map<std::string, std::pair<Polyhedron, PeriodicDiffOp>> extra;
    for (long r = 0; r < np; ++r) {
      for (const auto& dt : term.op.table[static_cast<size_t>(r)]) {
        std::vector<QVec> dirs;
        for (size_t i = 0; i < dt.deriv.size(); ++i)
          for (int c = 0; c < dt.deriv[i]; ++c) {
            QVec e = qvec_zero(d);
            e[i] = 1;
            dirs.push_back(e);
          }
        std::vector<DirTerm> reduced;
        tangential_reduce_term({term.face, dt.coeff, dirs}, reduced);
        for (const auto& rt : reduced) {
          // expand the product of general directions into coordinate partials
          std::map<MultiPoly::Exponent, Cyclotomic> mono = {
              {MultiPoly::Exponent(d, 0), Cyclotomic(Rat(1))}};
          for (const auto& w : rt.dirs) {
            std::map<MultiPoly::Exponent, Cyclotomic> next;
            for (const auto& [e, c] : mono)
              for (size_t i = 0; i < d; ++i) {
                if (w[i] == 0) continue;
                MultiPoly::Exponent e2 = e;
                e2[i] += 1;
                Cyclotomic add = c.scaled(w[i]);
                auto it = next.find(e2);
                if (it == next.end()) next.emplace(e2, add);
                else it->second += add;
              }
            mono = std::move(next);
          }
          for (const auto& [e, c] : mono) {
            if (c.is_zero()) continue;
            MultiPoly coeff = rt.coeff.scaled(c);
            if (coeff.is_zero()) continue;
            std::vector<int> alpha(e.begin(), e.end());
            std::string key = rt.face.canonical_key();
            auto it = extra.find(key);
            if (it == extra.end()) {
              PeriodicDiffOp z;
              z.period = period;
              z.table.assign(static_cast<size_t>(np), {});
              it = extra.emplace(key, std::make_pair(rt.face, z)).first;
            }
            it->second.second.table[static_cast<size_t>(r)].push_back({coeff, alpha});
          }
        }
      }
    }
    for (auto& [key, fo] : extra) out.terms.push_back({fo.first, fo.second});
  }
  return out.normalized();
}

}  // namespace

FaceRewrite series_rewrite_on_faces(const AsymptoticSeries& a,
                                    const std::vector<Polyhedron>& polys) {
  size_t d = a.dim;
  std::map<std::string, Polyhedron> candidates;
  for (const auto& p : polys)
    for (const auto& f : p.faces()) candidates.emplace(f.canonical_key(), f);

  FaceRewrite out;
  out.series = a;
  for (auto& theta : out.series.theta) {
    RDistribution norm = tangential_reduced(theta);
    // group by affine hull
    std::map<std::string, std::vector<RTerm>> groups;
    std::map<std::string, Polyhedron> hull_of;
    for (auto& t : norm.terms) {
      Polyhedron h = hull_polyhedron(t.face);
      std::string key = h.canonical_key();
      groups[key].push_back(t);
      hull_of.emplace(key, h);
    }
    RDistribution rebuilt{d, {}};
    for (auto& [hkey, terms] : groups) {
      // already expressed on input faces?
      bool all_input = true;
      for (const auto& t : terms)
        if (!candidates.count(t.face.canonical_key())) all_input = false;
      if (all_input) {
        for (auto& t : terms) rebuilt.terms.push_back(t);
        continue;
      }
      std::vector<Polyhedron> cands;
      for (const auto& [ck, cf] : candidates)
        if (hull_polyhedron(cf).canonical_key() == hkey) cands.push_back(cf);

      Int period = 1;
      for (const auto& t : terms) period = int_lcm(period, t.op.period);
      long np = static_cast<long>(period);

      // frame for generic points on the hull
      FaceFrame hframe = face_frame(hull_of.at(hkey));
      size_t h = hframe.directions.size();
      // probe radius from the data
      Rat radius = 4;
      {
        std::vector<Polyhedron> all = cands;
        for (const auto& t : terms) all.push_back(t.face);
        for (const auto& pt : probe_grid(all, 0))
          for (size_t j = 0; j < h; ++j) {
            Rat y = qvec_dot(hframe.dual[j], qvec_sub(pt, hframe.origin));
            Rat ay = (y < 0 ? -y : y) + Rat(2);
            if (ay > radius) radius = ay;
          }
      }
      auto hull_point = [&](Lcg& rng) {
        QVec v = hframe.origin;
        for (size_t j = 0; j < h; ++j)
          v = qvec_add(v, qvec_scale(rng.rat(8) * radius / Rat(8), hframe.directions[j]));
        return v;
      };

      bool group_ok = true;
      std::map<std::string, std::pair<Polyhedron, PeriodicDiffOp>> fitted;
      std::vector<RTerm> residual_keep;
      // per residue and derivative index
      std::set<std::vector<int>> derivs;
      for (const auto& t : terms)
        for (const auto& row : t.op.table)
          for (const auto& dt : row) derivs.insert(dt.deriv);

      for (const auto& alpha : derivs) {
        for (long rres = 0; rres < np && group_ok; ++rres) {
          std::vector<HullItem> items;
          long maxdeg = 0;
          for (const auto& t : terms)
            for (const auto& dt : t.op.at(rres))
              if (dt.deriv == alpha) {
                items.push_back({t.face, dt.coeff});
                maxdeg = std::max(maxdeg, static_cast<long>(dt.coeff.total_degree()));
              }
          if (items.empty()) continue;
          auto eval_f = [&](const QVec& v) {
            Cyclotomic s;
            for (const auto& it : items)
              if (it.face.contains(v)) s += it.coeff.evaluate(v);
            return s;
          };
          std::vector<const Polyhedron*> boundary_polys;
          for (const auto& it : items) boundary_polys.push_back(&it.face);
          for (const auto& c : cands) boundary_polys.push_back(&c);

          // fit each candidate on its relative interior
          std::vector<MultiPoly> fits;
          for (const auto& F : cands) {
            FaceFrame frame = face_frame(F);
            size_t fh = frame.directions.size();
            auto monos = monomials_up_to(fh, maxdeg);
            QVec relint = F.find_point(true);
            Lcg rng;
            std::vector<QVec> pts;
            std::vector<QVec> ycoords;
            int attempts = 0;
            while (pts.size() < monos.size() && attempts < 4000) {
              ++attempts;
              QVec v = relint;
              for (size_t j = 0; j < fh; ++j)
                v = qvec_add(v, qvec_scale(rng.rat(8) * radius / Rat(8), frame.directions[j]));
              // pull towards the interior point until inside F
              int halvings = 0;
              while (!F.contains(v) && halvings < 40) {
                v = qvec_scale(Rat(1, 2), qvec_add(v, relint));
                ++halvings;
              }
              if (!F.contains(v)) continue;
              if (on_some_facet(v, boundary_polys)) continue;
              bool in_other = false;
              for (const auto& G : cands)
                if (!(G.canonical_key() == F.canonical_key()) && G.contains(v)) in_other = true;
              if (in_other) continue;
              pts.push_back(v);
              QVec y;
              for (size_t j = 0; j < fh; ++j)
                y.push_back(qvec_dot(frame.dual[j], qvec_sub(v, frame.origin)));
              ycoords.push_back(y);
            }
            if (pts.size() < monos.size()) {
              group_ok = false;
              break;
            }
            // solve Vandermonde per cyclotomic component
            QMat vmat;
            for (const auto& y : ycoords) {
              QVec row;
              for (const auto& e : monos) {
                Rat val = 1;
                for (size_t j = 0; j < fh; ++j)
                  for (int t2 = 0; t2 < e[j]; ++t2) val *= y[j];
                row.push_back(val);
              }
              vmat.push_back(row);
            }
            std::vector<Cyclotomic> vals;
            long level = 1;
            for (const auto& v : pts) {
              vals.push_back(eval_f(v));
              level = static_cast<long>(int_lcm(level, vals.back().level()));
            }
            size_t comp = Cyclotomic(Rat(0)).lifted_to(level).coeffs().size();
            std::vector<QVec> solutions;
            bool solved = true;
            for (size_t ci = 0; ci < comp && solved; ++ci) {
              QVec rhs;
              for (const auto& val : vals) rhs.push_back(val.lifted_to(level).coeffs()[ci]);
              auto sol = solve_linear(vmat, rhs);
              if (!sol) solved = false;
              else solutions.push_back(*sol);
            }
            if (!solved) {
              group_ok = false;
              break;
            }
            // assemble the fitted ambient polynomial
            std::vector<MultiPoly> yv;
            for (size_t j = 0; j < fh; ++j) {
              MultiPoly yj(d);
              yj += MultiPoly::constant(d, -qvec_dot(frame.dual[j], frame.origin));
              for (size_t i = 0; i < d; ++i)
                if (frame.dual[j][i] != 0) yj += MultiPoly::variable(d, i).scaled(frame.dual[j][i]);
              yv.push_back(yj);
            }
            MultiPoly fit(d);
            for (size_t mi = 0; mi < monos.size(); ++mi) {
              std::vector<Rat> raw;
              for (size_t ci = 0; ci < comp; ++ci) raw.push_back(solutions[ci][mi]);
              Cyclotomic cf = Cyclotomic::normalize(raw, level);
              if (cf.is_zero()) continue;
              MultiPoly term = MultiPoly::constant(d, cf);
              for (size_t j = 0; j < fh; ++j)
                for (int t2 = 0; t2 < monos[mi][j]; ++t2) term = term * yv[j];
              fit += term;
            }
            fits.push_back(fit);
          }
          if (!group_ok) break;

          // verify the residual vanishes at generic hull points
          Lcg rng2;
          rng2.state ^= 0x9e3779b97f4a7c15ULL;
          int checked = 0, tries = 0;
          while (checked < 40 && tries < 4000) {
            ++tries;
            QVec v = hull_point(rng2);
            if (on_some_facet(v, boundary_polys)) continue;
            Cyclotomic res = eval_f(v);
            for (size_t fi = 0; fi < cands.size(); ++fi)
              if (cands[fi].contains(v)) res -= fits[fi].evaluate(v);
            if (!res.is_zero()) {
              group_ok = false;
              break;
            }
            ++checked;
          }
          if (!group_ok) break;

          for (size_t fi = 0; fi < cands.size(); ++fi) {
            if (fits[fi].is_zero()) continue;
            std::string key = cands[fi].canonical_key();
            auto it = fitted.find(key);
            if (it == fitted.end()) {
              PeriodicDiffOp op;
              op.period = period;
              op.table.assign(static_cast<size_t>(np), {});
              it = fitted.emplace(key, std::make_pair(cands[fi], op)).first;
            }
            it->second.second.table[static_cast<size_t>(rres)].push_back({fits[fi], alpha});
          }
        }
        if (!group_ok) break;
      }
      if (group_ok) {
        for (auto& [key, fo] : fitted) rebuilt.terms.push_back({fo.first, fo.second});
      } else {
        out.warnings.push_back("support not re-expressed on input faces: hull " + hkey);
        for (auto& t : terms) rebuilt.terms.push_back(t);
      }
    }
    theta = rebuilt.normalized();
  }
  return out;
}

}  // namespace asq
