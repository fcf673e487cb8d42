#include <asq/distributions.hpp>

#include <algorithm>
#include <map>
#include <stdexcept>

namespace asq {

namespace {

Int binom(int n, int r) {
  if (r < 0 || r > n) return 0;
  Int b = 1;
  for (int i = 0; i < r; ++i) b = b * (n - i) / (i + 1);
  return b;
}

int multi_abs(const std::vector<int>& a) {
  int s = 0;
  for (int x : a) s += x;
  return s;
}

MultiPoly multi_derivative(const MultiPoly& p, const std::vector<int>& alpha) {
  MultiPoly r = p;
  for (size_t i = 0; i < alpha.size(); ++i)
    for (int j = 0; j < alpha[i]; ++j) r = r.derivative(i);
  return r;
}

std::string deriv_to_string(const std::vector<int>& a) {
  std::string s = "[";
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(a[i]);
  }
  return s + "]";
}

}  // namespace

FaceFrame face_frame(const Polyhedron& f) {
  size_t d = f.space_dim();
  FaceFrame fr;
  fr.origin = nearest_point(f);
  IMat b = face_direction_lattice(f);
  size_t r = b.size();
  if (r == 0) return fr;
  QMat bq(r, QVec(d));
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < d; ++j) bq[i][j] = Rat(b[i][j]);
  // dual functionals: rows of (B B^T)^{-1} B
  QMat gram(r, QVec(r));
  for (size_t i = 0; i < r; ++i)
    for (size_t j = 0; j < r; ++j) gram[i][j] = qvec_dot(bq[i], bq[j]);
  auto gi = mat_inverse(gram);
  if (!gi) throw std::logic_error("face_frame: dependent face directions");
  fr.directions = bq;
  fr.dual = mat_mul(*gi, bq);
  return fr;
}

MultiPoly restrict_poly_to_face(const MultiPoly& p, const Polyhedron& f) {
  size_t d = f.space_dim();
  FaceFrame fr = face_frame(f);
  size_t r = fr.directions.size();
  if (r == 0) return MultiPoly::constant(d, p.evaluate(fr.origin));
  // substitution v_i -> origin_i + sum_j directions[j][i] * y_j(v)
  std::vector<MultiPoly> y;
  for (size_t j = 0; j < r; ++j) {
    MultiPoly yj(d);
    yj += MultiPoly::constant(d, -qvec_dot(fr.dual[j], fr.origin));
    for (size_t i = 0; i < d; ++i)
      if (fr.dual[j][i] != 0) yj += MultiPoly::variable(d, i).scaled(fr.dual[j][i]);
    y.push_back(yj);
  }
  std::vector<MultiPoly> subs;
  for (size_t i = 0; i < d; ++i) {
    MultiPoly vi = MultiPoly::constant(d, fr.origin[i]);
    for (size_t j = 0; j < r; ++j)
      if (fr.directions[j][i] != 0) vi += y[j].scaled(fr.directions[j][i]);
    subs.push_back(vi);
  }
  return p.compose(subs);
}

WindowBox WindowBox::closed(const QVec& lo, const QVec& hi) {
  WindowBox w;
  w.lo = lo;
  w.hi = hi;
  w.lo_open.assign(lo.size(), false);
  w.hi_open.assign(hi.size(), false);
  return w;
}

bool WindowBox::contains(const QVec& v) const {
  for (size_t i = 0; i < lo.size(); ++i) {
    if (lo_open[i] ? !(v[i] > lo[i]) : !(v[i] >= lo[i])) return false;
    if (hi_open[i] ? !(v[i] < hi[i]) : !(v[i] <= hi[i])) return false;
  }
  return true;
}

std::string ThetaSample::to_csv() const {
  size_t d = window.dim();
  std::string s;
  for (size_t i = 0; i < d; ++i) s += "x" + std::to_string(i) + ",";
  s += "weight\n";
  for (const auto& atom : atoms) {
    for (size_t i = 0; i < d; ++i) s += rat_to_string(atom.point[i]) + ",";
    s += atom.weight.to_string() + "\n";
  }
  return s;
}

ThetaSample theta_sample(const PiecewiseQP& m, const Int& k, const WindowBox& window) {
  if (window.dim() != m.dim()) throw std::invalid_argument("theta_sample: dimension mismatch");
  if (k <= 0) throw std::invalid_argument("theta_sample: k must be positive");
  ThetaSample out;
  out.k = k;
  out.window = window;
  QVec lo = qvec_scale(Rat(k), window.lo), hi = qvec_scale(Rat(k), window.hi);
  Polyhedron box = Polyhedron::box(lo, hi);
  std::vector<QVec> pts;
  for (const auto& lp : enumerate_lattice_points(box)) {
    QVec l;
    for (const Int& x : lp) l.push_back(Rat(x));
    QVec pt = qvec_scale(Rat(1) / Rat(k), l);
    if (!window.contains(pt)) continue;  // open-facet filtering
    Cyclotomic w = pqp_evaluate(m, k, l);
    if (w.is_zero()) continue;
    out.atoms.push_back({pt, w});
  }
  std::sort(out.atoms.begin(), out.atoms.end(),
            [](const ThetaAtom& a, const ThetaAtom& b) { return a.point < b.point; });
  return out;
}

Cyclotomic theta_pair_poly(const PiecewiseQP& m, const Int& k, const MultiPoly& phi) {
  if (k <= 0) throw std::invalid_argument("theta_pair_poly: k must be positive");
  Cyclotomic sum;
  for (const auto& pc : m.pieces()) {
    if (!pc.cone.base.is_bounded())
      throw std::invalid_argument(
          "theta_pair_poly: unbounded support; pair on a window or use the exponential oracle");
    // lattice points of k P + sigma
    Polyhedron scaled(m.dim());
    for (const auto& iq : pc.cone.base.ineqs()) scaled.add_ineq(iq.a, Rat(k) * iq.c);
    Polyhedron support = scaled.translated(pc.cone.shift);
    for (const auto& lp : enumerate_lattice_points(support)) {
      QVec l;
      for (const Int& x : lp) l.push_back(Rat(x));
      sum += pc.q.evaluate(k, l) * phi.evaluate(qvec_scale(Rat(1) / Rat(k), l));
    }
  }
  return sum;
}

Cyclotomic theta_pair_poly(const PiecewiseQP& m, const Int& k, const MultiPoly& phi,
                           const WindowBox& window) {
  ThetaSample s = theta_sample(m, k, window);
  Cyclotomic sum;
  for (const auto& atom : s.atoms) sum += atom.weight * phi.evaluate(atom.point);
  return sum;
}

PeriodicDiffOp PeriodicDiffOp::single(const DiffTerm& t) {
  PeriodicDiffOp op;
  op.period = 1;
  op.table = {{t}};
  return op;
}

const std::vector<DiffTerm>& PeriodicDiffOp::at(const Int& k) const {
  Int r = k % period;
  if (r < 0) r += period;
  return table[static_cast<size_t>(static_cast<long>(r))];
}

PeriodicDiffOp PeriodicDiffOp::with_period(const Int& new_period) const {
  if (new_period % period != 0)
    throw std::invalid_argument("PeriodicDiffOp::with_period: not a multiple");
  PeriodicDiffOp out;
  out.period = new_period;
  long np = static_cast<long>(new_period);
  for (long r = 0; r < np; ++r) out.table.push_back(at(r));
  return out;
}

bool PeriodicDiffOp::is_zero() const {
  for (const auto& row : table)
    for (const auto& t : row)
      if (!t.coeff.is_zero()) return false;
  return true;
}

PeriodicDiffOp pdo_add(const PeriodicDiffOp& a, const PeriodicDiffOp& b) {
  Int p = int_lcm(a.period, b.period);
  PeriodicDiffOp out;
  out.period = p;
  long np = static_cast<long>(p);
  for (long r = 0; r < np; ++r) {
    std::vector<DiffTerm> row = a.at(r);
    const auto& brow = b.at(r);
    row.insert(row.end(), brow.begin(), brow.end());
    out.table.push_back(std::move(row));
  }
  return out;
}

PeriodicDiffOp pdo_scale(const PeriodicDiffOp& a, const Cyclotomic& c) {
  PeriodicDiffOp out = a;
  for (auto& row : out.table)
    for (auto& t : row) t.coeff = t.coeff.scaled(c);
  return out;
}

bool RDistribution::is_zero() const { return normalized().terms.empty(); }

RDistribution RDistribution::normalized() const {
  // group faces by canonical key
  std::map<std::string, RTerm> groups;
  for (const auto& t : terms) {
    if (t.face.is_empty() || t.op.is_zero()) continue;
    std::string key = t.face.canonical_key();
    auto it = groups.find(key);
    if (it == groups.end())
      groups.emplace(key, t);
    else
      it->second.op = pdo_add(it->second.op, t.op);
  }
  RDistribution out;
  out.dim = dim;
  for (auto& [key, t] : groups) {
    // canonicalize each residue: merge by derivative index, restrict
    // coefficients to the face, drop zeros
    PeriodicDiffOp op;
    op.period = t.op.period;
    bool any = false;
    for (const auto& row : t.op.table) {
      std::map<std::vector<int>, MultiPoly> byderiv;
      for (const auto& dt : row) {
        MultiPoly c = restrict_poly_to_face(dt.coeff, t.face);
        if (c.is_zero()) continue;
        auto it = byderiv.find(dt.deriv);
        if (it == byderiv.end())
          byderiv.emplace(dt.deriv, c);
        else {
          it->second += c;
          if (it->second.is_zero()) byderiv.erase(it);
        }
      }
      std::vector<DiffTerm> nrow;
      for (auto& [a, c] : byderiv) {
        nrow.push_back({c, a});
        any = true;
      }
      op.table.push_back(std::move(nrow));
    }
    // reduce the period if all residues agree
    bool constant = true;
    auto row_eq = [](const std::vector<DiffTerm>& x, const std::vector<DiffTerm>& y) {
      if (x.size() != y.size()) return false;
      for (size_t i = 0; i < x.size(); ++i)
        if (x[i].deriv != y[i].deriv || !(x[i].coeff == y[i].coeff)) return false;
      return true;
    };
    for (const auto& row : op.table)
      if (!row_eq(row, op.table[0])) constant = false;
    if (constant) {
      op.period = 1;
      op.table.resize(1);
    }
    if (any) out.terms.push_back({t.face, op});
  }
  return out;
}

std::string RDistribution::canonical_string() const {
  RDistribution n = normalized();
  // Order terms deterministically by canonical key.
  std::vector<std::pair<std::string, const RTerm*>> keyed;
  for (const auto& t : n.terms) keyed.push_back({t.face.canonical_key(), &t});
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::string s;
  for (const auto& [key, t] : keyed) {
    s += "face{" + key + "} period=" + t->op.period.str() + "\n";
    for (size_t r = 0; r < t->op.table.size(); ++r) {
      s += " k%" + t->op.period.str() + "=" + std::to_string(r) + ": ";
      bool first = true;
      for (const auto& dt : t->op.table[r]) {
        if (!first) s += " + ";
        s += "(" + dt.coeff.to_string() + ")d^" + deriv_to_string(dt.deriv);
        first = false;
      }
      if (first) s += "0";
      s += "\n";
    }
  }
  return s;
}

RDistribution rdist_add(const RDistribution& a, const RDistribution& b) {
  RDistribution out = a;
  out.dim = a.terms.empty() && a.dim == 0 ? b.dim : a.dim;
  for (const auto& t : b.terms) out.terms.push_back(t);
  return out;
}

RDistribution rdist_scale(const RDistribution& a, const Cyclotomic& c) {
  RDistribution out;
  out.dim = a.dim;
  if (c.is_zero()) return out;
  for (const auto& t : a.terms) out.terms.push_back({t.face, pdo_scale(t.op, c)});
  return out;
}

RDistribution rdist_derivative(const RDistribution& a, const QVec& sigma) {
  RDistribution out;
  out.dim = a.dim;
  for (const auto& t : a.terms) {
    PeriodicDiffOp op;
    op.period = t.op.period;
    for (const auto& row : t.op.table) {
      std::vector<DiffTerm> nrow;
      for (const auto& dt : row)
        for (size_t i = 0; i < sigma.size(); ++i) {
          if (sigma[i] == 0) continue;
          std::vector<int> a2 = dt.deriv;
          a2[i] += 1;
          nrow.push_back({dt.coeff.scaled(sigma[i]), a2});
        }
      op.table.push_back(std::move(nrow));
    }
    out.terms.push_back({t.face, op});
  }
  return out;
}

RDistribution rdist_mul_poly(const RDistribution& a, const MultiPoly& f) {
  RDistribution out;
  out.dim = a.dim;
  size_t d = a.dim;
  for (const auto& t : a.terms) {
    PeriodicDiffOp op;
    op.period = t.op.period;
    for (const auto& row : t.op.table) {
      std::vector<DiffTerm> nrow;
      for (const auto& dt : row) {
        // f (p d^a delta) = sum_{b <= a} (-1)^{|b|} C(a,b) (p d^b f) d^{a-b} delta
        std::vector<std::vector<int>> betas = {std::vector<int>(d, 0)};
        for (size_t i = 0; i < d; ++i) {
          std::vector<std::vector<int>> next;
          for (const auto& b : betas)
            for (int v = 0; v <= dt.deriv[i]; ++v) {
              auto b2 = b;
              b2[i] = v;
              next.push_back(b2);
            }
          betas = std::move(next);
        }
        for (const auto& beta : betas) {
          Int coef = 1;
          for (size_t i = 0; i < d; ++i) coef *= binom(dt.deriv[i], beta[i]);
          MultiPoly df = multi_derivative(f, beta);
          if (df.is_zero()) continue;
          std::vector<int> rest(d);
          for (size_t i = 0; i < d; ++i) rest[i] = dt.deriv[i] - beta[i];
          Rat sgn = multi_abs(beta) % 2 == 0 ? Rat(coef) : -Rat(coef);
          nrow.push_back({(dt.coeff * df).scaled(Cyclotomic(sgn)), rest});
        }
      }
      op.table.push_back(std::move(nrow));
    }
    out.terms.push_back({t.face, op});
  }
  return out;
}

RDistribution rdist_mul_periodic(const RDistribution& a, const Rat& turn_per_k) {
  Int den = rat_den(turn_per_k);
  if (den == 1) return a;
  RDistribution out;
  out.dim = a.dim;
  for (const auto& t : a.terms) {
    PeriodicDiffOp op = t.op.with_period(int_lcm(t.op.period, den));
    for (size_t r = 0; r < op.table.size(); ++r) {
      Cyclotomic z = Cyclotomic::from_turn(turn_per_k * Rat(static_cast<long>(r)));
      for (auto& dt : op.table[r]) dt.coeff = dt.coeff.scaled(z);
    }
    out.terms.push_back({t.face, op});
  }
  return out;
}

Cyclotomic rdist_pair_poly(const RDistribution& psi, const Int& k, const MultiPoly& phi) {
  Cyclotomic sum;
  for (const auto& t : psi.terms) {
    for (const auto& dt : t.op.at(k)) {
      MultiPoly dphi = multi_derivative(phi, dt.deriv);
      if (dphi.is_zero()) continue;
      Cyclotomic val = integrate_poly_over_polytope(dt.coeff * dphi, t.face);
      if (multi_abs(dt.deriv) % 2 == 1) val = -val;
      sum += val;
    }
  }
  return sum;
}

AsymptoticSeries AsymptoticSeries::normalized() const {
  AsymptoticSeries out;
  out.dim = dim;
  out.s = s;
  for (const auto& t : theta) out.theta.push_back(t.normalized());
  return out;
}

AsymptoticSeries AsymptoticSeries::aligned() const {
  AsymptoticSeries out = normalized();
  while (out.theta.size() > 1 && out.theta.front().terms.empty()) {
    out.theta.erase(out.theta.begin());
    out.s -= 1;
  }
  return out;
}

AsymptoticSeries series_add(const AsymptoticSeries& a, const AsymptoticSeries& b) {
  if (a.theta.empty()) return b;
  if (b.theta.empty()) return a;
  // common leading exponent and span of gradings
  long top = std::max(a.s, b.s);
  long bottom = std::min(a.s - a.order(), b.s - b.order());
  AsymptoticSeries out;
  out.dim = a.dim ? a.dim : b.dim;
  out.s = top;
  for (long g = top; g >= bottom; --g) {
    RDistribution acc;
    acc.dim = out.dim;
    long na = a.s - g, nb = b.s - g;
    if (na >= 0 && na <= a.order()) acc = rdist_add(acc, a.theta[static_cast<size_t>(na)]);
    if (nb >= 0 && nb <= b.order()) acc = rdist_add(acc, b.theta[static_cast<size_t>(nb)]);
    out.theta.push_back(acc);
  }
  return out;
}

AsymptoticSeries series_scale_const(const AsymptoticSeries& a, const Cyclotomic& c) {
  AsymptoticSeries out = a;
  for (auto& t : out.theta) t = rdist_scale(t, c);
  return out;
}

Cyclotomic series_pair_poly(const AsymptoticSeries& a, const Int& k, const MultiPoly& phi) {
  if (k < 1) throw std::invalid_argument("series_pair_poly: k must be positive");
  Cyclotomic sum;
  for (size_t n = 0; n < a.theta.size(); ++n) {
    long e = a.s - static_cast<long>(n);
    Rat kp = 1;
    if (e >= 0)
      for (long i = 0; i < e; ++i) kp *= Rat(k);
    else
      for (long i = 0; i < -e; ++i) kp /= Rat(k);
    sum += rdist_pair_poly(a.theta[n], k, phi).scaled(kp);
  }
  return sum;
}

AsymptoticSeries series_translate(const AsymptoticSeries& a, const QVec& sigma) {
  AsymptoticSeries out;
  out.dim = a.dim;
  out.s = a.s;
  out.theta.assign(a.theta.size(), RDistribution{a.dim, {}});
  for (size_t n = 0; n < a.theta.size(); ++n) {
    RDistribution cur = a.theta[n];
    Rat fact = 1;
    for (size_t j = 0; n + j < a.theta.size(); ++j) {
      if (j > 0) {
        cur = rdist_derivative(cur, sigma);
        fact *= Rat(static_cast<long>(j));
      }
      Rat c = (j % 2 == 0) ? Rat(1) / fact : -Rat(1) / fact;
      out.theta[n + j] = rdist_add(out.theta[n + j], rdist_scale(cur, Cyclotomic(c)));
    }
  }
  return out;
}

AsymptoticSeries series_scale(const AsymptoticSeries& a, const QuasiPolynomial& h) {
  size_t d = a.dim;
  if (h.dim() != d) throw std::invalid_argument("series_scale: dimension mismatch");
  // h(k, k v): substitute lambda_i -> k v_i, then split into k-powers with
  // periodic twists; characters must be trivial.
  struct Part {
    Rat u;
    int t;
    MultiPoly poly;  // in v (d vars)
  };
  std::vector<Part> parts;
  int tmax = 0;
  for (const auto& [key, p] : h.terms()) {
    if (!key.second.is_trivial())
      throw std::invalid_argument("series_scale: nontrivial lattice character in multiplier");
    std::vector<MultiPoly> subs;
    MultiPoly kv = MultiPoly::variable(d + 1, 0);
    subs.push_back(kv);
    for (size_t i = 0; i < d; ++i) subs.push_back(kv * MultiPoly::variable(d + 1, i + 1));
    MultiPoly sub = p.compose(subs);
    std::map<int, MultiPoly> byt;
    for (const auto& [e, c] : sub.terms()) {
      MultiPoly::Exponent e2(e.begin() + 1, e.end());
      auto it = byt.find(e[0]);
      if (it == byt.end()) {
        MultiPoly mp(d);
        mp.add_term(e2, c);
        byt.emplace(e[0], std::move(mp));
      } else {
        it->second.add_term(e2, c);
      }
    }
    for (auto& [t, poly] : byt) {
      parts.push_back({key.first, t, poly});
      tmax = std::max(tmax, t);
    }
  }
  AsymptoticSeries out;
  out.dim = d;
  out.s = a.s + tmax;
  long new_order = a.order() + tmax;
  out.theta.assign(static_cast<size_t>(new_order) + 1, RDistribution{d, {}});
  for (const auto& part : parts) {
    for (size_t n = 0; n < a.theta.size(); ++n) {
      // grading (a.s - n) + t = out.s - n'
      long np = static_cast<long>(n) + (tmax - part.t);
      RDistribution contrib = rdist_mul_poly(a.theta[n], part.poly);
      contrib = rdist_mul_periodic(contrib, part.u);
      out.theta[static_cast<size_t>(np)] = rdist_add(out.theta[static_cast<size_t>(np)], contrib);
    }
  }
  return out;
}

}  // namespace asq
