#include <asq/quasipoly.hpp>

#include <set>
#include <stdexcept>

namespace asq {

Character::Character(QVec v) : value(std::move(v)) {
  for (Rat& x : value) x = rat_frac(x);
}

Cyclotomic Character::pow(const QVec& lambda) const {
  if (lambda.size() != value.size())
    throw std::invalid_argument("Character::pow: dimension mismatch");
  return Cyclotomic::from_turn(qvec_dot(value, lambda));
}

Character Character::inverse() const {
  QVec v = value;
  for (Rat& x : v) x = -x;
  return Character(std::move(v));
}

Character Character::operator*(const Character& other) const {
  return Character(qvec_add(value, other.value));
}

bool Character::trivial_on(const IMat& lattice_rows) const {
  for (const auto& row : lattice_rows) {
    Rat s = 0;
    for (size_t i = 0; i < row.size(); ++i) s += value[i] * Rat(row[i]);
    if (!rat_is_int(s)) return false;
  }
  return true;
}

QuasiPolynomial QuasiPolynomial::from_poly(size_t dim, const MultiPoly& p) {
  return term(dim, Rat(0), Character::trivial(dim), p);
}

QuasiPolynomial QuasiPolynomial::term(size_t dim, const Rat& u, const Character& g,
                                      const MultiPoly& p) {
  QuasiPolynomial q(dim);
  q.add_term(u, g, p);
  return q;
}

QuasiPolynomial QuasiPolynomial::constant(size_t dim, const Cyclotomic& c) {
  return from_poly(dim, MultiPoly::constant(dim + 1, c));
}

void QuasiPolynomial::add_term(const Rat& u, const Character& g, const MultiPoly& p) {
  if (g.dim() != dim_) throw std::invalid_argument("QuasiPolynomial: character dim mismatch");
  if (p.nvars() != dim_ + 1) throw std::invalid_argument("QuasiPolynomial: polynomial arity");
  if (p.is_zero()) return;
  Key key(rat_frac(u), g);
  auto it = terms_.find(key);
  if (it == terms_.end()) {
    terms_.emplace(std::move(key), p);
  } else {
    it->second += p;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

QuasiPolynomial QuasiPolynomial::operator-() const {
  QuasiPolynomial r(dim_);
  for (const auto& [key, p] : terms_) r.terms_.emplace(key, -p);
  return r;
}

QuasiPolynomial operator+(const QuasiPolynomial& a, const QuasiPolynomial& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("QuasiPolynomial: dim mismatch");
  QuasiPolynomial r = a;
  for (const auto& [key, p] : b.terms_) r.add_term(key.first, key.second, p);
  return r;
}

QuasiPolynomial operator-(const QuasiPolynomial& a, const QuasiPolynomial& b) { return a + (-b); }

QuasiPolynomial operator*(const QuasiPolynomial& a, const QuasiPolynomial& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("QuasiPolynomial: dim mismatch");
  QuasiPolynomial r(a.dim_);
  for (const auto& [ka, pa] : a.terms_)
    for (const auto& [kb, pb] : b.terms_)
      r.add_term(ka.first + kb.first, ka.second * kb.second, pa * pb);
  return r;
}

QuasiPolynomial QuasiPolynomial::scaled(const Cyclotomic& c) const {
  QuasiPolynomial r(dim_);
  for (const auto& [key, p] : terms_) r.add_term(key.first, key.second, p.scaled(c));
  return r;
}

QuasiPolynomial QuasiPolynomial::twisted(const Character& g) const {
  QuasiPolynomial r(dim_);
  for (const auto& [key, p] : terms_) r.add_term(key.first, key.second * g, p);
  return r;
}

Cyclotomic QuasiPolynomial::evaluate(const Int& k, const QVec& lambda) const {
  if (lambda.size() != dim_) throw std::invalid_argument("QuasiPolynomial::evaluate: dim");
  QVec point;
  point.reserve(dim_ + 1);
  point.push_back(Rat(k));
  for (const Rat& x : lambda) point.push_back(x);
  Cyclotomic sum;
  for (const auto& [key, p] : terms_) {
    Cyclotomic factor = Cyclotomic::from_turn(key.first * Rat(k)) * key.second.pow(lambda);
    sum += factor * p.evaluate(point);
  }
  return sum;
}

Cyclotomic QuasiPolynomial::evaluate(const Int& k, const IVec& lambda) const {
  QVec l;
  l.reserve(lambda.size());
  for (const Int& x : lambda) l.push_back(Rat(x));
  return evaluate(k, l);
}

int QuasiPolynomial::lambda_degree() const {
  std::vector<size_t> vars;
  for (size_t i = 1; i <= dim_; ++i) vars.push_back(i);
  int d = -1;
  for (const auto& [key, p] : terms_) d = std::max(d, p.degree_in_vars(vars));
  return d;
}

int QuasiPolynomial::k_degree() const {
  int d = -1;
  for (const auto& [key, p] : terms_) d = std::max(d, p.degree_in(0));
  return d;
}

Int QuasiPolynomial::twist_denominator_lcm() const {
  Int l = 1;
  for (const auto& [key, p] : terms_) {
    l = int_lcm(l, rat_den(key.first));
    for (const Rat& x : key.second.value) l = int_lcm(l, rat_den(x));
  }
  return l;
}

std::string QuasiPolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::vector<std::string> names = {"k"};
  for (size_t i = 1; i <= dim_; ++i) names.push_back("l" + std::to_string(i));
  std::string s;
  for (const auto& [key, p] : terms_) {
    if (!s.empty()) s += " + ";
    std::string prefix;
    if (key.first != 0) prefix += "e(" + rat_to_string(key.first) + "*k)*";
    if (!key.second.is_trivial()) prefix += "e(<" + qvec_to_string(key.second.value) + ",l>)*";
    s += prefix + "(" + p.to_string(names) + ")";
  }
  return s;
}

QuasiPolynomial qp_translate(const QuasiPolynomial& q, const IVec& sigma) {
  if (sigma.size() != q.dim()) throw std::invalid_argument("qp_translate: dim mismatch");
  size_t d = q.dim();
  QVec sq;
  std::vector<MultiPoly> subs;
  subs.push_back(MultiPoly::variable(d + 1, 0));
  for (size_t i = 0; i < d; ++i) {
    sq.push_back(Rat(sigma[i]));
    subs.push_back(MultiPoly::variable(d + 1, i + 1) -
                   MultiPoly::constant(d + 1, Rat(sigma[i])));
  }
  QuasiPolynomial r(d);
  for (const auto& [key, p] : q.terms()) {
    // g^{lambda - sigma} = g^{-sigma} g^lambda
    Cyclotomic scale = key.second.inverse().pow(sq);
    r.add_term(key.first, key.second, p.compose(subs).scaled(scale));
  }
  return r;
}

QuasiPolynomial qp_difference(const QuasiPolynomial& q, const IVec& eta, const Rat& zeta_turn) {
  bool all_zero = true;
  for (const Int& x : eta)
    if (x != 0) all_zero = false;
  if (all_zero && !q.is_zero()) {
    // Degenerate but well-defined: q - zeta q.
  }
  return q - qp_translate(q, eta).scaled(Cyclotomic::from_turn(zeta_turn));
}

QuasiPolynomial qp_character_decompose(size_t dim, const IMat& sublattice,
                                       const std::vector<std::pair<IVec, MultiPoly>>& cosets) {
  size_t n = dim + 1;
  if (sublattice.size() != n)
    throw std::invalid_argument("qp_character_decompose: sublattice must have full rank");
  QMat b(n, QVec(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) b[i][j] = Rat(sublattice[i][j]);
  auto binv = mat_inverse(b);
  if (!binv) throw std::invalid_argument("qp_character_decompose: singular sublattice");

  // Dual group of Z^n / Gamma': generated mod 1 by the columns of B^{-1}.
  std::set<QVec> group;
  group.insert(qvec_zero(n));
  std::vector<QVec> gens;
  for (size_t j = 0; j < n; ++j) {
    QVec col(n);
    for (size_t i = 0; i < n; ++i) col[i] = rat_frac((*binv)[i][j]);
    gens.push_back(col);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<QVec> current(group.begin(), group.end());
    for (const auto& x : current)
      for (const auto& g : gens) {
        QVec s = qvec_add(x, g);
        for (Rat& r : s) r = rat_frac(r);
        if (group.insert(s).second) grew = true;
      }
  }
  size_t order = group.size();

  // Coset representatives must be pairwise distinct mod Gamma' and cover.
  if (cosets.size() != order)
    throw std::invalid_argument("qp_character_decompose: wrong number of cosets");
  QMat bt = mat_transpose(b);
  auto in_sublattice = [&](const IVec& v) {
    QVec rhs(n);
    for (size_t i = 0; i < n; ++i) rhs[i] = Rat(v[i]);
    auto sol = solve_linear(bt, rhs);
    if (!sol) return false;
    for (const Rat& x : *sol)
      if (!rat_is_int(x)) return false;
    return true;
  };
  for (size_t i = 0; i < cosets.size(); ++i) {
    if (cosets[i].second.nvars() != n)
      throw std::invalid_argument("qp_character_decompose: polynomial arity");
    for (size_t j = i + 1; j < cosets.size(); ++j) {
      IVec diff(n);
      for (size_t t = 0; t < n; ++t) diff[t] = cosets[i].first[t] - cosets[j].first[t];
      if (in_sublattice(diff))
        throw std::invalid_argument("qp_character_decompose: overlapping cosets");
    }
  }

  // q(gamma) = sum_g g^{-gamma} q_g(gamma), q_g = (1/N) sum_mu g^mu q_mu.
  QuasiPolynomial result(dim);
  for (const QVec& y : group) {
    MultiPoly qg(n);
    for (const auto& [mu, poly] : cosets) {
      Rat t = 0;
      for (size_t i = 0; i < n; ++i) t += y[i] * Rat(mu[i]);
      qg += poly.scaled(Cyclotomic::from_turn(t).scaled(Rat(1, static_cast<long>(order))));
    }
    if (qg.is_zero()) continue;
    Rat u = rat_frac(-y[0]);
    QVec cval(dim);
    for (size_t i = 0; i < dim; ++i) cval[i] = rat_frac(-y[i + 1]);
    result.add_term(u, Character(cval), qg);
  }
  return result;
}

bool PolynomialPart::index_contains(const Int& k) const {
  if (index_empty) return false;
  return (k - k0) % n0 == 0;
}

Cyclotomic PolynomialPart::evaluate(const Int& k, const QVec& v) const {
  if (!index_contains(k)) return Cyclotomic();
  return part.evaluate(k, v);
}

PolynomialPart qp_polynomial_part(const QuasiPolynomial& q, const AffineSubspace& a,
                                  const QVec& sigma) {
  size_t d = q.dim();
  if (a.ambient_dim() != d || sigma.size() != d)
    throw std::invalid_argument("qp_polynomial_part: dimension mismatch");
  PolynomialPart out;
  out.part = QuasiPolynomial(d);

  IMat lat = saturate_lattice(a.basis, d);  // basis of lin(A) cap Z^d
  size_t r = lat.size();
  IMat comp = hermite_complement(lat, d);  // rows: complement R basis
  // Coordinates w.r.t. the combined basis; phi = the last d-r coordinates.
  QMat m(d, QVec(d));
  for (size_t j = 0; j < r; ++j)
    for (size_t i = 0; i < d; ++i) m[i][j] = Rat(lat[j][i]);
  for (size_t j = 0; j < d - r; ++j)
    for (size_t i = 0; i < d; ++i) m[i][r + j] = Rat(comp[j][i]);
  auto minv = mat_inverse(m);
  if (!minv) throw std::invalid_argument("qp_polynomial_part: affine subspace not rational");
  auto phi = [&](const QVec& x) {
    QVec full = mat_vec(*minv, x);
    return QVec(full.begin() + static_cast<long>(r), full.end());
  };

  QVec xi = phi(a.point), nu = phi(sigma);
  Int n0 = 1;
  for (const Rat& x : xi) n0 = int_lcm(n0, rat_den(x));
  Int k0 = 0;
  bool found = false;
  for (Int k = 1; k <= n0; ++k) {
    bool ok = true;
    for (size_t i = 0; i < xi.size(); ++i)
      if (!rat_is_int(Rat(k) * xi[i] + nu[i])) ok = false;
    if (ok) {
      k0 = k;
      found = true;
      break;
    }
  }
  if (!found) {
    out.index_empty = true;
    return out;
  }
  out.k0 = k0;
  out.n0 = n0;
  // xi0 = R cap A; nu0 = R cap (k0 A + sigma); lambda_k = (k-k0) xi0 + nu0.
  out.xi0 = qvec_zero(d);
  out.nu0 = qvec_zero(d);
  for (size_t j = 0; j < d - r; ++j) {
    QVec rj(d);
    for (size_t i = 0; i < d; ++i) rj[i] = Rat(comp[j][i]);
    out.xi0 = qvec_add(out.xi0, qvec_scale(xi[j], rj));
    out.nu0 = qvec_add(out.nu0, qvec_scale(Rat(k0) * xi[j] + nu[j], rj));
  }
  // part(k, v) = sum over g trivial on lin(A) cap Z^d of g^{lambda_k} q_g(k, v)
  // with g^{lambda_k} = e^{2 pi i (<g,xi0> k + <g,nu0> - k0 <g,xi0>)}.
  for (const auto& [key, p] : q.terms()) {
    const Character& g = key.second;
    if (!g.trivial_on(lat)) continue;
    Rat du = qvec_dot(g.value, out.xi0);
    Cyclotomic scale = Cyclotomic::from_turn(qvec_dot(g.value, out.nu0) - Rat(k0) * du);
    out.part.add_term(key.first + du, Character::trivial(d), p.scaled(scale));
  }
  return out;
}

DegreeSplit qp_degree_split(const QuasiPolynomial& q, const Polyhedron& p, const QVec& sigma) {
  size_t d = q.dim();
  DegreeSplit out;
  out.base = qp_polynomial_part(q, p.affine_hull(), sigma);
  int deg = std::max(0, q.lambda_degree() + q.k_degree());
  out.p.assign(static_cast<size_t>(deg) + 1, QuasiPolynomial(d));
  if (out.base.index_empty) return out;
  // Substitute lambda_i -> k v_i + sigma_i and collect powers of k.
  std::vector<MultiPoly> subs;
  MultiPoly k = MultiPoly::variable(d + 1, 0);
  subs.push_back(k);
  for (size_t i = 0; i < d; ++i)
    subs.push_back(k * MultiPoly::variable(d + 1, i + 1) +
                   MultiPoly::constant(d + 1, sigma[i]));
  int maxj = 0;
  for (const auto& [key, poly] : out.base.part.terms()) {
    MultiPoly sub = poly.compose(subs);
    // Split by k-degree.
    std::map<int, MultiPoly> byj;
    for (const auto& [e, c] : sub.terms()) {
      int j = e[0];
      auto it = byj.find(j);
      if (it == byj.end()) {
        MultiPoly mp(d + 1);
        MultiPoly::Exponent e2 = e;
        e2[0] = 0;
        mp.add_term(e2, c);
        byj.emplace(j, std::move(mp));
      } else {
        MultiPoly::Exponent e2 = e;
        e2[0] = 0;
        it->second.add_term(e2, c);
      }
    }
    for (auto& [j, mp] : byj) {
      if (static_cast<size_t>(j) >= out.p.size())
        out.p.resize(static_cast<size_t>(j) + 1, QuasiPolynomial(d));
      out.p[static_cast<size_t>(j)].add_term(key.first, key.second, mp);
      maxj = std::max(maxj, j);
    }
  }
  (void)maxj;
  return out;
}

}  // namespace asq
