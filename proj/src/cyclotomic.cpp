#include <asq/cyclotomic.hpp>
#include <asq/linalg.hpp>

#include <map>
#include <mutex>
#include <stdexcept>

namespace asq {

long euler_phi(long n) {
  long result = n;
  for (long p = 2; p * p <= n; ++p) {
    if (n % p == 0) {
      while (n % p == 0) n /= p;
      result -= result / p;
    }
  }
  if (n > 1) result -= result / n;
  return result;
}

namespace {

// Exact polynomial division (constant-first coefficient vectors); remainder
// must be zero.
std::vector<Rat> poly_exact_divide(std::vector<Rat> num, const std::vector<Rat>& den) {
  while (!num.empty() && num.back() == 0) num.pop_back();
  std::vector<Rat> d = den;
  while (!d.empty() && d.back() == 0) d.pop_back();
  if (d.empty()) throw std::invalid_argument("poly_exact_divide: zero divisor");
  if (num.size() < d.size()) {
    if (!num.empty()) throw std::logic_error("poly_exact_divide: non-divisible");
    return {Rat(0)};
  }
  std::vector<Rat> q(num.size() - d.size() + 1, Rat(0));
  for (size_t i = q.size(); i-- > 0;) {
    Rat c = num[i + d.size() - 1] / d.back();
    q[i] = c;
    if (c == 0) continue;
    for (size_t j = 0; j < d.size(); ++j) num[i + j] -= c * d[j];
  }
  for (const Rat& c : num)
    if (c != 0) throw std::logic_error("poly_exact_divide: nonzero remainder");
  return q;
}

std::map<long, std::vector<Rat>>& phi_cache() {
  static std::map<long, std::vector<Rat>> cache;
  return cache;
}
std::mutex& phi_mutex() {
  static std::mutex m;
  return m;
}

std::vector<Rat> compute_cyclotomic(long n);

const std::vector<Rat>& cyclotomic_locked(long n) {
  auto it = phi_cache().find(n);
  if (it == phi_cache().end()) it = phi_cache().emplace(n, compute_cyclotomic(n)).first;
  return it->second;
}

// Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d.
std::vector<Rat> compute_cyclotomic(long n) {
  if (n == 1) return {Rat(-1), Rat(1)};
  std::vector<Rat> num(n + 1, Rat(0));
  num[0] = -1;
  num[n] = 1;
  for (long d = 1; d < n; ++d)
    if (n % d == 0) num = poly_exact_divide(num, cyclotomic_locked(d));
  return num;
}

// Remainder of `p` mod Phi_n, truncated/padded to length phi(n).
std::vector<Rat> reduce_mod_phi(std::vector<Rat> p, long n) {
  const std::vector<Rat>& phi = cyclotomic_polynomial(n);
  size_t deg = phi.size() - 1;  // = euler_phi(n)
  while (p.size() > deg) {
    Rat c = p.back();
    size_t top = p.size() - 1;
    p.pop_back();
    if (c == 0) continue;
    for (size_t j = 0; j < deg; ++j) p[top - deg + j] -= c * phi[j];
  }
  p.resize(deg, Rat(0));
  return p;
}

}  // namespace

const std::vector<Rat>& cyclotomic_polynomial(long n) {
  if (n < 1) throw std::invalid_argument("cyclotomic_polynomial: invalid level");
  std::lock_guard<std::mutex> lock(phi_mutex());
  return cyclotomic_locked(n);
}

Cyclotomic Cyclotomic::normalize(const std::vector<Rat>& raw, long level) {
  if (level < 1) throw std::invalid_argument("Cyclotomic: invalid level");
  Cyclotomic c;
  c.level_ = level;
  {
    std::lock_guard<std::mutex> lock(phi_mutex());
    cyclotomic_locked(level);  // warm cache
  }
  c.coeffs_ = reduce_mod_phi(raw, level);
  return c;
}

Cyclotomic Cyclotomic::root_of_unity(long order, const Int& exponent) {
  if (order < 1) throw std::invalid_argument("root_of_unity: invalid order");
  Int e = exponent % order;
  if (e < 0) e += order;
  std::vector<Rat> raw(static_cast<size_t>(e) + 1, Rat(0));
  raw.back() = 1;
  return normalize(raw, order);
}

bool Cyclotomic::is_zero() const {
  for (const Rat& c : coeffs_)
    if (c != 0) return false;
  return true;
}

bool Cyclotomic::is_rational() const {
  for (size_t i = 1; i < coeffs_.size(); ++i)
    if (coeffs_[i] != 0) return false;
  return true;
}

Rat Cyclotomic::rational_value() const {
  if (!is_rational()) throw std::invalid_argument("Cyclotomic: value is not rational");
  return coeffs_[0];
}

Cyclotomic Cyclotomic::lifted_to(long new_level) const {
  if (new_level == level_) return *this;
  if (new_level % level_ != 0) throw std::invalid_argument("Cyclotomic: level does not divide target");
  long step = new_level / level_;  // zeta_level = zeta_new^step
  std::vector<Rat> raw(static_cast<size_t>(coeffs_.size() - 1) * step + 1, Rat(0));
  for (size_t i = 0; i < coeffs_.size(); ++i) raw[i * step] = coeffs_[i];
  return normalize(raw, new_level);
}

Cyclotomic Cyclotomic::reduced() const {
  if (level_ == 1) return *this;
  if (is_rational()) {
    Cyclotomic c;
    c.level_ = 1;
    c.coeffs_ = {coeffs_[0]};
    return c;
  }
  // Try to descend to a maximal proper divisor level by solving for a
  // representation in the lifted power basis of the subfield.
  for (long d = level_ / 2; d >= 2; --d) {
    if (level_ % d != 0) continue;
    long pd = euler_phi(d);
    QMat cols;  // columns: lifts of zeta_d^j, j < phi(d)
    for (long j = 0; j < pd; ++j) {
      Cyclotomic basis = root_of_unity(d, j).lifted_to(level_);
      cols.push_back(basis.coeffs());
    }
    QMat a = mat_transpose(cols);
    auto sol = solve_linear(a, coeffs_);
    if (!sol) continue;
    // Confirm (solve_linear returns least-structured solutions for
    // underdetermined systems, so verify).
    std::vector<Rat> check(coeffs_.size(), Rat(0));
    for (long j = 0; j < pd; ++j) {
      Cyclotomic basis = root_of_unity(d, j).lifted_to(level_);
      for (size_t i = 0; i < check.size(); ++i) check[i] += (*sol)[j] * basis.coeffs()[i];
    }
    if (check != coeffs_) continue;
    Cyclotomic c;
    c.level_ = d;
    c.coeffs_ = reduce_mod_phi(*sol, d);
    return c.reduced();
  }
  return *this;
}

Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b) {
  long l = static_cast<long>(int_lcm(a.level_, b.level_));
  Cyclotomic x = a.lifted_to(l), y = b.lifted_to(l);
  for (size_t i = 0; i < x.coeffs_.size(); ++i) x.coeffs_[i] += y.coeffs_[i];
  return x;
}

Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b) { return a + (-b); }

Cyclotomic Cyclotomic::operator-() const {
  Cyclotomic c = *this;
  for (Rat& x : c.coeffs_) x = -x;
  return c;
}

Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b) {
  long l = static_cast<long>(int_lcm(a.level_, b.level_));
  Cyclotomic x = a.lifted_to(l), y = b.lifted_to(l);
  std::vector<Rat> prod(x.coeffs_.size() + y.coeffs_.size() - 1, Rat(0));
  for (size_t i = 0; i < x.coeffs_.size(); ++i) {
    if (x.coeffs_[i] == 0) continue;
    for (size_t j = 0; j < y.coeffs_.size(); ++j) prod[i + j] += x.coeffs_[i] * y.coeffs_[j];
  }
  return Cyclotomic::normalize(prod, l);
}

Cyclotomic Cyclotomic::scaled(const Rat& c) const {
  Cyclotomic r = *this;
  for (Rat& x : r.coeffs_) x *= c;
  return r;
}

Cyclotomic Cyclotomic::inverse() const {
  if (is_zero()) throw std::domain_error("Cyclotomic::inverse: zero");
  size_t n = coeffs_.size();
  // columns of the multiplication-by-*this matrix in the power basis
  QMat cols;
  for (size_t i = 0; i < n; ++i) {
    std::vector<Rat> shifted(n + i, Rat(0));
    for (size_t j = 0; j < n; ++j) shifted[i + j] = coeffs_[j];
    cols.push_back(Cyclotomic::normalize(shifted, level_).lifted_to(level_).coeffs_);
  }
  QMat m(n, QVec(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) m[j][i] = cols[i][j];
  QVec e(n, Rat(0));
  e[0] = 1;
  auto x = solve_linear(m, e);
  if (!x) throw std::domain_error("Cyclotomic::inverse: singular");
  return Cyclotomic::normalize(*x, level_);
}

bool operator==(const Cyclotomic& a, const Cyclotomic& b) {
  long l = static_cast<long>(int_lcm(a.level_, b.level_));
  return a.lifted_to(l).coeffs_ == b.lifted_to(l).coeffs_;
}

std::string Cyclotomic::to_string() const {
  Cyclotomic r = reduced();
  if (r.level_ == 1) return rat_to_string(r.coeffs_[0]);
  std::string s;
  bool first = true;
  for (size_t i = 0; i < r.coeffs_.size(); ++i) {
    if (r.coeffs_[i] == 0) continue;
    std::string term;
    if (i == 0) {
      term = rat_to_string(r.coeffs_[i]);
    } else {
      std::string z = "z" + std::to_string(r.level_) + (i > 1 ? "^" + std::to_string(i) : "");
      if (r.coeffs_[i] == 1)
        term = z;
      else if (r.coeffs_[i] == -1)
        term = "-" + z;
      else
        term = rat_to_string(r.coeffs_[i]) + "*" + z;
    }
    if (!first && term[0] != '-') s += "+";
    s += term;
    first = false;
  }
  if (first) s = "0";
  return s;
}

}  // namespace asq
