#include <asq/linalg.hpp>

#include <stdexcept>

namespace asq {

QVec mat_vec(const QMat& a, const QVec& x) {
  QVec r(a.size(), Rat(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != x.size()) throw std::invalid_argument("mat_vec: dimension mismatch");
    r[i] = qvec_dot(a[i], x);
  }
  return r;
}

QMat mat_mul(const QMat& a, const QMat& b) {
  size_t m = a.size(), n = b.empty() ? 0 : b[0].size(), inner = b.size();
  QMat r(m, QVec(n, Rat(0)));
  for (size_t i = 0; i < m; ++i) {
    if (a[i].size() != inner) throw std::invalid_argument("mat_mul: dimension mismatch");
    for (size_t k = 0; k < inner; ++k) {
      if (a[i][k] == 0) continue;
      for (size_t j = 0; j < n; ++j) r[i][j] += a[i][k] * b[k][j];
    }
  }
  return r;
}

QMat mat_transpose(const QMat& a) {
  if (a.empty()) return {};
  QMat r(a[0].size(), QVec(a.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) r[j][i] = a[i][j];
  return r;
}

QMat mat_identity(size_t n) {
  QMat r(n, QVec(n, Rat(0)));
  for (size_t i = 0; i < n; ++i) r[i][i] = 1;
  return r;
}

std::vector<size_t> rref(QMat& a) {
  std::vector<size_t> pivots;
  if (a.empty()) return pivots;
  size_t rows = a.size(), cols = a[0].size(), r = 0;
  for (size_t c = 0; c < cols && r < rows; ++c) {
    size_t p = r;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    Rat inv = Rat(1) / a[r][c];
    for (size_t j = c; j < cols; ++j) a[r][j] *= inv;
    for (size_t i = 0; i < rows; ++i) {
      if (i == r || a[i][c] == 0) continue;
      Rat f = a[i][c];
      for (size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

size_t mat_rank(QMat a) { return rref(a).size(); }

std::optional<QVec> solve_linear(const QMat& a, const QVec& b) {
  if (a.size() != b.size()) throw std::invalid_argument("solve_linear: dimension mismatch");
  if (a.empty()) return QVec{};
  size_t n = a[0].size();
  QMat aug(a.size(), QVec(n + 1));
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n] = b[i];
  }
  auto pivots = rref(aug);
  if (!pivots.empty() && pivots.back() == n) return std::nullopt;  // 0 = 1 row
  QVec x(n, Rat(0));
  for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug[r][n];
  return x;
}

std::vector<QVec> nullspace(const QMat& a) {
  if (a.empty()) return {};
  size_t n = a[0].size();
  QMat m = a;
  auto pivots = rref(m);
  std::vector<bool> is_pivot(n, false);
  for (size_t c : pivots) is_pivot[c] = true;
  std::vector<QVec> basis;
  for (size_t c = 0; c < n; ++c) {
    if (is_pivot[c]) continue;
    QVec v(n, Rat(0));
    v[c] = 1;
    for (size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -m[r][c];
    basis.push_back(v);
  }
  return basis;
}

std::optional<QMat> mat_inverse(const QMat& a) {
  size_t n = a.size();
  QMat aug(n, QVec(2 * n, Rat(0)));
  for (size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw std::invalid_argument("mat_inverse: not square");
    for (size_t j = 0; j < n; ++j) aug[i][j] = a[i][j];
    aug[i][n + i] = 1;
  }
  auto pivots = rref(aug);
  if (pivots.size() != n || pivots[n - 1] != n - 1) return std::nullopt;
  QMat inv(n, QVec(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) inv[i][j] = aug[i][n + j];
  return inv;
}

IVec primitive_vector(const QVec& v) {
  Int l = lcm_of_denominators(v);
  IVec w(v.size());
  Int g = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    w[i] = rat_num(v[i]) * (l / rat_den(v[i]));
    g = int_gcd(g, w[i]);
  }
  if (g == 0) throw std::invalid_argument("primitive_vector: zero vector");
  for (Int& x : w) x /= g;
  return w;
}

namespace {

// Row HNF elimination of `m` with an optional unimodular row-transform
// tracker `u` (same row operations applied).
void hnf_rows(IMat& m, IMat* u) {
  if (m.empty()) return;
  size_t rows = m.size(), cols = m[0].size(), r = 0;
  auto swap_rows = [&](size_t i, size_t j) {
    std::swap(m[i], m[j]);
    if (u) std::swap((*u)[i], (*u)[j]);
  };
  auto axpy = [&](size_t dst, const Int& f, size_t src) {  // row dst -= f * row src
    for (size_t j = 0; j < cols; ++j) m[dst][j] -= f * m[src][j];
    if (u)
      for (size_t j = 0; j < (*u)[dst].size(); ++j) (*u)[dst][j] -= f * (*u)[src][j];
  };
  auto negate_row = [&](size_t i) {
    for (size_t j = 0; j < cols; ++j) m[i][j] = -m[i][j];
    if (u)
      for (Int& x : (*u)[i]) x = -x;
  };
  for (size_t c = 0; c < cols && r < rows; ++c) {
    // Euclidean elimination in column c among rows r..end.
    while (true) {
      size_t best = rows;
      for (size_t i = r; i < rows; ++i) {
        if (m[i][c] == 0) continue;
        if (best == rows || abs(m[i][c]) < abs(m[best][c])) best = i;
      }
      if (best == rows) break;  // column all zero
      swap_rows(r, best);
      bool done = true;
      for (size_t i = r + 1; i < rows; ++i) {
        if (m[i][c] == 0) continue;
        Int f = m[i][c] / m[r][c];
        axpy(i, f, r);
        if (m[i][c] != 0) done = false;
      }
      if (done) break;
    }
    if (m[r][c] == 0) continue;
    if (m[r][c] < 0) negate_row(r);
    // Reduce rows above to make the HNF canonical.
    for (size_t i = 0; i < r; ++i) {
      if (m[i][c] == 0) continue;
      Int f = m[i][c] / m[r][c];
      if (m[i][c] - f * m[r][c] < 0) --f;  // floor division
      if (f != 0) axpy(i, f, r);
    }
    ++r;
  }
}

bool row_is_zero(const IVec& v) {
  for (const Int& x : v)
    if (x != 0) return false;
  return true;
}

}  // namespace

IMat lattice_basis_hnf(IMat rows) {
  hnf_rows(rows, nullptr);
  IMat basis;
  for (auto& r : rows)
    if (!row_is_zero(r)) basis.push_back(r);
  return basis;
}

IMat integer_kernel(const IMat& a) {
  if (a.empty()) return {};
  size_t n = a[0].size();
  // Rows of b are the columns of a; track the unimodular transform.
  IMat b(n, IVec(a.size(), Int(0)));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < n; ++j) b[j][i] = a[i][j];
  IMat u(n, IVec(n, Int(0)));
  for (size_t i = 0; i < n; ++i) u[i][i] = 1;
  hnf_rows(b, &u);
  IMat kernel;
  for (size_t i = 0; i < n; ++i)
    if (row_is_zero(b[i])) kernel.push_back(u[i]);
  return kernel;
}

IMat saturate_lattice(const std::vector<QVec>& gens, size_t d) {
  // Covectors vanishing on the span, cleared to integers.
  QMat g;
  for (const QVec& v : gens) {
    if (v.size() != d) throw std::invalid_argument("saturate_lattice: dimension mismatch");
    g.push_back(v);
  }
  std::vector<QVec> ann = nullspace(g.empty() ? QMat{QVec(d, Rat(0))} : g);
  if (g.empty()) return {};  // zero span
  IMat a;
  for (const QVec& c : ann) a.push_back(primitive_vector(c));
  if (a.empty()) {
    // Full span: saturation is Z^d.
    IMat id(d, IVec(d, Int(0)));
    for (size_t i = 0; i < d; ++i) id[i][i] = 1;
    return id;
  }
  return integer_kernel(a);
}

IMat hermite_complement(const IMat& b, size_t d) {
  size_t r = b.size();
  if (r == 0) {
    IMat id(d, IVec(d, Int(0)));
    for (size_t i = 0; i < d; ++i) id[i][i] = 1;
    return id;
  }
  // Row-reduce B^T (d x r) with a tracked unimodular U: U * B^T = [H; 0].
  IMat bt(d, IVec(r));
  for (size_t i = 0; i < r; ++i) {
    if (b[i].size() != d) throw std::invalid_argument("hermite_complement: dimension mismatch");
    for (size_t j = 0; j < d; ++j) bt[j][i] = b[i][j];
  }
  IMat u(d, IVec(d, Int(0)));
  for (size_t i = 0; i < d; ++i) u[i][i] = 1;
  hnf_rows(bt, &u);
  // Saturation check: the top r x r block must be unimodular.
  Int det = 1;
  for (size_t i = 0; i < r; ++i) det *= bt[i][i];
  if (abs(det) != 1)
    throw std::invalid_argument("hermite_complement: sublattice is not saturated (saturate first)");
  // B^T = U^{-1} [H; 0]; the last d-r columns of U^{-1} complement span(B).
  QMat uq(d, QVec(d));
  for (size_t i = 0; i < d; ++i)
    for (size_t j = 0; j < d; ++j) uq[i][j] = Rat(u[i][j]);
  auto inv = mat_inverse(uq);
  if (!inv) throw std::logic_error("hermite_complement: transform not invertible");
  IMat comp;
  for (size_t c = r; c < d; ++c) {
    IVec v(d);
    for (size_t i = 0; i < d; ++i) {
      if (!rat_is_int((*inv)[i][c])) throw std::logic_error("hermite_complement: non-integer inverse");
      v[i] = rat_num((*inv)[i][c]);
    }
    comp.push_back(v);
  }
  return comp;
}

}  // namespace asq
