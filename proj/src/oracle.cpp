#include <asq/oracle.hpp>

#include <asq/expansion.hpp>

#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace asq {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::complex<double> to_complex(const Cyclotomic& c) {
  std::complex<double> total = 0.0;
  long level = c.level();
  const std::vector<Rat>& cs = c.coeffs();
  for (size_t t = 0; t < cs.size(); ++t) {
    if (cs[t] == 0) continue;
    double x = static_cast<double>(rat_num(cs[t])) / static_cast<double>(rat_den(cs[t]));
    double ang = 2.0 * kPi * static_cast<double>(t) / static_cast<double>(level);
    total += x * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return total;
}

std::complex<double> poly_eval_numeric(const MultiPoly& p, const std::vector<double>& x) {
  std::complex<double> total = 0.0;
  for (const auto& [e, c] : p.terms()) {
    std::complex<double> t = to_complex(c);
    for (size_t i = 0; i < x.size(); ++i)
      for (int j = 0; j < e[i]; ++j) t *= x[i];
    total += t;
  }
  return total;
}

// n-th derivative along one axis by a central stencil of the binomial type,
// improved by one Richardson step.  The step grows with the order to keep
// round-off amplification 1/h^n under control.
double axis_step(int order) {
  double h = 1e-5 * std::pow(20.0, order - 1);
  return std::min(h, 1e-2);
}

double stencil(const SmoothFn& f, std::vector<double> x, size_t axis, int order, double h) {
  if (order == 0) return f(x);
  double total = 0.0, sign = 1.0, binom = 1.0;
  double base = x[axis];
  for (int j = 0; j <= order; ++j) {
    x[axis] = base + (order / 2.0 - j) * h;
    total += sign * binom * f(x);
    sign = -sign;
    binom = binom * (order - j) / (j + 1);
  }
  x[axis] = base;
  return total / std::pow(h, order);
}

double axis_derivative(const SmoothFn& f, const std::vector<double>& x, size_t axis, int order) {
  if (order == 0) return f(x);
  double h = axis_step(order);
  double coarse = stencil(f, x, axis, order, h);
  double fine = stencil(f, x, axis, order, h / 2);
  return (4.0 * fine - coarse) / 3.0;  // cancels the O(h^2) error term
}

double partial_derivative(const SmoothFn& f, const std::vector<double>& x,
                          const std::vector<int>& alpha) {
  size_t axis = alpha.size();
  for (size_t i = 0; i < alpha.size(); ++i)
    if (alpha[i] > 0) {
      axis = i;
      break;
    }
  if (axis == alpha.size()) return f(x);
  std::vector<int> rest = alpha;
  rest[axis] = 0;
  SmoothFn inner = [&](const std::vector<double>& y) { return partial_derivative(f, y, rest); };
  return axis_derivative(inner, x, axis, alpha[axis]);
}

std::vector<double> qvec_to_doubles(const QVec& v) {
  std::vector<double> r(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    r[i] = static_cast<double>(rat_num(v[i])) / static_cast<double>(rat_den(v[i]));
  return r;
}

// Numeric pairing <p d^a delta_F, phi> = (-1)^|a| int_F p d^a phi dmu_F for
// faces of dimension 0 or 1 (composite Simpson in lattice arc length).
std::complex<double> rterm_pair_numeric(const RTerm& term, const Int& k, const SmoothFn& phi) {
  std::complex<double> total = 0.0;
  size_t fdim = term.face.affine_dim();
  if (fdim > 1)
    throw std::invalid_argument("remainder_table: numeric pairing supports faces of dim <= 1");

  for (const DiffTerm& dt : term.op.at(k)) {
    int order = 0;
    for (int a : dt.deriv) order += a;
    double sign = (order % 2 == 0) ? 1.0 : -1.0;

    if (fdim == 0) {
      std::vector<double> x = qvec_to_doubles(term.face.find_point());
      total += sign * poly_eval_numeric(dt.coeff, x) * partial_derivative(phi, x, dt.deriv);
      continue;
    }

    std::vector<QVec> vs = term.face.vertices();
    if (vs.size() != 2) throw std::invalid_argument("remainder_table: face is not a segment");
    QVec dir = qvec_sub(vs[1], vs[0]);
    IVec prim = primitive_vector(dir);
    // Lattice length: dir = len * primitive direction.
    Rat len = 0;
    for (size_t i = 0; i < dir.size(); ++i)
      if (prim[i] != 0) {
        len = dir[i] / Rat(prim[i]);
        break;
      }
    double measure = static_cast<double>(rat_num(len)) / static_cast<double>(rat_den(len));
    std::vector<double> a = qvec_to_doubles(vs[0]), b = qvec_to_doubles(vs[1]);

    const int n = 200;  // Simpson panels (even count of subintervals)
    std::complex<double> integral = 0.0;
    for (int j = 0; j <= n; ++j) {
      double u = static_cast<double>(j) / n;
      std::vector<double> x(a.size());
      for (size_t i = 0; i < x.size(); ++i) x[i] = a[i] + u * (b[i] - a[i]);
      double w = (j == 0 || j == n) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
      integral += w * poly_eval_numeric(dt.coeff, x) * partial_derivative(phi, x, dt.deriv);
    }
    integral *= measure / (3.0 * n);
    total += sign * integral;
  }
  return total;
}

std::complex<double> series_pair_numeric(const AsymptoticSeries& a, const Int& k,
                                         const SmoothFn& phi) {
  double kd = static_cast<double>(k);
  std::complex<double> total = 0.0;
  for (long n = 0; n <= a.order(); ++n) {
    std::complex<double> coeff = 0.0;
    for (const RTerm& t : a.theta[static_cast<size_t>(n)].terms)
      coeff += rterm_pair_numeric(t, k, phi);
    total += std::pow(kd, static_cast<double>(a.s - n)) * coeff;
  }
  return total;
}

std::complex<double> theta_pair_numeric(const PiecewiseQP& m, const Int& k, const SmoothFn& phi) {
  std::complex<double> total = 0.0;
  double kd = static_cast<double>(k);
  for (const QPPiece& piece : m.pieces()) {
    Polyhedron support(m.dim());
    for (const Inequality& in : piece.cone.base.ineqs())
      support.add_ineq(in.a, Rat(k) * in.c + qvec_dot(in.a, piece.cone.shift));
    if (support.is_empty()) continue;
    for (const IVec& lam : enumerate_lattice_points(support)) {
      std::vector<double> x(lam.size());
      for (size_t i = 0; i < lam.size(); ++i) x[i] = static_cast<double>(lam[i]) / kd;
      total += to_complex(piece.q.evaluate(k, lam)) * phi(x);
    }
  }
  return total;
}

}  // namespace

Cyclotomic oracle_theta_pair(const PiecewiseQP& m, const Int& k, const MultiPoly& phi,
                             const WindowBox& window) {
  if (k <= 0) throw std::invalid_argument("oracle_theta_pair: k must be positive");
  size_t d = m.dim();
  if (window.dim() != d || phi.nvars() != d)
    throw std::invalid_argument("oracle_theta_pair: dimension mismatch");

  // Direct double loop: integer points of the scaled window, then pieces.
  IVec lo(d), hi(d), cur(d);
  for (size_t i = 0; i < d; ++i) {
    lo[i] = rat_ceil(Rat(k) * window.lo[i]);
    hi[i] = rat_floor(Rat(k) * window.hi[i]);
    if (lo[i] > hi[i]) return Cyclotomic();
  }
  cur = lo;
  Cyclotomic total;
  while (true) {
    QVec v(d);
    for (size_t i = 0; i < d; ++i) v[i] = Rat(cur[i]) / Rat(k);
    if (window.contains(v)) {
      Cyclotomic weight;
      for (const QPPiece& piece : m.pieces()) {
        bool inside = true;
        for (const Inequality& in : piece.cone.base.ineqs()) {
          Rat lhs = 0;
          for (size_t i = 0; i < d; ++i) lhs += in.a[i] * Rat(cur[i]);
          if (lhs < Rat(k) * in.c + qvec_dot(in.a, piece.cone.shift)) inside = false;
        }
        if (inside) weight += piece.q.evaluate(k, cur);
      }
      if (!weight.is_zero()) total += weight * phi.evaluate(v);
    }
    size_t i = 0;
    while (i < d && cur[i] == hi[i]) {
      cur[i] = lo[i];
      ++i;
    }
    if (i == d) break;
    ++cur[i];
  }
  return total.reduced();
}

std::string RemainderReport::to_string() const {
  std::ostringstream os;
  os << "truncation order N = " << order << "\n";
  os << "precision: " << precision << "\n";
  os << "k\tscaled remainder |<Theta,phi> - <A_N,phi>| * k^(N-s)\n";
  for (size_t i = 0; i < ks.size(); ++i) os << ks[i] << "\t" << scaled_remainder[i] << "\n";
  os << "verdict: " << (bounded ? "bounded" : "unbounded trend") << "\n";
  return os.str();
}

RemainderReport remainder_table(const PiecewiseQP& m, const SmoothFn& phi, long n_order,
                                const std::vector<Int>& ks) {
  RemainderReport report;
  report.order = n_order;
  report.precision =
      "IEEE-754 binary64; derivatives by order-n central stencils with base step 1e-5 "
      "(scaled up with the order) and one Richardson step; segment integrals by "
      "composite Simpson with 200 panels";
  report.ks = ks;

  AsymptoticSeries a = expand(m, n_order).aligned();
  for (const Int& k : ks) {
    std::complex<double> exact = theta_pair_numeric(m, k, phi);
    std::complex<double> truncated = series_pair_numeric(a, k, phi);
    double diff = std::abs(exact - truncated);
    double scale = std::pow(static_cast<double>(k), static_cast<double>(n_order - a.s));
    report.scaled_remainder.push_back(diff * scale);
  }

  // Bounded verdict: not monotonically growing past a 2x band.
  bool monotone = report.scaled_remainder.size() >= 2;
  for (size_t i = 0; i + 1 < report.scaled_remainder.size(); ++i)
    if (report.scaled_remainder[i + 1] <= report.scaled_remainder[i]) monotone = false;
  bool beyond_band = !report.scaled_remainder.empty() &&
                     report.scaled_remainder.back() > 2.0 * report.scaled_remainder.front() &&
                     report.scaled_remainder.back() > 1e-6;  // float-noise floor
  report.bounded = !(monotone && beyond_band);
  return report;
}

GenfuncCheck genfunc_crosscheck(const std::vector<QVec>& rays, const Character& g,
                                const std::vector<std::complex<double>>& z, const Int& k,
                                long n_order) {
  if (rays.empty()) throw std::invalid_argument("genfunc_crosscheck: no rays");
  double kd = static_cast<double>(k);
  const std::complex<double> iu(0.0, 1.0);

  GenfuncCheck out;
  out.closed_form = 1.0;
  out.laurent = 1.0;
  for (const QVec& ray : rays) {
    std::complex<double> w = 0.0;
    for (size_t i = 0; i < ray.size(); ++i)
      w += (static_cast<double>(rat_num(ray[i])) / static_cast<double>(rat_den(ray[i]))) * z[i];
    if (w.imag() >= 0.0)
      throw std::invalid_argument("genfunc_crosscheck: Im<ray,z> must be negative");
    w /= kd;

    Rat turn = rat_frac(qvec_dot(g.value, ray));
    std::complex<double> zeta = to_complex(Cyclotomic::from_turn(turn));

    std::complex<double> den = 1.0 - zeta * std::exp(-iu * w);
    if (std::abs(den) < 1e-12) throw std::domain_error("genfunc_crosscheck: z is on a pole");
    out.closed_form /= den;

    // (1/(i w)) sum_n B_{n,zeta}(0) / n! * (-i w)^n, truncated at n_order + 1.
    std::complex<double> factor = 0.0;
    for (long n = 0; n <= n_order + 1; ++n) {
      Cyclotomic bn = zeta_bernoulli(n, turn).evaluate({Rat(0)});
      if (bn.is_zero()) continue;
      double fact = 1.0;
      for (long j = 2; j <= n; ++j) fact *= j;
      std::complex<double> pw = 1.0;
      for (long j = 0; j < n; ++j) pw *= -iu * w;
      factor += to_complex(bn) / fact * pw;
    }
    factor /= iu * w;
    out.laurent *= factor;
  }
  out.difference = std::abs(out.closed_form - out.laurent);
  return out;
}

std::vector<Character> default_unicity_gset(const PiecewiseQP& m) {
  Int den = 1;
  for (const QPPiece& piece : m.pieces()) {
    den = int_lcm(den, piece.q.twist_denominator_lcm());
    den = int_lcm(den, lcm_of_denominators(piece.cone.shift));
  }
  den *= 2;
  long d_long = static_cast<long>(den);
  size_t d = m.dim();

  std::vector<Character> out;
  QVec cur = qvec_zero(d);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == d) {
      out.push_back(Character(cur));
      return;
    }
    for (long t = 0; t < d_long; ++t) {
      cur[i] = Rat(t, d_long);
      rec(i + 1);
    }
    cur[i] = 0;
  };
  rec(0);
  return out;
}

UnicityResult unicity_probe(const PiecewiseQP& m, const std::vector<Character>& g_set,
                            long n_order) {
  UnicityResult out;
  for (const Character& g : g_set) {
    if (!series_is_zero(expand(pqp_twist(m, g), n_order))) {
      out.found = true;
      out.witness = g;
      return out;
    }
  }
  return out;
}

UnicityResult unicity_probe(const PiecewiseQP& m, long n_order) {
  return unicity_probe(m, default_unicity_gset(m), n_order);
}

}  // namespace asq
