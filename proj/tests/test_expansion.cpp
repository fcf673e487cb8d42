#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <asq/distributions.hpp>
#include <asq/expansion.hpp>

using namespace asq;

namespace {

Polyhedron interval01() { return Polyhedron::box({Rat(0)}, {Rat(1)}); }
PiecewiseQP m_unit() { return PiecewiseQP::indicator(interval01()); }

Polyhedron point_face(const QVec& a) {
  Polyhedron p(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    QVec e = qvec_zero(a.size());
    e[i] = 1;
    p.add_eq(e, a[i]);
  }
  return p;
}

RDistribution delta(const QVec& a, const Cyclotomic& w, const std::vector<int>& deriv) {
  return RDistribution{a.size(),
                       {{point_face(a), PeriodicDiffOp::single({MultiPoly::constant(a.size(), w), deriv})}}};
}

RDistribution lebesgue01() {
  return RDistribution{
      1, {{interval01(), PeriodicDiffOp::single({MultiPoly::constant(1, Rat(1)), {0}})}}};
}

// component-wise canonical comparison after alignment
void check_series_equal(const AsymptoticSeries& aa, const AsymptoticSeries& bb) {
  AsymptoticSeries a = aa.aligned(), b = bb.aligned();
  CHECK(a.dim == b.dim);
  CHECK(a.s == b.s);
  std::string zero = RDistribution{a.dim, {}}.canonical_string();
  long n = std::max(a.order(), b.order());
  for (long i = 0; i <= n; ++i) {
    std::string sa = i <= a.order() ? a.theta[static_cast<size_t>(i)].canonical_string() : zero;
    std::string sb = i <= b.order() ? b.theta[static_cast<size_t>(i)].canonical_string() : zero;
    CHECK(sa == sb);
  }
}

Rat ipow(const Rat& x, long n) {
  Rat r = 1;
  for (long i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

TEST_CASE("twisted bernoulli polynomials") {
  MultiPoly x = MultiPoly::variable(1, 0);

  // classical low-degree values
  MultiPoly b1 = zeta_bernoulli(1, Rat(0));
  CHECK(b1.evaluate({Rat(0)}) == Cyclotomic(Rat(-1, 2)));
  CHECK((b1 - (x - MultiPoly::constant(1, Rat(1, 2)))).is_zero());
  CHECK(zeta_bernoulli(2, Rat(0)).evaluate({Rat(0)}) == Cyclotomic(Rat(1, 6)));
  CHECK(zeta_bernoulli(4, Rat(0)).evaluate({Rat(0)}) == Cyclotomic(Rat(-1, 30)));
  CHECK(zeta_bernoulli(0, Rat(0)).evaluate({Rat(7)}) == Cyclotomic(Rat(1)));

  // twisted values: B_{0,zeta} = 0, B_{1,-1}(0) = -1/2
  CHECK(zeta_bernoulli(0, Rat(1, 2)).is_zero());
  CHECK(zeta_bernoulli(1, Rat(1, 2)).evaluate({Rat(0)}) == Cyclotomic(Rat(-1, 2)));

  for (long ord = 1; ord <= 6; ++ord) {
    Rat zt = Rat(1, ord);
    Cyclotomic zeta = Cyclotomic::from_turn(zt);
    for (long n = 0; n <= 12; ++n) {
      MultiPoly bn = zeta_bernoulli(n, zt);
      // difference equation: zeta B_n(x+1) - B_n(x) = n x^{n-1}
      MultiPoly shifted = bn.compose({x + MultiPoly::constant(1, Rat(1))});
      MultiPoly rhs(1);
      if (n >= 1) {
        MultiPoly xn = MultiPoly::constant(1, Rat(n));
        for (long i = 0; i < n - 1; ++i) xn = xn * x;
        rhs = xn;
      }
      CHECK((shifted.scaled(zeta) - bn - rhs).is_zero());
      // derivative ladder: B_n' = n B_{n-1}
      if (n >= 1)
        CHECK((bn.derivative(0) - zeta_bernoulli(n - 1, zt).scaled(Rat(n))).is_zero());
    }
  }

  // vanishing mean for the untwisted family: B_{n+1}(1) = B_{n+1}(0), n >= 1
  for (long n = 1; n <= 8; ++n) {
    MultiPoly b = zeta_bernoulli(n + 1, Rat(0));
    CHECK(b.evaluate({Rat(1)}) == b.evaluate({Rat(0)}));
  }
}

TEST_CASE("one-dimensional half-line expansion") {
  // untwisted at 0: k mu_{[0,oo)} + (1/2) delta_0 + (1/12 k) delta_0'
  AsymptoticSeries a = euler_maclaurin_1d(Rat(0), Rat(0), Rat(0), 2);
  CHECK(a.s == 1);
  Polyhedron ray(1);
  ray.add_ineq({Rat(1)}, Rat(0));
  RDistribution mu{1, {{ray, PeriodicDiffOp::single({MultiPoly::constant(1, Rat(1)), {0}})}}};
  CHECK(a.theta[0].canonical_string() == mu.canonical_string());
  CHECK(a.theta[1].canonical_string() == delta({Rat(0)}, Cyclotomic(Rat(1, 2)), {0}).canonical_string());
  CHECK(a.theta[2].canonical_string() == delta({Rat(0)}, Cyclotomic(Rat(1, 12)), {1}).canonical_string());

  // alternating signs: no measure term, leading coefficient is 2-periodic
  AsymptoticSeries b = euler_maclaurin_1d(Rat(0), Rat(0), Rat(1, 2), 2);
  CHECK(b.theta[0].is_zero());
  CHECK_FALSE(b.theta[1].is_zero());
  // sum_{j>=0} (-1)^j phi(j/k) = 1/2 phi(0) + O(1/k): theta_1 pairs to 1/2
  CHECK(rdist_pair_poly(b.theta[1], 5, MultiPoly::constant(1, Rat(1))) == Cyclotomic(Rat(1, 2)));

  // cross-check against the general engine on a shifted, twisted ray
  for (const Rat& s : {Rat(0), Rat(1, 2), Rat(-2, 3)}) {
    for (const Rat& zt : {Rat(0), Rat(1, 2), Rat(1, 3)}) {
      Polyhedron r2(1);
      r2.add_ineq({Rat(1)}, s);
      PiecewiseQP m(1);
      m.add_piece(QuasiPolynomial::term(1, Rat(0), Character({zt}), MultiPoly::constant(2, Rat(1))),
                  r2, qvec_zero(1));
      check_series_equal(series_truncated(euler_maclaurin_1d(s, Rat(0), zt, 3), 3), expand(m, 3));
    }
  }

  // full line: k [R] for the trivial twist, 0 otherwise
  AsymptoticSeries f = euler_maclaurin_full_line(Rat(0), 2);
  RDistribution all{1, {{Polyhedron::whole_space(1),
                         PeriodicDiffOp::single({MultiPoly::constant(1, Rat(1)), {0}})}}};
  CHECK(f.theta[0].canonical_string() == all.canonical_string());
  CHECK(series_is_zero(euler_maclaurin_full_line(Rat(1, 2), 2)));
}

TEST_CASE("affine subspaces expand exactly") {
  // whole line, weight 1 -> k [R]
  AffineSubspace line{qvec_zero(1), {QVec{Rat(1)}}};
  AsymptoticSeries a =
      expand_affine_exact(line, qvec_zero(1), QuasiPolynomial::constant(1, Cyclotomic(Rat(1))), 2);
  CHECK(a.s == 1);
  RDistribution all{1, {{Polyhedron::whole_space(1),
                         PeriodicDiffOp::single({MultiPoly::constant(1, Rat(1)), {0}})}}};
  CHECK(a.theta[0].canonical_string() == all.canonical_string());
  for (size_t n = 1; n < a.theta.size(); ++n) CHECK(a.theta[n].is_zero());

  // whole line, weight (-1)^lambda -> 0
  QuasiPolynomial alt =
      QuasiPolynomial::term(1, Rat(0), Character({Rat(1, 2)}), MultiPoly::constant(2, Rat(1)));
  CHECK(series_is_zero(expand_affine_exact(line, qvec_zero(1), alt, 2)));

  // x-axis in the plane with a twist in the transverse direction: the twist is
  // trivial on the axis lattice, so the result is k times the axis measure
  AffineSubspace axis{qvec_zero(2), {QVec{Rat(1), Rat(0)}}};
  QuasiPolynomial alt2 =
      QuasiPolynomial::term(2, Rat(0), Character({Rat(0), Rat(1, 2)}), MultiPoly::constant(3, Rat(1)));
  AsymptoticSeries b = expand_affine_exact(axis, qvec_zero(2), alt2, 2);
  Polyhedron axis_poly(2);
  axis_poly.add_eq({Rat(0), Rat(1)}, Rat(0));
  RDistribution axis_mu{
      2, {{axis_poly, PeriodicDiffOp::single({MultiPoly::constant(2, Rat(1)), {0, 0}})}}};
  CHECK(b.s == 1);
  CHECK(b.theta[0].canonical_string() == axis_mu.canonical_string());

  // shifted off the lattice: no lattice points at all -> 0
  CHECK(series_is_zero(expand_affine_exact(axis, QVec{Rat(0), Rat(1, 2)},
                                           QuasiPolynomial::constant(2, Cyclotomic(Rat(1))), 2)));

  // apex at height 1/2: populated only for even k
  AffineSubspace half{QVec{Rat(0), Rat(1, 2)}, {QVec{Rat(1), Rat(0)}}};
  AsymptoticSeries c =
      expand_affine_exact(half, qvec_zero(2), QuasiPolynomial::constant(2, Cyclotomic(Rat(1))), 2);
  MultiPoly one2 = MultiPoly::constant(2, Rat(1));
  Polyhedron box2 = Polyhedron::box({Rat(-3), Rat(-3)}, {Rat(3), Rat(3)});
  // window [-3,3]^2 at k: even k sees 6k+1 points on the line y = k/2
  CHECK(series_pair_poly_window(c, 4, one2, box2) == Cyclotomic(Rat(4 * 6)));
  CHECK(series_pair_poly_window(c, 5, one2, box2).is_zero());
}

TEST_CASE("interval family expands to the two-sided euler-maclaurin series") {
  AsymptoticSeries a = expand(m_unit(), 3);
  AsymptoticSeries expect;
  expect.dim = 1;
  expect.s = 1;
  expect.theta = {lebesgue01(),
                  rdist_add(delta({Rat(0)}, Cyclotomic(Rat(1, 2)), {0}),
                            delta({Rat(1)}, Cyclotomic(Rat(1, 2)), {0})),
                  rdist_add(delta({Rat(0)}, Cyclotomic(Rat(1, 12)), {1}),
                            delta({Rat(1)}, Cyclotomic(Rat(-1, 12)), {1})),
                  RDistribution{1, {}}};
  check_series_equal(a, expect);
  CHECK(expand_with_diagnostics(m_unit(), 3).warnings.empty());

  // pairing is exact for polynomial test functions once the order passes the degree
  std::vector<MultiPoly> phis = {MultiPoly::constant(1, Rat(1)), MultiPoly::variable(1, 0),
                                 MultiPoly::variable(1, 0) * MultiPoly::variable(1, 0)};
  AsymptoticSeries a4 = expand(m_unit(), 4);
  for (long k = 1; k <= 8; ++k)
    for (const auto& phi : phis)
      CHECK(series_pair_poly(a4, k, phi) == theta_pair_poly(m_unit(), k, phi));
}

TEST_CASE("weighted interval: leading term and truncated totals") {
  // weight lambda + 1 on 0 <= lambda <= k
  QuasiPolynomial q = QuasiPolynomial::from_poly(
      1, MultiPoly::variable(2, 1) + MultiPoly::constant(2, Rat(1)));
  PiecewiseQP m3(1);
  m3.add_piece(q, interval01(), qvec_zero(1));

  LeadingTerm lt = leading_term(m3);
  CHECK(lt.s == 2);
  RDistribution vmu{1, {{interval01(),
                         PeriodicDiffOp::single({MultiPoly::variable(1, 0), {0}})}}};
  CHECK(lt.theta0.canonical_string() == vmu.canonical_string());

  AsymptoticSeries a = expand(m3, 3);
  CHECK(a.aligned().s == 2);
  // k^2 (v mu) + k (mu + 1/2 delta_1) + ...: first two orders at k = 4 give 14
  MultiPoly one = MultiPoly::constant(1, Rat(1));
  CHECK(series_pair_poly(series_truncated(a.aligned(), 1), 4, one) == Cyclotomic(Rat(14)));
  // the full expansion is exact: sum_{j=0}^{k}(j+1) = (k+1)(k+2)/2
  for (long k = 1; k <= 8; ++k)
    CHECK(series_pair_poly(a, k, one) == Cyclotomic(Rat((k + 1) * (k + 2), 2)));
  CHECK(series_pair_poly(a, 4, one) == theta_pair_poly(m3, 4, one));
}

TEST_CASE("alternating weights on an interval") {
  PiecewiseQP tw = pqp_twist(m_unit(), Character({Rat(1, 2)}));
  AsymptoticSeries a = expand(tw, 3);
  // sum_{j=0}^{k} (-1)^j phi(j/k): order k^0, no measure term
  CHECK(a.aligned().s == 0);
  std::vector<MultiPoly> phis = {MultiPoly::constant(1, Rat(1)), MultiPoly::variable(1, 0),
                                 MultiPoly::variable(1, 0) * MultiPoly::variable(1, 0)};
  for (long k = 1; k <= 8; ++k)
    for (const auto& phi : phis)
      CHECK(series_pair_poly(expand(tw, 4), k, phi) == theta_pair_poly(tw, k, phi));
}

TEST_CASE("fractional vertex") {
  // 0 <= lambda <= k/2: floor(k/2)+1 points
  PiecewiseQP m = PiecewiseQP::indicator(Polyhedron::box({Rat(0)}, {Rat(1, 2)}));
  AsymptoticSeries a = expand(m, 3);
  std::vector<MultiPoly> phis = {MultiPoly::constant(1, Rat(1)), MultiPoly::variable(1, 0)};
  for (long k = 1; k <= 9; ++k)
    for (const auto& phi : phis)
      CHECK(series_pair_poly(a, k, phi) == theta_pair_poly(m, k, phi));
}

TEST_CASE("planar simplex") {
  Polyhedron simplex(2);
  simplex.add_ineq({Rat(1), Rat(0)}, Rat(0));
  simplex.add_ineq({Rat(0), Rat(1)}, Rat(0));
  simplex.add_ineq({Rat(-1), Rat(-1)}, Rat(-1));
  PiecewiseQP m = PiecewiseQP::indicator(simplex);
  AsymptoticSeries a = expand(m, 2);
  CHECK(a.s == 2);
  RDistribution area{2, {{simplex, PeriodicDiffOp::single({MultiPoly::constant(2, Rat(1)), {0, 0}})}}};
  CHECK(a.theta[0].canonical_string() == area.canonical_string());
  // all supports lie on faces of the simplex
  std::vector<std::string> keys;
  for (const auto& f : simplex.faces()) keys.push_back(f.canonical_key());
  for (const auto& th : a.theta)
    for (const auto& t : th.terms)
      CHECK(std::count(keys.begin(), keys.end(), t.face.canonical_key()) == 1);
  // exact counts: (k+1)(k+2)/2 lattice points
  MultiPoly one2 = MultiPoly::constant(2, Rat(1));
  for (long k = 1; k <= 6; ++k) {
    CHECK(series_pair_poly(a, k, one2) == Cyclotomic(Rat((k + 1) * (k + 2), 2)));
    CHECK(series_pair_poly(a, k, one2) == theta_pair_poly(m, k, one2));
  }
  // degree-1 moments match once the order passes the degree
  AsymptoticSeries a3 = expand(m, 3);
  MultiPoly xv = MultiPoly::variable(2, 0);
  for (long k = 1; k <= 6; ++k) CHECK(series_pair_poly(a3, k, xv) == theta_pair_poly(m, k, xv));
}

TEST_CASE("decomposition independence via windowed pairing") {
  // [0,k] as a difference of two rays; same family, different presentation
  Polyhedron ray0(1), ray1(1);
  ray0.add_ineq({Rat(1)}, Rat(0));
  ray1.add_ineq({Rat(1)}, Rat(1));
  PiecewiseQP alt = PiecewiseQP::indicator(ray0) - PiecewiseQP::indicator(ray1, {Rat(1)});
  REQUIRE(pqp_is_zero(alt - m_unit()));

  AsymptoticSeries a = expand(m_unit(), 3);
  AsymptoticSeries b = expand(alt, 3);
  Polyhedron box = Polyhedron::box({Rat(-1)}, {Rat(2)});
  std::vector<MultiPoly> phis = {MultiPoly::constant(1, Rat(1)), MultiPoly::variable(1, 0),
                                 MultiPoly::variable(1, 0) * MultiPoly::variable(1, 0)};
  for (long k = 1; k <= 6; ++k)
    for (const auto& phi : phis)
      CHECK(series_pair_poly_window(a, k, phi, box) == series_pair_poly_window(b, k, phi, box));
}

TEST_CASE("finite differences intertwine with translation of the expansion") {
  // nabla m = m - (m translated by 1); A(nabla m) = (1 - e^{-d/k}) A(m)
  PiecewiseQP m = m_unit();
  PiecewiseQP nabla = m - pqp_translate(m, {Int(1)});
  AsymptoticSeries lhs = expand(nabla, 3);
  AsymptoticSeries rhs =
      series_add(expand(m, 3), series_scale_const(series_translate(expand(m, 3), {Rat(1)}),
                                                  Cyclotomic(Rat(-1))));
  Polyhedron box = Polyhedron::box({Rat(-1)}, {Rat(3)});
  std::vector<MultiPoly> phis = {MultiPoly::constant(1, Rat(1)), MultiPoly::variable(1, 0)};
  for (long k = 1; k <= 6; ++k)
    for (const auto& phi : phis)
      CHECK(series_pair_poly_window(lhs, k, phi, box) ==
            series_pair_poly_window(rhs, k, phi, box));
}

TEST_CASE("truncation utilities") {
  AsymptoticSeries a = expand(m_unit(), 1);
  CHECK(a.order() == 1);
  AsymptoticSeries t = series_truncated(a, 3);
  CHECK(t.order() == 3);
  CHECK(t.theta[2].is_zero());
  CHECK(t.theta[3].is_zero());
  CHECK_FALSE(series_is_zero(a));
  CHECK(series_is_zero(series_add(a, series_scale_const(a, Cyclotomic(Rat(-1))))));
  CHECK(ipow(Rat(2), 3) == Rat(8));  // local helper sanity
  CHECK(expansion_guard_order() >= 0);
}
