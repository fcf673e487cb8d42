#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <asq/piecewise.hpp>

using namespace asq;

namespace {

Polyhedron interval01() { return Polyhedron::box({Rat(0)}, {Rat(1)}); }

PiecewiseQP m_unit() { return PiecewiseQP::indicator(interval01()); }  // 1 on 0<=lambda<=k

QuasiPolynomial sign_lambda() {
  return QuasiPolynomial::term(1, Rat(0), Character({Rat(1, 2)}),
                               MultiPoly::constant(2, Rat(1)));
}

}  // namespace

TEST_CASE("evaluation") {
  // overlapping shifted copies: [C_{[0,1]}] + [C_{[0,1],4}] at (6,5) -> 2
  PiecewiseQP m = m_unit() + PiecewiseQP::indicator(interval01(), {Rat(4)});
  CHECK(pqp_evaluate(m, 6, QVec{Rat(5)}) == Cyclotomic(Rat(2)));
  CHECK(pqp_evaluate(m, 6, QVec{Rat(3)}) == Cyclotomic(Rat(1)));

  CHECK(pqp_evaluate(m_unit(), 3, QVec{Rat(2)}) == Cyclotomic(Rat(1)));
  CHECK(pqp_evaluate(m_unit(), 3, QVec{Rat(4)}).is_zero());
  CHECK(pqp_evaluate(m_unit(), 3, QVec{Rat(-1)}).is_zero());
  CHECK_THROWS(pqp_evaluate(m_unit(), 0, QVec{Rat(0)}));
}

TEST_CASE("module actions") {
  // translation by 2: support becomes [2, k+2]
  PiecewiseQP m2 = pqp_translate(m_unit(), {Int(2)});
  for (long k = 1; k <= 6; ++k)
    for (long l = -2; l <= 10; ++l) {
      bool in = 2 <= l && l <= k + 2;
      CHECK(pqp_evaluate(m2, k, QVec{Rat(l)}) == Cyclotomic(Rat(in ? 1 : 0)));
    }
  CHECK_THROWS(pqp_translate(m_unit(), IVec{Int(1), Int(2)}));

  // twist by g = 1/2: (-1)^lambda on the support
  PiecewiseQP tw = pqp_twist(m_unit(), Character({Rat(1, 2)}));
  CHECK(pqp_evaluate(tw, 4, QVec{Rat(3)}) == Cyclotomic(Rat(-1)));
  CHECK(pqp_evaluate(tw, 4, QVec{Rat(2)}) == Cyclotomic(Rat(1)));
  CHECK(pqp_evaluate(tw, 4, QVec{Rat(5)}).is_zero());

  // shear by 2: support becomes [2k, 3k]
  PiecewiseQP sh = pqp_shear(m_unit(), {Rat(2)});
  for (long k = 1; k <= 5; ++k)
    for (long l = 0; l <= 20; ++l) {
      bool in = 2 * k <= l && l <= 3 * k;
      CHECK(pqp_evaluate(sh, k, QVec{Rat(l)}) == Cyclotomic(Rat(in ? 1 : 0)));
    }
  // shear moves quasi-polynomial values along: m'(k,lambda) = m(k,lambda-k sigma)
  PiecewiseQP mq = pqp_scale(m_unit(), QuasiPolynomial::from_poly(1, MultiPoly::variable(2, 1)));
  PiecewiseQP shq = pqp_shear(mq, {Rat(1)});
  for (long k = 1; k <= 5; ++k)
    for (long l = 0; l <= 10; ++l)
      CHECK(pqp_evaluate(shq, k, QVec{Rat(l)}) ==
            (l >= k && l <= 2 * k ? Cyclotomic(Rat(l - k)) : Cyclotomic()));

  // algebra: h1 (h2 m) = (h1 h2) m
  QuasiPolynomial h1 = QuasiPolynomial::from_poly(1, MultiPoly::variable(2, 0));
  QuasiPolynomial h2 = sign_lambda();
  PiecewiseQP lhs = pqp_scale(pqp_scale(m_unit(), h2), h1);
  PiecewiseQP rhs = pqp_scale(m_unit(), h1 * h2);
  CHECK(pqp_equal_on_window(lhs, rhs, 6, 8));

  // g . (tau_sigma m) = g^sigma tau_sigma (g . m)
  Character g({Rat(1, 3)});
  PiecewiseQP a = pqp_twist(pqp_translate(m_unit(), {Int(2)}), g);
  PiecewiseQP b = pqp_translate(pqp_twist(m_unit(), g), {Int(2)}).scaled(g.pow({Rat(2)}));
  CHECK(pqp_equal_on_window(a, b, 6, 8));
}

TEST_CASE("kernel witnesses") {
  // (-1)^lambda on the whole line is killed by one twisted difference
  PiecewiseQP line(1);
  line.add_piece(sign_lambda(), Polyhedron::whole_space(1), {Rat(0)});
  auto w = pqp_kernel_witness(line, {{{Int(1)}, Rat(1, 2)}}, 3);
  REQUIRE(w.has_value());
  CHECK(w->n == 1);

  // m_unit has no witness among eta = +-1, zeta in {-1, i, -i}, N <= 4
  std::vector<KernelCandidate> cands;
  for (long e : {1L, -1L})
    for (Rat z : {Rat(1, 2), Rat(1, 4), Rat(3, 4)}) cands.push_back({{Int(e)}, z});
  CHECK(!pqp_kernel_witness(m_unit(), cands, 4).has_value());

  // the zero element has a trivial witness
  CHECK(pqp_kernel_witness(PiecewiseQP(1), {{{Int(1)}, Rat(1, 2)}}, 2).has_value());
}

TEST_CASE("tangent cone map") {
  PiecewiseQP m = m_unit();
  PiecewiseQP t0 = tangent_cone_map(m, {Rat(0)});
  REQUIRE(t0.pieces().size() == 1);
  Polyhedron ray(1);
  ray.add_ineq({Rat(1)}, Rat(0));
  CHECK(t0.pieces()[0].cone.base.set_equals(ray));

  PiecewiseQP th = tangent_cone_map(m, {Rat(1, 2)});
  REQUIRE(th.pieces().size() == 1);
  CHECK(th.pieces()[0].cone.base.set_equals(Polyhedron::whole_space(1)));

  CHECK(tangent_cone_map(m, {Rat(2)}).no_pieces());

  // idempotence at an apex point
  PiecewiseQP tt = tangent_cone_map(t0, {Rat(0)});
  CHECK(pqp_structurally_zero(tt - t0));

  // window agreement, with a nonzero rational shift in the data
  PiecewiseQP ms = m + PiecewiseQP::indicator(interval01(), {Rat(5, 2)});
  QVec v = {Rat(1)};
  PiecewiseQP tv = tangent_cone_map(ms, v);
  TangentWindow win = tangent_cone_window(ms, v);
  CHECK(win.radius > 0);
  for (Int k = win.threshold + 1; k <= win.threshold + 4; ++k) {
    Rat lo = Rat(k) * (v[0] - win.radius), hi = Rat(k) * (v[0] + win.radius);
    for (Int l = rat_floor(lo) + 1; Rat(l) < hi; ++l) {
      if (Rat(l) <= lo) continue;
      CHECK(pqp_evaluate(ms, k, QVec{Rat(l)}) == pqp_evaluate(tv, k, QVec{Rat(l)}));
    }
  }
}

TEST_CASE("shift reduction on a half-line") {
  Polyhedron h(1);
  h.add_ineq({Rat(1)}, Rat(0));  // [0, infinity)
  QVec sigma = {Rat(2)};
  PiecewiseQP corr = shift_reduction(h, sigma);
  REQUIRE(corr.pieces().size() == 2);
  for (const auto& pc : corr.pieces()) CHECK(pc.cone.base.affine_dim() == 0);
  // identity [C_P] - [C_{P,sigma}] = corr, pointwise
  PiecewiseQP lhs = PiecewiseQP::indicator(h) - PiecewiseQP::indicator(h, sigma);
  CHECK(pqp_equal_on_window(lhs, corr, 10, 25));
  // the corrections sit at <mu,lambda> in {0, 1}: shifts 0 and 1
  std::set<std::string> shifts;
  for (const auto& pc : corr.pieces()) shifts.insert(qvec_to_string(pc.cone.shift));
  CHECK(shifts.count("(0)"));
  CHECK(shifts.count("(1)"));

  // sigma = 0: nothing to correct
  CHECK(shift_reduction(h, {Rat(0)}).no_pieces());

  // negative shift
  PiecewiseQP corrn = shift_reduction(h, {Rat(-1)});
  PiecewiseQP lhsn = PiecewiseQP::indicator(h) - PiecewiseQP::indicator(h, {Rat(-1)});
  CHECK(pqp_equal_on_window(lhsn, corrn, 10, 25));

  // fractional shift
  PiecewiseQP corrf = shift_reduction(h, {Rat(3, 2)});
  PiecewiseQP lhsf = PiecewiseQP::indicator(h) - PiecewiseQP::indicator(h, {Rat(3, 2)});
  CHECK(pqp_equal_on_window(lhsf, corrf, 10, 25));
}

TEST_CASE("shift reduction in the plane") {
  Polyhedron quad(2);
  quad.add_ineq({Rat(1), Rat(0)}, Rat(0));
  quad.add_ineq({Rat(0), Rat(1)}, Rat(0));
  QVec sigma = {Rat(1), Rat(1)};
  PiecewiseQP corr = shift_reduction(quad, sigma);
  for (const auto& pc : corr.pieces()) CHECK(pc.cone.base.affine_dim() <= 1);
  PiecewiseQP lhs = PiecewiseQP::indicator(quad) - PiecewiseQP::indicator(quad, sigma);
  CHECK(pqp_equal_on_window(lhs, corr, 6, 10));

  // shift outside lin(P) is rejected
  Polyhedron seg(2);
  seg.add_eq({Rat(0), Rat(1)}, Rat(0));
  seg.add_ineq({Rat(1), Rat(0)}, Rat(0));
  CHECK_THROWS(shift_reduction(seg, {Rat(0), Rat(1)}));
  CHECK(shift_reduction(seg, {Rat(2), Rat(0)}).pieces().size() > 0);
}

TEST_CASE("polarization") {
  // the unit-interval element becomes a two-cone (plus point) expansion,
  // pointwise equal to the original
  PiecewiseQP pol = pqp_polarize(m_unit());
  CHECK(pol.pieces().size() >= 2);
  CHECK(pqp_equal_on_window(m_unit(), pol, 8, 12));
  for (const auto& pc : pol.pieces()) {
    // every piece is a cone: equal to its own apex tangent cone
    const Polyhedron& b = pc.cone.base;
    CHECK(b.set_equals(b.tangent_cone_at(b.apex_point())));
  }

  // an element that is already a single cone is returned unchanged
  Polyhedron ray(1);
  ray.add_ineq({Rat(1)}, Rat(0));
  PiecewiseQP mc = PiecewiseQP::indicator(ray, {Rat(1, 3)});
  PiecewiseQP pc2 = pqp_polarize(mc);
  REQUIRE(pc2.pieces().size() == 1);
  CHECK(pc2.pieces()[0].cone.base.set_equals(ray));

  // overlapping-support element with quasi-polynomial weights, window k <= 12
  PiecewiseQP fig = m_unit() + pqp_twist(PiecewiseQP::indicator(interval01(), {Rat(4)}),
                                         Character({Rat(1, 2)}));
  CHECK(pqp_equal_on_window(fig, pqp_polarize(fig), 12, 20));

  // 2-D: polarized simplex element
  Polyhedron tri(2);
  tri.add_ineq({Rat(1), Rat(0)}, Rat(0));
  tri.add_ineq({Rat(0), Rat(1)}, Rat(0));
  tri.add_ineq({Rat(-1), Rat(-1)}, Rat(-1));
  PiecewiseQP mt = PiecewiseQP::indicator(tri, {Rat(1, 2), Rat(0)});
  CHECK(pqp_equal_on_window(mt, pqp_polarize(mt), 6, 8));
}
