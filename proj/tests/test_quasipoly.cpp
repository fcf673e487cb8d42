#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <asq/quasipoly.hpp>

using namespace asq;

namespace {

// d = 1 helpers; polynomial variables are (k, l).
MultiPoly var_k1() { return MultiPoly::variable(2, 0); }
MultiPoly var_l1() { return MultiPoly::variable(2, 1); }
MultiPoly c1(const Rat& r) { return MultiPoly::constant(2, r); }

QuasiPolynomial qp_sign_lambda() {  // (-1)^lambda in d = 1
  return QuasiPolynomial::term(1, Rat(0), Character({Rat(1, 2)}), c1(Rat(1)));
}

}  // namespace

TEST_CASE("evaluation") {
  CHECK(qp_sign_lambda().evaluate(1, QVec{Rat(3)}) == Cyclotomic(Rat(-1)));
  QuasiPolynomial lam1 = QuasiPolynomial::from_poly(1, var_l1() + c1(Rat(1)));
  CHECK(lam1.evaluate(1, QVec{Rat(4)}) == Cyclotomic(Rat(5)));
  // zeta_3^lambda * k at (k, lambda) = (2, 1) -> 2 zeta_3
  QuasiPolynomial tw = QuasiPolynomial::term(1, Rat(0), Character({Rat(1, 3)}), var_k1());
  CHECK(tw.evaluate(2, QVec{Rat(1)}) == Cyclotomic::root_of_unity(3, 1).scaled(Rat(2)));
  // k-twist: e^{2 pi i k / 4} at k = 3
  QuasiPolynomial kt = QuasiPolynomial::term(1, Rat(1, 4), Character::trivial(1), c1(Rat(1)));
  CHECK(kt.evaluate(3, QVec{Rat(0)}) == Cyclotomic::root_of_unity(4, 3));
}

TEST_CASE("arithmetic and canonical form") {
  QuasiPolynomial a = qp_sign_lambda(), b = QuasiPolynomial::from_poly(1, var_l1());
  CHECK(a + b == b + a);
  CHECK((a - a).is_zero());
  CHECK(a * b == b * a);
  // character twists multiply: (-1)^l * (-1)^l = 1
  CHECK(a * a == QuasiPolynomial::constant(1, Cyclotomic(Rat(1))));
  // canonicalization merges duplicate keys
  QuasiPolynomial two = a.scaled(Cyclotomic(Rat(2)));
  CHECK(a + a == two);
  CHECK(a.twisted(Character({Rat(1, 2)})) == QuasiPolynomial::constant(1, Cyclotomic(Rat(1))));
  CHECK(a.twist_denominator_lcm() == 2);
}

TEST_CASE("character decomposition from coset data") {
  // Gamma' = Z (+) 2Z inside Z^2 = (k, lambda); 1 on even lambda, 0 on odd.
  IMat sub = {{Int(1), Int(0)}, {Int(0), Int(2)}};
  std::vector<std::pair<IVec, MultiPoly>> cosets = {
      {{Int(0), Int(0)}, c1(Rat(1))},
      {{Int(0), Int(1)}, c1(Rat(0))},
  };
  QuasiPolynomial q = qp_character_decompose(1, sub, cosets);
  QuasiPolynomial expected =
      QuasiPolynomial::constant(1, Cyclotomic(Rat(1, 2))) + qp_sign_lambda().scaled(Cyclotomic(Rat(1, 2)));
  CHECK(q == expected);
  // round-trip on the cosets
  for (long k = 1; k <= 4; ++k)
    for (long l = -3; l <= 3; ++l)
      CHECK(q.evaluate(k, QVec{Rat(l)}) == Cyclotomic(Rat((l % 2 + 2) % 2 == 0 ? 1 : 0)));

  // lambda on the full lattice: a single trivial term.
  IMat full = {{Int(1), Int(0)}, {Int(0), Int(1)}};
  QuasiPolynomial ql = qp_character_decompose(1, full, {{{Int(0), Int(0)}, var_l1()}});
  CHECK(ql == QuasiPolynomial::from_poly(1, var_l1()));

  // (-1)^lambda given per coset: recovers the single character term.
  std::vector<std::pair<IVec, MultiPoly>> sgn = {
      {{Int(0), Int(0)}, c1(Rat(1))},
      {{Int(0), Int(1)}, c1(Rat(-1))},
  };
  CHECK(qp_character_decompose(1, sub, sgn) == qp_sign_lambda());

  // k-dependent cosets: 1 on even k, 0 on odd k.
  IMat subk = {{Int(2), Int(0)}, {Int(0), Int(1)}};
  QuasiPolynomial qk = qp_character_decompose(
      1, subk, {{{Int(0), Int(0)}, c1(Rat(1))}, {{Int(1), Int(0)}, c1(Rat(0))}});
  CHECK(qk.evaluate(2, QVec{Rat(5)}) == Cyclotomic(Rat(1)));
  CHECK(qk.evaluate(3, QVec{Rat(5)}) == Cyclotomic(Rat(0)));

  // overlapping cosets are rejected
  std::vector<std::pair<IVec, MultiPoly>> bad = {
      {{Int(0), Int(0)}, c1(Rat(1))},
      {{Int(0), Int(2)}, c1(Rat(0))},
  };
  CHECK_THROWS(qp_character_decompose(1, sub, bad));
}

TEST_CASE("translation and finite differences") {
  QuasiPolynomial lam = QuasiPolynomial::from_poly(1, var_l1());
  // nabla_1^1 lambda = 1
  CHECK(qp_difference(lam, {Int(1)}, Rat(0)) == QuasiPolynomial::constant(1, Cyclotomic(Rat(1))));
  // nabla_eta^{g^eta} g^lambda = 0
  CHECK(qp_difference(qp_sign_lambda(), {Int(1)}, Rat(1, 2)).is_zero());
  // tau_1 lambda^2 = (lambda-1)^2
  QuasiPolynomial lam2 = QuasiPolynomial::from_poly(1, var_l1() * var_l1());
  QuasiPolynomial shifted = qp_translate(lam2, {Int(1)});
  MultiPoly lm1 = var_l1() - c1(Rat(1));
  CHECK(shifted == QuasiPolynomial::from_poly(1, lm1 * lm1));
  // translation acts on characters by the phase g^{-sigma}
  QuasiPolynomial ts = qp_translate(qp_sign_lambda(), {Int(1)});
  CHECK(ts == qp_sign_lambda().scaled(Cyclotomic(Rat(-1))));
  // nabla and tau commute
  QuasiPolynomial q = lam2 + qp_sign_lambda();
  CHECK(qp_difference(qp_translate(q, {Int(2)}), {Int(1)}, Rat(1, 3)) ==
        qp_translate(qp_difference(q, {Int(1)}, Rat(1, 3)), {Int(2)}));
}

TEST_CASE("polynomial part along an affine subspace") {
  // d = 2, q = (-1)^{lambda_2}
  QuasiPolynomial q = QuasiPolynomial::term(2, Rat(0), Character({Rat(0), Rat(1, 2)}),
                                            MultiPoly::constant(3, Rat(1)));
  AffineSubspace xaxis{qvec_zero(2), {{Rat(1), Rat(0)}}};
  auto pp = qp_polynomial_part(q, xaxis, qvec_zero(2));
  CHECK(!pp.index_empty);
  CHECK(pp.n0 == 1);
  CHECK(pp.evaluate(5, {Rat(3), Rat(0)}) == Cyclotomic(Rat(1)));
  // ... while the global polynomial part (A = whole plane) vanishes.
  AffineSubspace plane{qvec_zero(2), {{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}};
  CHECK(qp_polynomial_part(q, plane, qvec_zero(2)).part.is_zero());

  // the same subspace described differently gives the same part
  AffineSubspace xaxis2{{Rat(7), Rat(0)}, {{Rat(-2), Rat(0)}}};
  CHECK(qp_polynomial_part(q, xaxis2, qvec_zero(2)).part == pp.part);

  // empty index: x-axis shifted by (0, 1/2) never meets the lattice
  auto none = qp_polynomial_part(q, xaxis, {Rat(0), Rat(1, 2)});
  CHECK(none.index_empty);
  CHECK(none.evaluate(3, {Rat(1), Rat(1, 2)}).is_zero());
}

TEST_CASE("polynomial part with a nontrivial index progression") {
  // q = (-1)^{lambda_2} + c, A = {(x, 1/4)}, sigma = (0, 1/2).
  Rat c = Rat(3);
  QuasiPolynomial q = QuasiPolynomial::term(2, Rat(0), Character({Rat(0), Rat(1, 2)}),
                                            MultiPoly::constant(3, Rat(1))) +
                      QuasiPolynomial::constant(2, Cyclotomic(c));
  AffineSubspace a{{Rat(0), Rat(1, 4)}, {{Rat(1), Rat(0)}}};
  QVec sigma = {Rat(0), Rat(1, 2)};
  auto pp = qp_polynomial_part(q, a, sigma);
  REQUIRE(!pp.index_empty);
  CHECK(pp.n0 == 4);
  CHECK(pp.k0 % 4 == 2);  // index set 2 + 4Z
  CHECK(pp.index_contains(2));
  CHECK(pp.index_contains(6));
  CHECK(!pp.index_contains(3));
  // At k = 2 the fiber is lambda_2 = 1 and the restriction is c - 1.
  CHECK(pp.evaluate(2, {Rat(9), Rat(1)}) == Cyclotomic(c - 1));
  CHECK(q.evaluate(2, QVec{Rat(9), Rat(1)}) == Cyclotomic(c - 1));
  // At k = 6 the fiber is lambda_2 = 2 and the restriction is c + 1; the
  // polynomial part tracks the restriction exactly.
  CHECK(pp.evaluate(6, {Rat(0), Rat(2)}) == Cyclotomic(c + 1));
  CHECK(q.evaluate(6, QVec{Rat(0), Rat(2)}) == Cyclotomic(c + 1));
}

TEST_CASE("degree split along a polyhedron") {
  Polyhedron unit = Polyhedron::box({Rat(0)}, {Rat(1)});
  // q = lambda + 1 -> p1 = v, p0 = 1
  QuasiPolynomial q = QuasiPolynomial::from_poly(1, var_l1() + c1(Rat(1)));
  auto ds = qp_degree_split(q, unit, {Rat(0)});
  REQUIRE(ds.p.size() >= 2);
  CHECK(ds.p[0] == QuasiPolynomial::constant(1, Cyclotomic(Rat(1))));
  CHECK(ds.p[1] == QuasiPolynomial::from_poly(1, var_l1()));  // the v variable

  // constants split as p0 only
  auto dc = qp_degree_split(QuasiPolynomial::constant(1, Cyclotomic(Rat(5))), unit, {Rat(0)});
  CHECK(dc.p[0] == QuasiPolynomial::constant(1, Cyclotomic(Rat(5))));
  for (size_t j = 1; j < dc.p.size(); ++j) CHECK(dc.p[j].is_zero());

  // q = lambda^2 -> p2 = v^2 only
  auto d2 = qp_degree_split(QuasiPolynomial::from_poly(1, var_l1() * var_l1()), unit, {Rat(0)});
  REQUIRE(d2.p.size() >= 3);
  CHECK(d2.p[0].is_zero());
  CHECK(d2.p[1].is_zero());
  CHECK(d2.p[2] == QuasiPolynomial::from_poly(1, var_l1() * var_l1()));

  // reassembly: sum_j k^j p_j(k, v) equals the part at (k, k v + sigma)
  QuasiPolynomial mix = q * qp_sign_lambda() + QuasiPolynomial::from_poly(1, var_k1() * var_l1());
  QVec sigma = {Rat(2)};
  auto dm = qp_degree_split(mix, unit, sigma);
  for (long k = 1; k <= 6; ++k) {
    for (const Rat& v : {Rat(0), Rat(1, 2), Rat(1)}) {
      Cyclotomic sum;
      Rat kp = 1;
      for (size_t j = 0; j < dm.p.size(); ++j) {
        sum += dm.p[j].evaluate(k, QVec{v}).scaled(kp);
        kp *= Rat(k);
      }
      CHECK(sum == dm.base.evaluate(k, QVec{Rat(k) * v + sigma[0]}));
    }
  }
}
