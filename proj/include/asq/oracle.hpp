#pragma once

// Independent verification paths: a brute-force double-loop pairing oracle, a
// floating-point remainder table for truncated expansions, a cross-check of
// the expansion coefficients against closed-form products of geometric
// series, and a twist-search probe for the vanishing-expansion kernel.

#include <asq/distributions.hpp>
#include <asq/piecewise.hpp>

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace asq {

// Exact sum over lattice points in the window of m(k, lambda) * phi(lambda/k),
// computed by a direct double loop independent of the sampling machinery.
Cyclotomic oracle_theta_pair(const PiecewiseQP& m, const Int& k, const MultiPoly& phi,
                             const WindowBox& window);

// Smooth numeric test function of a point in V.
using SmoothFn = std::function<double(const std::vector<double>&)>;

struct RemainderReport {
  long order = 0;         // truncation order N of the compared expansion
  std::string precision;  // float model and differentiation scheme used
  std::vector<Int> ks;
  std::vector<double> scaled_remainder;  // |<Theta,phi> - <A_N,phi>| * k^(N-s)
  bool bounded = false;   // verdict: no monotone growth beyond a 2x band

  std::string to_string() const;
};

// Numeric comparison of the exact point-mass pairing against the truncated
// expansion, with the remainder rescaled by k^(N-s).
RemainderReport remainder_table(const PiecewiseQP& m, const SmoothFn& phi, long n_order,
                                const std::vector<Int>& ks);

struct GenfuncCheck {
  std::complex<double> closed_form;
  std::complex<double> laurent;
  double difference = 0.0;
};

// For a pointed cone at the origin spanned by part of a unimodular lattice
// basis, twisted by g: the transformed point-mass sum is the product of
// geometric factors 1/(1 - g^a e^{-i<a,z>/k}); the same value is approximated
// by the product of truncated Laurent factors built from twisted Bernoulli
// numbers.  Requires Im<a,z> < 0 for every ray; throws std::domain_error on a
// pole of the closed form.
GenfuncCheck genfunc_crosscheck(const std::vector<QVec>& rays, const Character& g,
                                const std::vector<std::complex<double>>& z, const Int& k,
                                long n_order);

struct UnicityResult {
  bool found = false;  // a twist with a nonzero truncated expansion exists
  Character witness;
};

// Characters with all coordinate denominators dividing twice the lcm of the
// denominators appearing in m (twists, characters and shifts).
std::vector<Character> default_unicity_gset(const PiecewiseQP& m);

// Search the g-set for g such that the order-n expansion of g^lambda * m is
// nonzero; trivial-first order, so a family with nonzero expansion reports
// the trivial witness.
UnicityResult unicity_probe(const PiecewiseQP& m, const std::vector<Character>& g_set,
                            long n_order);
UnicityResult unicity_probe(const PiecewiseQP& m, long n_order);

}  // namespace asq
