#pragma once

// Exact arithmetic in the cyclotomic fields Q(zeta_N).  A value is stored at
// an explicit level N as the canonical remainder mod the N-th cyclotomic
// polynomial Phi_N; mixed-level arithmetic lifts both operands to the lcm of
// their levels.

#include <asq/rational.hpp>

#include <string>
#include <vector>

namespace asq {

class Cyclotomic {
 public:
  Cyclotomic() : level_(1), coeffs_(1, Rat(0)) {}
  explicit Cyclotomic(const Rat& r) : level_(1), coeffs_(1, r) {}
  explicit Cyclotomic(long n) : level_(1), coeffs_(1, Rat(n)) {}

  // Canonical form of sum_i raw[i] * zeta_level^i (reduces mod Phi_level).
  static Cyclotomic normalize(const std::vector<Rat>& raw, long level);

  // zeta_order^exponent.  `exponent` may be any integer (reduced mod order).
  static Cyclotomic root_of_unity(long order, const Int& exponent);

  // e^{2 pi i u} for rational u.
  static Cyclotomic from_turn(const Rat& u) {
    long n = static_cast<long>(rat_den(u));
    return root_of_unity(n, rat_num(u));
  }

  long level() const { return level_; }
  const std::vector<Rat>& coeffs() const { return coeffs_; }

  bool is_zero() const;
  bool is_rational() const;        // lies in Q (at any level)
  Rat rational_value() const;      // throws if not rational

  Cyclotomic lifted_to(long new_level) const;  // level must divide new_level
  // Smallest-level canonical representative (descends to a divisor level
  // whenever possible); used so equality is plain field comparison.
  Cyclotomic reduced() const;

  friend Cyclotomic operator+(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator-(const Cyclotomic& a, const Cyclotomic& b);
  friend Cyclotomic operator*(const Cyclotomic& a, const Cyclotomic& b);
  Cyclotomic operator-() const;
  Cyclotomic& operator+=(const Cyclotomic& b) { return *this = *this + b; }
  Cyclotomic& operator-=(const Cyclotomic& b) { return *this = *this - b; }
  Cyclotomic& operator*=(const Cyclotomic& b) { return *this = *this * b; }
  Cyclotomic scaled(const Rat& c) const;
  // Multiplicative inverse; throws std::domain_error on zero.
  Cyclotomic inverse() const;

  friend bool operator==(const Cyclotomic& a, const Cyclotomic& b);
  friend bool operator!=(const Cyclotomic& a, const Cyclotomic& b) { return !(a == b); }

  std::string to_string() const;

 private:
  long level_;
  std::vector<Rat> coeffs_;  // length phi(level_), degree < phi(level_)
};

// Euler phi function.
long euler_phi(long n);

// Coefficients of Phi_N, constant term first (integer coefficients, monic).
const std::vector<Rat>& cyclotomic_polynomial(long n);

}  // namespace asq
