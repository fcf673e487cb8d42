#pragma once

// Multivariate polynomials with cyclotomic coefficients.  The meaning of the
// variables (k, lambda_1..lambda_d, or v_1..v_d) is contextual; the type just
// fixes their count and order.

#include <asq/cyclotomic.hpp>
#include <asq/rational.hpp>

#include <map>
#include <string>
#include <vector>

namespace asq {

class MultiPoly {
 public:
  using Exponent = std::vector<int>;

  explicit MultiPoly(size_t nvars = 0) : nvars_(nvars) {}

  static MultiPoly constant(size_t nvars, const Cyclotomic& c);
  static MultiPoly constant(size_t nvars, const Rat& r) { return constant(nvars, Cyclotomic(r)); }
  static MultiPoly variable(size_t nvars, size_t i);

  size_t nvars() const { return nvars_; }
  const std::map<Exponent, Cyclotomic>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(const Exponent& e, const Cyclotomic& c);

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& b) { return *this = *this + b; }
  MultiPoly& operator-=(const MultiPoly& b) { return *this = *this - b; }
  MultiPoly& operator*=(const MultiPoly& b) { return *this = *this * b; }
  MultiPoly scaled(const Cyclotomic& c) const;
  MultiPoly scaled(const Rat& r) const { return scaled(Cyclotomic(r)); }
  MultiPoly pow(int n) const;

  friend bool operator==(const MultiPoly& a, const MultiPoly& b);
  friend bool operator!=(const MultiPoly& a, const MultiPoly& b) { return !(a == b); }

  Cyclotomic evaluate(const QVec& point) const;

  // Substitute variable i by subs[i]; all subs share a common variable count.
  MultiPoly compose(const std::vector<MultiPoly>& subs) const;

  MultiPoly derivative(size_t var) const;
  MultiPoly directional_derivative(const QVec& direction) const;

  int total_degree() const;  // -1 for the zero polynomial
  int degree_in(size_t var) const;
  int degree_in_vars(const std::vector<size_t>& vars) const;

  std::string to_string(const std::vector<std::string>& names) const;
  std::string to_string() const;  // default names x0, x1, ...

 private:
  size_t nvars_;
  std::map<Exponent, Cyclotomic> terms_;
};

}  // namespace asq
