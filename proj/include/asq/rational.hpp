#pragma once

// Arbitrary-precision integers and rationals plus the small helpers the rest
// of the library needs (floor/ceil/fractional part, lcm of denominators,
// canonical "p/q" parsing and printing).

#include <boost/multiprecision/cpp_int.hpp>

#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace asq {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

using QVec = std::vector<Rat>;
using IVec = std::vector<Int>;

inline Int rat_num(const Rat& r) { return numerator(r); }
inline Int rat_den(const Rat& r) { return denominator(r); }

inline Int int_gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }
inline Int int_lcm(const Int& a, const Int& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::lcm(a, b);
}

// Largest integer <= r.
inline Int rat_floor(const Rat& r) {
  Int q = rat_num(r) / rat_den(r);
  if (rat_num(r) < 0 && q * rat_den(r) != rat_num(r)) --q;
  return q;
}

// Smallest integer >= r.
inline Int rat_ceil(const Rat& r) { return -rat_floor(-r); }

// Fractional part {r} in [0,1).
inline Rat rat_frac(const Rat& r) { return r - Rat(rat_floor(r)); }

inline bool rat_is_int(const Rat& r) { return rat_den(r) == 1; }

inline long rat_to_long(const Rat& r) {
  if (!rat_is_int(r)) throw std::invalid_argument("rat_to_long: not an integer");
  return static_cast<long>(rat_num(r));
}

inline std::string rat_to_string(const Rat& r) {
  std::string s = rat_num(r).str();
  if (rat_den(r) != 1) s += "/" + rat_den(r).str();
  return s;
}

inline Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rat(Int(s));
    Int p(s.substr(0, slash));
    Int q(s.substr(slash + 1));
    if (q == 0) throw std::invalid_argument("zero denominator");
    return Rat(p, q);
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational: \"" + s + "\"");
  }
}

inline Int lcm_of_denominators(const QVec& v) {
  Int l = 1;
  for (const Rat& r : v) l = int_lcm(l, rat_den(r));
  return l;
}

// --- small vector helpers -------------------------------------------------

inline QVec qvec_zero(size_t d) { return QVec(d, Rat(0)); }

inline QVec qvec_add(const QVec& a, const QVec& b) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline QVec qvec_sub(const QVec& a, const QVec& b) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline QVec qvec_scale(const Rat& c, const QVec& a) {
  QVec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}

inline Rat qvec_dot(const QVec& a, const QVec& b) {
  Rat s = 0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline bool qvec_is_zero(const QVec& a) {
  for (const Rat& x : a)
    if (x != 0) return false;
  return true;
}

inline std::string qvec_to_string(const QVec& v) {
  std::string s = "(";
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += rat_to_string(v[i]);
  }
  return s + ")";
}

}  // namespace asq
