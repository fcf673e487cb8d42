#include <asq/multipoly.hpp>

#include <stdexcept>

namespace asq {

MultiPoly MultiPoly::constant(size_t nvars, const Cyclotomic& c) {
  MultiPoly p(nvars);
  p.add_term(Exponent(nvars, 0), c);
  return p;
}

MultiPoly MultiPoly::variable(size_t nvars, size_t i) {
  if (i >= nvars) throw std::invalid_argument("MultiPoly::variable: index out of range");
  MultiPoly p(nvars);
  Exponent e(nvars, 0);
  e[i] = 1;
  p.add_term(e, Cyclotomic(Rat(1)));
  return p;
}

void MultiPoly::add_term(const Exponent& e, const Cyclotomic& c) {
  if (e.size() != nvars_) throw std::invalid_argument("MultiPoly::add_term: exponent arity mismatch");
  if (c.is_zero()) return;
  auto it = terms_.find(e);
  if (it == terms_.end()) {
    terms_.emplace(e, c);
  } else {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

MultiPoly operator+(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("MultiPoly: arity mismatch");
  MultiPoly r = a;
  for (const auto& [e, c] : b.terms_) r.add_term(e, c);
  return r;
}

MultiPoly operator-(const MultiPoly& a, const MultiPoly& b) { return a + (-b); }

MultiPoly MultiPoly::operator-() const {
  MultiPoly r(nvars_);
  for (const auto& [e, c] : terms_) r.terms_.emplace(e, -c);
  return r;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars_ != b.nvars_) throw std::invalid_argument("MultiPoly: arity mismatch");
  MultiPoly r(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      MultiPoly::Exponent e(a.nvars_);
      for (size_t i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
      r.add_term(e, ca * cb);
    }
  }
  return r;
}

MultiPoly MultiPoly::scaled(const Cyclotomic& c) const {
  MultiPoly r(nvars_);
  for (const auto& [e, coeff] : terms_) r.add_term(e, coeff * c);
  return r;
}

MultiPoly MultiPoly::pow(int n) const {
  if (n < 0) throw std::invalid_argument("MultiPoly::pow: negative exponent");
  MultiPoly r = constant(nvars_, Rat(1));
  for (int i = 0; i < n; ++i) r *= *this;
  return r;
}

bool operator==(const MultiPoly& a, const MultiPoly& b) {
  if (a.nvars_ != b.nvars_) return false;
  if (a.terms_.size() != b.terms_.size()) return false;
  for (auto ia = a.terms_.begin(), ib = b.terms_.begin(); ia != a.terms_.end(); ++ia, ++ib) {
    if (ia->first != ib->first || ia->second != ib->second) return false;
  }
  return true;
}

Cyclotomic MultiPoly::evaluate(const QVec& point) const {
  if (point.size() != nvars_) throw std::invalid_argument("MultiPoly::evaluate: arity mismatch");
  Cyclotomic sum;
  for (const auto& [e, c] : terms_) {
    Rat mono = 1;
    for (size_t i = 0; i < nvars_; ++i)
      for (int j = 0; j < e[i]; ++j) mono *= point[i];
    sum += c.scaled(mono);
  }
  return sum;
}

MultiPoly MultiPoly::compose(const std::vector<MultiPoly>& subs) const {
  if (subs.size() != nvars_) throw std::invalid_argument("MultiPoly::compose: arity mismatch");
  size_t out_vars = nvars_ ? subs[0].nvars() : 0;
  for (const auto& s : subs)
    if (s.nvars() != out_vars) throw std::invalid_argument("MultiPoly::compose: mixed arities");
  MultiPoly r(out_vars);
  for (const auto& [e, c] : terms_) {
    MultiPoly term = MultiPoly::constant(out_vars, c);
    for (size_t i = 0; i < nvars_; ++i)
      if (e[i] > 0) term *= subs[i].pow(e[i]);
    r += term;
  }
  return r;
}

MultiPoly MultiPoly::derivative(size_t var) const {
  if (var >= nvars_) throw std::invalid_argument("MultiPoly::derivative: index out of range");
  MultiPoly r(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponent e2 = e;
    e2[var] -= 1;
    r.add_term(e2, c.scaled(Rat(e[var])));
  }
  return r;
}

MultiPoly MultiPoly::directional_derivative(const QVec& direction) const {
  if (direction.size() != nvars_)
    throw std::invalid_argument("directional_derivative: dimension mismatch");
  MultiPoly r(nvars_);
  for (size_t i = 0; i < nvars_; ++i)
    if (direction[i] != 0) r += derivative(i).scaled(direction[i]);
  return r;
}

int MultiPoly::total_degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int t = 0;
    for (int x : e) t += x;
    if (t > d) d = t;
  }
  return d;
}

int MultiPoly::degree_in(size_t var) const { return degree_in_vars({var}); }

int MultiPoly::degree_in_vars(const std::vector<size_t>& vars) const {
  int d = -1;
  for (const auto& [e, c] : terms_) {
    int t = 0;
    for (size_t v : vars) t += e[v];
    if (t > d) d = t;
  }
  return d;
}

std::string MultiPoly::to_string(const std::vector<std::string>& names) const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    std::string mono;
    for (size_t i = 0; i < nvars_; ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += names[i];
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    std::string coeff = c.to_string();
    std::string term;
    if (mono.empty())
      term = coeff;
    else if (coeff == "1")
      term = mono;
    else if (coeff == "-1")
      term = "-" + mono;
    else {
      bool atomic = coeff.find('+') == std::string::npos && coeff.find('-', 1) == std::string::npos;
      term = (atomic ? coeff : "(" + coeff + ")") + "*" + mono;
    }
    if (!first && term[0] != '-') s += " + ";
    else if (!first) { s += " - "; term = term.substr(1); }
    s += term;
    first = false;
  }
  return s;
}

std::string MultiPoly::to_string() const {
  std::vector<std::string> names;
  for (size_t i = 0; i < nvars_; ++i) names.push_back("x" + std::to_string(i));
  return to_string(names);
}

}  // namespace asq
