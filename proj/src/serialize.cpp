#include <asq/serialize.hpp>

#include <algorithm>
#include <stdexcept>

namespace asq {

namespace {

void expect(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

std::vector<int> ints_from_json(const Json& j) {
  expect(j.is_array(), "expected an array of integers");
  std::vector<int> out;
  for (const Json& x : j) {
    expect(x.is_number_integer(), "expected an integer");
    out.push_back(x.get<int>());
  }
  return out;
}

}  // namespace

Json rat_to_json(const Rat& r) { return rat_to_string(r); }

Rat rat_from_json(const Json& j) {
  if (j.is_number_integer()) return Rat(j.get<long long>());
  expect(j.is_string(), "expected a rational \"p/q\" string or integer");
  return parse_rat(j.get<std::string>());
}

Json qvec_to_json(const QVec& v) {
  Json out = Json::array();
  for (const Rat& x : v) out.push_back(rat_to_json(x));
  return out;
}

QVec qvec_from_json(const Json& j) {
  expect(j.is_array(), "expected an array of rationals");
  QVec out;
  for (const Json& x : j) out.push_back(rat_from_json(x));
  return out;
}

Json cyclotomic_to_json(const Cyclotomic& c) {
  Cyclotomic r = c.reduced();
  if (r.is_rational()) return rat_to_json(r.rational_value());
  Json out;
  out["level"] = r.level();
  Json cs = Json::array();
  for (const Rat& x : r.coeffs()) cs.push_back(rat_to_json(x));
  out["coeffs"] = cs;
  return out;
}

Cyclotomic cyclotomic_from_json(const Json& j) {
  if (j.is_string() || j.is_number_integer()) return Cyclotomic(rat_from_json(j));
  expect(j.is_object() && j.contains("level") && j.contains("coeffs"),
         "expected a rational or {level, coeffs}");
  expect(j["level"].is_number_integer() && j["level"].get<long>() >= 1, "invalid level");
  std::vector<Rat> cs;
  expect(j["coeffs"].is_array(), "coeffs must be an array");
  for (const Json& x : j["coeffs"]) cs.push_back(rat_from_json(x));
  return Cyclotomic::normalize(cs, j["level"].get<long>()).reduced();
}

Json multipoly_to_json(const MultiPoly& p) {
  Json out;
  out["nvars"] = p.nvars();
  Json terms = Json::array();
  for (const auto& [e, c] : p.terms()) {
    Json t;
    t["exp"] = e;
    t["coeff"] = cyclotomic_to_json(c);
    terms.push_back(t);
  }
  out["terms"] = terms;
  return out;
}

MultiPoly multipoly_from_json(const Json& j) {
  expect(j.is_object() && j.contains("nvars") && j.contains("terms"),
         "expected {nvars, terms} for a polynomial");
  expect(j["nvars"].is_number_integer(), "nvars must be an integer");
  size_t nvars = j["nvars"].get<size_t>();
  MultiPoly p(nvars);
  expect(j["terms"].is_array(), "terms must be an array");
  for (const Json& t : j["terms"]) {
    expect(t.is_object() && t.contains("exp") && t.contains("coeff"),
           "expected {exp, coeff} in polynomial term");
    std::vector<int> e = ints_from_json(t["exp"]);
    expect(e.size() == nvars, "exponent arity mismatch");
    for (int x : e) expect(x >= 0, "negative exponent");
    p.add_term(e, cyclotomic_from_json(t["coeff"]));
  }
  return p;
}

Json quasipoly_to_json(const QuasiPolynomial& q) {
  Json out;
  out["dim"] = q.dim();
  Json terms = Json::array();
  for (const auto& [key, poly] : q.terms()) {
    Json t;
    t["twist"] = rat_to_json(key.first);
    t["character"] = qvec_to_json(key.second.value);
    t["poly"] = multipoly_to_json(poly);
    terms.push_back(t);
  }
  out["terms"] = terms;
  return out;
}

QuasiPolynomial quasipoly_from_json(const Json& j) {
  expect(j.is_object() && j.contains("dim") && j.contains("terms"),
         "expected {dim, terms} for a quasi-polynomial");
  size_t dim = j["dim"].get<size_t>();
  QuasiPolynomial q(dim);
  expect(j["terms"].is_array(), "terms must be an array");
  for (const Json& t : j["terms"]) {
    expect(t.is_object() && t.contains("twist") && t.contains("character") && t.contains("poly"),
           "expected {twist, character, poly} in quasi-polynomial term");
    QVec cval = qvec_from_json(t["character"]);
    expect(cval.size() == dim, "character arity mismatch");
    MultiPoly p = multipoly_from_json(t["poly"]);
    expect(p.nvars() == dim + 1, "polynomial arity mismatch (need 1 + dim variables)");
    q.add_term(rat_from_json(t["twist"]), Character(cval), p);
  }
  return q;
}

Json polyhedron_to_json(const Polyhedron& p) {
  Json out;
  out["dim"] = p.space_dim();
  Json ineqs = Json::array();
  for (const Inequality& in : p.ineqs()) {
    Json t;
    t["a"] = qvec_to_json(in.a);
    t["c"] = rat_to_json(in.c);
    ineqs.push_back(t);
  }
  out["ineqs"] = ineqs;
  return out;
}

Polyhedron polyhedron_from_json(const Json& j) {
  expect(j.is_object() && j.contains("dim") && j.contains("ineqs"),
         "expected {dim, ineqs} for a polyhedron");
  size_t dim = j["dim"].get<size_t>();
  Polyhedron p(dim);
  expect(j["ineqs"].is_array(), "ineqs must be an array");
  for (const Json& t : j["ineqs"]) {
    expect(t.is_object() && t.contains("a") && t.contains("c"),
           "expected {a, c} with <a,v> >= c");
    QVec a = qvec_from_json(t["a"]);
    expect(a.size() == dim, "inequality arity mismatch");
    p.add_ineq(a, rat_from_json(t["c"]));
  }
  return p;
}

Json pqp_to_json(const PiecewiseQP& m) {
  Json out;
  out["dim"] = m.dim();
  Json pieces = Json::array();
  for (const QPPiece& piece : m.pieces()) {
    Json t;
    t["q"] = quasipoly_to_json(piece.q);
    t["base"] = polyhedron_to_json(piece.cone.base);
    t["shift"] = qvec_to_json(piece.cone.shift);
    pieces.push_back(t);
  }
  out["pieces"] = pieces;
  return out;
}

PiecewiseQP pqp_from_json(const Json& j) {
  expect(j.is_object() && j.contains("dim") && j.contains("pieces"),
         "expected {dim, pieces} for a piecewise family");
  size_t dim = j["dim"].get<size_t>();
  PiecewiseQP m(dim);
  expect(j["pieces"].is_array(), "pieces must be an array");
  for (const Json& t : j["pieces"]) {
    expect(t.is_object() && t.contains("q") && t.contains("base") && t.contains("shift"),
           "expected {q, base, shift} in piece");
    QuasiPolynomial q = quasipoly_from_json(t["q"]);
    expect(q.dim() == dim, "piece arity mismatch");
    Polyhedron base = polyhedron_from_json(t["base"]);
    expect(base.space_dim() == dim, "piece base dimension mismatch");
    QVec shift = qvec_from_json(t["shift"]);
    expect(shift.size() == dim, "piece shift arity mismatch");
    m.add_piece(q, base, shift);
  }
  return m;
}

Json quotient_map_to_json(const QuotientMap& q) {
  Json out;
  Json rows = Json::array();
  for (const QVec& row : q.matrix) rows.push_back(qvec_to_json(row));
  out["matrix"] = rows;
  Json basis = Json::array();
  for (const QVec& row : q.image_basis) basis.push_back(qvec_to_json(row));
  out["image_basis"] = basis;
  return out;
}

QuotientMap quotient_map_from_json(const Json& j) {
  expect(j.is_object() && j.contains("matrix"), "expected {matrix[, image_basis]}");
  expect(j["matrix"].is_array() && !j["matrix"].empty(), "matrix must be a nonempty array");
  QMat rows;
  for (const Json& r : j["matrix"]) rows.push_back(qvec_from_json(r));
  QuotientMap out = QuotientMap::from_matrix(rows);
  if (j.contains("image_basis")) {
    QMat basis;
    for (const Json& r : j["image_basis"]) basis.push_back(qvec_from_json(r));
    expect(basis == out.image_basis, "image_basis does not match the lattice basis of the image");
  }
  return out;
}

Json window_to_json(const WindowBox& w) {
  Json out;
  out["lo"] = qvec_to_json(w.lo);
  out["hi"] = qvec_to_json(w.hi);
  out["lo_open"] = w.lo_open;
  out["hi_open"] = w.hi_open;
  return out;
}

WindowBox window_from_json(const Json& j) {
  expect(j.is_object() && j.contains("lo") && j.contains("hi"), "expected {lo, hi} for a window");
  WindowBox w = WindowBox::closed(qvec_from_json(j["lo"]), qvec_from_json(j["hi"]));
  expect(w.lo.size() == w.hi.size(), "window arity mismatch");
  auto flags = [&](const char* key, std::vector<bool>& out) {
    if (!j.contains(key)) return;
    expect(j[key].is_array() && j[key].size() == w.lo.size(), "window open-flag arity mismatch");
    out.clear();
    for (const Json& x : j[key]) {
      expect(x.is_boolean(), "window open flags must be booleans");
      out.push_back(x.get<bool>());
    }
  };
  flags("lo_open", w.lo_open);
  flags("hi_open", w.hi_open);
  return w;
}

Json series_to_json(const AsymptoticSeries& a) {
  AsymptoticSeries n = a.normalized();
  Json out;
  out["s"] = n.s;
  out["order"] = n.order();
  Json theta = Json::array();
  for (long i = 0; i <= n.order(); ++i) {
    const RDistribution& dist = n.theta[static_cast<size_t>(i)];
    std::vector<const RTerm*> sorted;
    for (const RTerm& t : dist.terms) sorted.push_back(&t);
    std::stable_sort(sorted.begin(), sorted.end(), [](const RTerm* x, const RTerm* y) {
      return x->face.canonical_key() < y->face.canonical_key();
    });
    Json coeff;
    coeff["n"] = i;
    Json terms = Json::array();
    for (const RTerm* t : sorted) {
      Json term;
      term["face"] = t->face.canonical_key();
      term["period"] = static_cast<long>(t->op.period);
      Json table = Json::array();
      for (const auto& row : t->op.table) {
        Json entries = Json::array();
        for (const DiffTerm& dt : row) {
          Json e;
          e["coeff"] = multipoly_to_json(dt.coeff);
          e["deriv"] = dt.deriv;
          entries.push_back(e);
        }
        table.push_back(entries);
      }
      term["table"] = table;
      terms.push_back(term);
    }
    coeff["terms"] = terms;
    theta.push_back(coeff);
  }
  out["theta"] = theta;
  return out;
}

Json remainder_report_to_json(const RemainderReport& r) {
  Json out;
  out["order"] = r.order;
  out["precision"] = r.precision;
  Json ks = Json::array(), vals = Json::array();
  for (const Int& k : r.ks) ks.push_back(k.str());
  for (double v : r.scaled_remainder) vals.push_back(v);
  out["k"] = ks;
  out["scaled_remainder"] = vals;
  out["verdict"] = r.bounded ? "bounded" : "unbounded trend";
  return out;
}

}  // namespace asq
