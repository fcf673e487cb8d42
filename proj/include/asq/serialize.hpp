#pragma once

// JSON serialization of the core value types, with exact rationals rendered
// as "p/q" strings.  Parsing throws std::invalid_argument with a descriptive
// message; the scene layer adds location context.  Asymptotic series and
// reports are emission-only (deterministic ordering: coefficients by order,
// supports by canonical face key).

#include <asq/distributions.hpp>
#include <asq/oracle.hpp>
#include <asq/piecewise.hpp>
#include <asq/pushforward.hpp>

#include <json.hpp>

namespace asq {

using Json = nlohmann::json;

Json rat_to_json(const Rat& r);
Rat rat_from_json(const Json& j);

Json qvec_to_json(const QVec& v);
QVec qvec_from_json(const Json& j);

Json cyclotomic_to_json(const Cyclotomic& c);
Cyclotomic cyclotomic_from_json(const Json& j);

Json multipoly_to_json(const MultiPoly& p);
MultiPoly multipoly_from_json(const Json& j);

Json quasipoly_to_json(const QuasiPolynomial& q);
QuasiPolynomial quasipoly_from_json(const Json& j);

Json polyhedron_to_json(const Polyhedron& p);
Polyhedron polyhedron_from_json(const Json& j);

Json pqp_to_json(const PiecewiseQP& m);
PiecewiseQP pqp_from_json(const Json& j);

Json quotient_map_to_json(const QuotientMap& q);
QuotientMap quotient_map_from_json(const Json& j);

Json window_to_json(const WindowBox& w);
WindowBox window_from_json(const Json& j);

Json series_to_json(const AsymptoticSeries& a);
Json remainder_report_to_json(const RemainderReport& r);

}  // namespace asq
