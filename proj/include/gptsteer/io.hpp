#pragma once

// JSON documents. Every top-level document carries "schema": "gptsteer/1";
// rationals travel as "p/q" strings in lowest terms (plain integers and
// "n" strings are accepted on input).

#include "gptsteer/theorem.hpp"

#include <json.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gptsteer {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSchema = "gptsteer/1";

/// Malformed document: wrong shape, missing field, bad schema tag.
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

Json parse_document(std::string_view text);
/// Throws InputError unless doc is an object tagged with kSchema.
void require_schema(const Json& doc);
Json tagged(Json body);

Json to_json(const Rational& r);
Json to_json(const Vector& v);
Json to_json(const Matrix& m);
Rational rational_from(const Json& j);
Vector vector_from(const Json& j);
Matrix matrix_from(const Json& j);

Json to_json(const StateSpace& space);
/// A zoo name, or an inline {label, ambient_dim, vertices} object.
StateSpace space_from(const Json& j);

Json to_json(const Observable& obs, const StateSpace& space);
Observable observable_from(const Json& j, const StateSpace& space);
/// {schema, observables: [...]}, or a single tagged observable.
std::vector<Observable> observables_from(const Json& doc, const StateSpace& space);

Json to_json(const BipartiteState& w);
BipartiteState bipartite_from(const Json& doc);

Json to_json(const Assemblage& a);
/// Validates the assemblage invariants; InvalidAssemblage carries the diagnostic.
Assemblage assemblage_from_json(const Json& doc);

Json to_json(const FarkasCertificate& c);
Json to_json(const MotherObservable& m, const StateSpace& space);
Json to_json(const LhsModel& model);
Json to_json(const SteeringInequality& f, const Assemblage& a);
Json to_json(const JmResult& r, const StateSpace& space);
Json to_json(const LhsResult& r, const Assemblage& a);
Json to_json(const SeparabilityResult& r);
Json to_json(const TheoremReport& report, const StateSpace& space);

/// 64-bit FNV-1a over the pieces, each followed by a NUL separator, as 16 hex digits.
std::string inputs_digest(const std::vector<std::string>& pieces);

}  // namespace gptsteer
