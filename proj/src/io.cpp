#include "gptsteer/io.hpp"

#include <cstdio>

namespace gptsteer {

namespace {

const Json& field(const Json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw InputError(std::string("missing field '") + key + "'");
    return j.at(key);
}

const Json& array_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_array()) throw InputError(std::string("field '") + key + "' must be an array");
    return v;
}

std::string string_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_string()) throw InputError(std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

std::size_t index_field(const Json& j, const char* key) {
    const Json& v = field(j, key);
    if (!v.is_number_unsigned()) throw InputError(std::string("field '") + key + "' must be a nonnegative integer");
    return v.get<std::size_t>();
}

Json effects_object(const std::vector<std::string>& outcomes, const std::vector<Vector>& vectors) {
    Json out = Json::object();
    for (std::size_t k = 0; k < outcomes.size(); ++k) out[outcomes[k]] = to_json(vectors[k]);
    return out;
}

Json labels(const std::vector<Observable>& observables) {
    Json out = Json::array();
    for (const auto& o : observables) out.push_back(o.label);
    return out;
}

}  // namespace

Json parse_document(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

void require_schema(const Json& doc) {
    if (!doc.is_object()) throw InputError("document must be a JSON object");
    if (string_field(doc, "schema") != kSchema) throw InputError("unsupported schema '" + doc.at("schema").get<std::string>() + "'");
}

Json tagged(Json body) {
    Json out = Json::object();
    out["schema"] = kSchema;
    for (auto& [key, value] : body.items()) {
        if (key != "schema") out[key] = std::move(value);
    }
    return out;
}

Json to_json(const Rational& r) { return to_string(r); }

Json to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_string(v(i)));
    return out;
}

Json to_json(const Matrix& m) {
    Json out = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(to_json(Vector(m.row(r).transpose())));
    return out;
}

Rational rational_from(const Json& j) {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (!j.is_string()) throw InputError("rationals must be \"p/q\" strings");
    try {
        return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
}

Vector vector_from(const Json& j) {
    if (!j.is_array() || j.empty()) throw InputError("expected a nonempty array of rationals");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = rational_from(j[i]);
    return v;
}

Matrix matrix_from(const Json& j) {
    if (!j.is_array() || j.empty()) throw InputError("expected a nonempty array of rows");
    const Vector first = vector_from(j[0]);
    Matrix m(static_cast<Eigen::Index>(j.size()), first.size());
    for (std::size_t r = 0; r < j.size(); ++r) {
        const Vector row = vector_from(j[r]);
        if (row.size() != m.cols()) throw InputError("matrix rows differ in length");
        m.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return m;
}

Json to_json(const StateSpace& space) {
    Json vertices = Json::array();
    for (const auto& v : space.vertices()) vertices.push_back(to_json(v));
    return Json{{"label", space.label()}, {"ambient_dim", space.ambient_dim()}, {"vertices", vertices}};
}

StateSpace space_from(const Json& j) {
    if (j.is_string()) return zoo_model(j.get<std::string>());
    std::vector<Vector> vertices;
    for (const auto& v : array_field(j, "vertices")) vertices.push_back(vector_from(v));
    const std::size_t dim = index_field(j, "ambient_dim");
    for (const auto& v : vertices) {
        if (static_cast<std::size_t>(v.size()) != dim) throw InputError("vertex length differs from ambient_dim");
    }
    return StateSpace(string_field(j, "label"), std::move(vertices));
}

Json to_json(const Observable& obs, const StateSpace& space) {
    std::vector<Vector> coeffs;
    for (const auto& e : obs.effects) coeffs.push_back(e.coeffs);
    return Json{{"label", obs.label}, {"space", space.label()}, {"effects", effects_object(obs.outcomes, coeffs)}};
}

Observable observable_from(const Json& j, const StateSpace& space) {
    Observable obs;
    obs.label = string_field(j, "label");
    if (j.contains("space") && string_field(j, "space") != space.label()) {
        throw InputError("observable '" + obs.label + "' belongs to space '" + j.at("space").get<std::string>() + "'");
    }
    const Json& effects = field(j, "effects");
    if (!effects.is_object() || effects.empty()) throw InputError("'effects' must be a nonempty object");
    for (const auto& [outcome, coeffs] : effects.items()) {
        obs.outcomes.push_back(outcome);
        obs.effects.push_back(Effect{vector_from(coeffs)});
    }
    if (!is_valid_observable(obs, space)) throw InputError("observable '" + obs.label + "' is not valid on " + space.label());
    return obs;
}

std::vector<Observable> observables_from(const Json& doc, const StateSpace& space) {
    require_schema(doc);
    if (doc.contains("effects")) return {observable_from(doc, space)};
    std::vector<Observable> out;
    for (const auto& o : array_field(doc, "observables")) out.push_back(observable_from(o, space));
    if (out.empty()) throw InputError("no observables");
    return out;
}

Json to_json(const BipartiteState& w) {
    return tagged(Json{{"space_A", to_json(w.space_a)}, {"space_B", to_json(w.space_b)}, {"matrix", to_json(w.matrix)}});
}

BipartiteState bipartite_from(const Json& doc) {
    require_schema(doc);
    return BipartiteState(space_from(field(doc, "space_A")), space_from(field(doc, "space_B")),
                          matrix_from(field(doc, "matrix")));
}

Json to_json(const Assemblage& a) {
    Json settings = Json::array();
    for (std::size_t x = 0; x < a.settings(); ++x) {
        settings.push_back(Json{{"x", x}, {"elements", effects_object(a.outcomes[x], a.elements[x])}});
    }
    return tagged(Json{{"space_B", to_json(a.space_b)}, {"settings", settings}});
}

Assemblage assemblage_from_json(const Json& doc) {
    require_schema(doc);
    Assemblage a{space_from(field(doc, "space_B")), {}, {}};
    const Json& settings = array_field(doc, "settings");
    a.elements.resize(settings.size());
    a.outcomes.resize(settings.size());
    std::vector<bool> seen(settings.size(), false);
    for (const auto& s : settings) {
        const std::size_t x = index_field(s, "x");
        if (x >= settings.size() || seen[x]) throw InputError("settings must be numbered 0..n-1 without repeats");
        seen[x] = true;
        const Json& elements = field(s, "elements");
        if (!elements.is_object() || elements.empty()) throw InputError("'elements' must be a nonempty object");
        for (const auto& [k, v] : elements.items()) {
            a.outcomes[x].push_back(k);
            a.elements[x].push_back(vector_from(v));
        }
    }
    validate_assemblage(a);
    return a;
}

Json to_json(const FarkasCertificate& c) {
    return Json{{"equality_multipliers", to_json(c.equality_multipliers)},
                {"inequality_multipliers", to_json(c.inequality_multipliers)}};
}

Json to_json(const MotherObservable& m, const StateSpace& space) {
    const MixedRadix tuples = m.tuples();
    Json entries = Json::array();
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        const auto digits = tuples.digits(t);
        Json outcome = Json::array();
        for (std::size_t x = 0; x < digits.size(); ++x) outcome.push_back(m.axes[x].outcomes[digits[x]]);
        entries.push_back(Json{{"outcomes", outcome}, {"effect", to_json(m.effects[t].coeffs)}});
    }
    return Json{{"space", space.label()}, {"axes", labels(m.axes)}, {"effects", entries}};
}

Json to_json(const LhsModel& model) {
    Json lambdas = Json::array();
    for (const auto& l : model.lambdas) {
        Json responses = Json::array();
        for (const auto& row : l.response) {
            Json r = Json::array();
            for (const auto& p : row) r.push_back(to_json(p));
            responses.push_back(r);
        }
        lambdas.push_back(Json{{"weight", to_json(l.weight)}, {"state", to_json(l.state.coords)}, {"responses", responses}});
    }
    return Json{{"lambdas", lambdas}};
}

Json to_json(const SteeringInequality& f, const Assemblage& a) {
    Json coefficients = Json::array();
    for (std::size_t x = 0; x < f.coefficients.size(); ++x) {
        coefficients.push_back(Json{{"x", x}, {"elements", effects_object(a.outcomes[x], f.coefficients[x])}});
    }
    return Json{{"coefficients", coefficients}, {"violation", to_json(f.violation)}};
}

Json to_json(const JmResult& r, const StateSpace& space) {
    Json out{{"status", r.jointly_measurable() ? "jointly_measurable" : "incompatible"}};
    if (r.jointly_measurable()) {
        out["mother"] = to_json(r.mother, space);
    } else {
        out["certificate"] = to_json(r.certificate);
    }
    return out;
}

Json to_json(const LhsResult& r, const Assemblage& a) {
    Json out{{"status", r.unsteerable() ? "unsteerable" : "steerable"}};
    if (r.unsteerable()) {
        out["model"] = to_json(r.model);
    } else {
        out["certificate"] = to_json(r.inequality, a);
        out["farkas"] = to_json(r.certificate);
    }
    return out;
}

Json to_json(const SeparabilityResult& r) {
    if (r.separable) {
        Json terms = Json::array();
        for (const auto& t : r.decomposition) {
            terms.push_back(Json{{"weight", to_json(t.weight)}, {"a", to_json(t.a.coords)}, {"b", to_json(t.b.coords)}});
        }
        return Json{{"status", "separable"}, {"decomposition", terms}};
    }
    return Json{{"status", "entangled"}, {"witness", to_json(r.witness)}, {"certificate", to_json(r.certificate)}};
}

Json to_json(const TheoremReport& report, const StateSpace& space) {
    Json trials = Json::array();
    for (const auto& t : report.trials) {
        Json observables = Json::array();
        for (const auto& o : t.observables) observables.push_back(to_json(o, space));
        Json entry{{"index", t.index},
                   {"kind", t.kind},
                   {"observables", observables},
                   {"jointly_measurable", t.jointly_measurable},
                   {"unsteerable", t.unsteerable},
                   {"agree", t.agree},
                   {"certificates_verified", t.certificates_verified},
                   {"lhs_construction_ok", t.lhs_construction_ok}};
        if (t.round_trip_checked) entry["round_trip_ok"] = t.round_trip_ok;
        entry["extra_states"] = t.extra_states;
        entry["extra_failures"] = t.extra_failures;
        trials.push_back(std::move(entry));
    }
    const Json config{{"denominator", report.config.denominator},
                      {"min_observables", report.config.min_observables},
                      {"max_observables", report.config.max_observables},
                      {"extra_states", report.config.extra_states}};
    const Json summary{{"trials", report.trials.size()},
                       {"jointly_measurable", report.jointly_measurable_count()},
                       {"disagreements", report.disagreements()},
                       {"failures", report.failures()},
                       {"passed", report.passed()}};
    return Json{{"model", report.model},
                {"seed", report.seed},
                {"requested_trials", report.requested_trials},
                {"sampler", config},
                {"summary", summary},
                {"trials", trials}};
}

std::string inputs_digest(const std::vector<std::string>& pieces) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](unsigned char c) {
        h ^= c;
        h *= 0x100000001b3ULL;
    };
    for (const auto& p : pieces) {
        for (unsigned char c : p) feed(c);
        feed(0);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace gptsteer
