#include "gptsteer/cli.hpp"

#include "gptsteer/io.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace gptsteer {

namespace {

class AuditFailure : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

struct Options {
    std::string model;
    std::string model_file;
    std::string out = "json";
    std::uint64_t seed = 7;
    std::size_t trials = 100;
    std::string precision = "1/64";
    std::string side = "A";
    std::string effect;
    std::string input;
    std::string zoo_name;
};

struct Reply {
    int exit_code;
    Json result;
    std::string text;
};

class Session {
  public:
    explicit Session(const std::vector<std::string>& args) : args_(args) { pieces_ = args; }

    std::string read(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InputError("cannot read '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        pieces_.push_back(buf.str());
        spdlog::debug("read {} ({} bytes)", path, pieces_.back().size());
        return pieces_.back();
    }

    Json document(const std::string& path) { return parse_document(read(path)); }

    StateSpace space(const Options& o) {
        if (!o.model.empty() && !o.model_file.empty()) throw InputError("--model and --model-file are exclusive");
        if (!o.model_file.empty()) {
            const Json doc = document(o.model_file);
            require_schema(doc);
            return space_from(doc);
        }
        if (o.model.empty()) throw InputError("a model is required (--model NAME or --model-file PATH)");
        return zoo_model(o.model);
    }

    CommandOutput finish(const Reply& reply, const std::string& format) const {
        CommandOutput out;
        out.exit_code = reply.exit_code;
        if (format == "text") {
            out.out = reply.text;
            return out;
        }
        std::string command = "gptsteer";
        for (const auto& a : args_) command += " " + a;
        const Json doc = tagged(Json{{"command", command},
                                     {"inputs_digest", inputs_digest(pieces_)},
                                     {"result", reply.result},
                                     {"exit_status", reply.exit_code}});
        out.out = doc.dump(2) + "\n";
        return out;
    }

  private:
    std::vector<std::string> args_;
    std::vector<std::string> pieces_;
};

void self_audit(bool ok, const char* what) {
    if (!ok) throw AuditFailure(std::string("self-audit failed: ") + what);
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

Side parse_side(const std::string& s) {
    if (s == "A") return Side::A;
    if (s == "B") return Side::B;
    throw InputError("--side must be A or B");
}

Reply cmd_zoo_list() {
    Json models = Json::array();
    std::string text;
    for (const auto& name : zoo_names()) {
        models.push_back(name);
        text += name + "\n";
    }
    return {kHolds, Json{{"models", models}}, text};
}

Reply cmd_zoo_show(const std::string& name) {
    const StateSpace s = zoo_model(name);
    Json result = to_json(s);
    Json effects = Json::array();
    for (const auto& e : s.extremal_effects()) effects.push_back(to_json(e.coeffs));
    result["vertex_count"] = s.vertex_count();
    result["extremal_effects"] = effects;
    result["extremal_effect_count"] = s.extremal_effects().size();

    std::string text = s.label() + " (dimension " + std::to_string(s.ambient_dim()) + ")\n";
    text += std::to_string(s.vertex_count()) + " vertices\n";
    for (const auto& v : s.vertices()) text += "  " + to_string(v) + "\n";
    text += std::to_string(s.extremal_effects().size()) + " extremal effects\n";
    for (const auto& e : s.extremal_effects()) text += "  " + to_string(e.coeffs) + "\n";
    return {kHolds, result, text};
}

Reply cmd_check_jm(Session& session, const Options& o) {
    const StateSpace space = session.space(o);
    const auto observables = observables_from(session.document(o.input), space);
    const JmResult r = check_joint_measurability(observables, space);
    self_audit(audit(r, observables, space), "joint measurability");
    spdlog::info("check-jm: {} observables, {}", observables.size(), r.jointly_measurable() ? "JM" : "incompatible");
    std::string text = r.jointly_measurable() ? "jointly measurable\n" : "incompatible (Farkas certificate verified)\n";
    if (r.jointly_measurable()) {
        const MixedRadix tuples = r.mother.tuples();
        for (std::size_t t = 0; t < tuples.size(); ++t) {
            std::string tuple;
            for (std::size_t d : tuples.digits(t)) tuple += (tuple.empty() ? "" : ",") + std::to_string(d);
            text += "  G[" + tuple + "] = " + to_string(r.mother.effects[t].coeffs) + "\n";
        }
    }
    return {r.jointly_measurable() ? kHolds : kRefuted, to_json(r, space), text};
}

Reply cmd_jm_threshold(Session& session, const Options& o) {
    const StateSpace space = session.space(o);
    const auto observables = observables_from(session.document(o.input), space);
    Rational precision;
    try {
        precision = parse_rational(o.precision);
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("--precision: ") + e.what());
    }
    if (precision <= 0) throw InputError("--precision must be positive");
    const Bracket b = jm_noise_threshold(observables, space, precision);
    // The bracket invariant, rechecked here.
    auto jm_at = [&](const Rational& eta) {
        std::vector<Observable> noisy;
        for (const auto& obs : observables) noisy.push_back(depolarize_observable(obs, eta, space));
        return check_joint_measurability(noisy, space).jointly_measurable();
    };
    self_audit(b.lo <= b.hi && b.hi - b.lo <= precision && jm_at(b.lo) && (b.hi == 1 || !jm_at(b.hi)), "threshold bracket");
    const Json result{{"lo", to_json(b.lo)}, {"hi", to_json(b.hi)}, {"precision", to_json(precision)}};
    return {kHolds, result, "threshold in [" + to_string(b.lo) + ", " + to_string(b.hi) + "]\n"};
}

Reply cmd_check_lhs(Session& session, const Options& o) {
    const Assemblage a = assemblage_from_json(session.document(o.input));
    if (!o.model.empty() || !o.model_file.empty()) {
        if (!(session.space(o) == a.space_b)) throw InputError("assemblage space_B differs from the given model");
    }
    const LhsResult r = check_lhs(a);
    self_audit(audit(r, a), "LHS");
    spdlog::info("check-lhs: {} settings, {}", a.settings(), r.unsteerable() ? "unsteerable" : "steerable");
    std::string text;
    if (r.unsteerable()) {
        text = "unsteerable (LHS model with " + std::to_string(r.model.lambdas.size()) + " hidden states)\n";
    } else {
        text = "steerable (steering inequality violated by " + to_string(r.inequality.violation) + ")\n";
    }
    return {r.unsteerable() ? kHolds : kRefuted, to_json(r, a), text};
}

Reply cmd_theorem_verify(Session& session, const Options& o) {
    const StateSpace space = session.space(o);
    if (o.trials == 0) throw InputError("--trials must be positive");
    const TheoremReport report = theorem_verify(space, o.trials, SamplerConfig{}, o.seed);
    spdlog::info("theorem-verify: {} trials, {} disagreements, {} failures", report.trials.size(),
                 report.disagreements(), report.failures());
    std::string text;
    for (const auto& t : report.trials) {
        text += "#" + std::to_string(t.index) + " " + t.kind + " n=" + std::to_string(t.observables.size()) +
                " jm=" + yes_no(t.jointly_measurable) + " unsteerable=" + yes_no(t.unsteerable) +
                (t.agree ? "" : " DISAGREE") + "\n";
    }
    text += std::to_string(report.trials.size()) + " trials, " + std::to_string(report.jointly_measurable_count()) +
            " jointly measurable, " + std::to_string(report.disagreements()) + " disagreements, " +
            std::to_string(report.failures()) + " failures\n";
    return {report.passed() ? kHolds : kRefuted, to_json(report, space), text};
}

Reply cmd_tensor(Session& session, const Options& o, const std::string& action) {
    const BipartiteState w = bipartite_from(session.document(o.input));
    if (action == "check-max") {
        for (const auto& ea : w.space_a.extremal_effects()) {
            for (const auto& eb : w.space_b.extremal_effects()) {
                const Rational p = pairing(w, ea, eb);
                if (p < 0) {
                    const Json result{{"status", "outside"},
                                      {"certificate", Json{{"effect_A", to_json(ea.coeffs)},
                                                           {"effect_B", to_json(eb.coeffs)},
                                                           {"value", to_json(p)}}}};
                    self_audit(!in_max_tensor(w), "max tensor");
                    return {kRefuted, result, "outside the max tensor product: pairing " + to_string(p) + "\n"};
                }
            }
        }
        self_audit(in_max_tensor(w), "max tensor");
        return {kHolds, Json{{"status", "inside"}}, "inside the max tensor product\n"};
    }
    if (!in_max_tensor(w)) throw InputError("state is not in the max tensor product");
    if (action == "check-sep") {
        const SeparabilityResult r = is_separable(w);
        self_audit(audit(r, w), "separability");
        return {r.separable ? kHolds : kRefuted, to_json(r),
                r.separable ? "separable (" + std::to_string(r.decomposition.size()) + " product terms)\n"
                            : std::string("entangled (witness verified)\n")};
    }
    const Side side = parse_side(o.side);
    if (action == "marginal") {
        const State m = marginal(w, side);
        return {kHolds, Json{{"side", o.side}, {"state", to_json(m.coords)}}, to_string(m.coords) + "\n"};
    }
    // conditional
    const StateSpace& on = side == Side::A ? w.space_a : w.space_b;
    Vector e;
    if (o.effect.empty()) {
        e = on.unit_effect().coeffs;
    } else {
        try {
            e = parse_vector(o.effect);
        } catch (const std::invalid_argument& ex) {
            throw InputError(std::string("--effect: ") + ex.what());
        }
        if (e.size() != on.ambient_dim() || !is_valid_effect(e, on)) throw InputError("--effect is not a valid effect");
    }
    const ConditionalState c = conditional_state(w, Effect{e}, side);
    const Json result{{"side", o.side},
                      {"effect", to_json(e)},
                      {"probability", to_json(c.probability)},
                      {"state", to_json(c.state.coords)}};
    return {kHolds, result, "p = " + to_string(c.probability) + ", state " + to_string(c.state.coords) + "\n"};
}

}  // namespace

void configure_logging() {
    static auto logger = [] {
        auto l = spdlog::stderr_logger_st("gptsteer");
        l->set_pattern("gptsteer: %l: %v");
        spdlog::set_default_logger(l);
        return l;
    }();
    const char* env = std::getenv("GPTSTEER_LOG");
    const std::string level = env ? env : "warn";
    auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to off; keep the default for those.
    if (parsed == spdlog::level::off && level != "off") parsed = spdlog::level::warn;
    logger->set_level(parsed);
}

CommandOutput run_cli(const std::vector<std::string>& args) {
    configure_logging();
    Options o;
    CLI::App app{"Exact joint-measurability and steering checks for polytope GPTs", "gptsteer"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--model", o.model, "zoo model name");
    app.add_option("--model-file", o.model_file, "model JSON file");
    app.add_option("--out", o.out, "output format")->check(CLI::IsMember({"json", "text"}));

    std::function<Reply(Session&)> action;

    auto* zoo = app.add_subcommand("zoo", "list or show built-in models")->require_subcommand(1)->fallthrough();
    zoo->add_subcommand("list", "list model names")->callback([&] { action = [](Session&) { return cmd_zoo_list(); }; });
    auto* show = zoo->add_subcommand("show", "show vertices and extremal effects");
    show->add_option("name", o.zoo_name)->required();
    show->callback([&] { action = [&](Session&) { return cmd_zoo_show(o.zoo_name); }; });

    auto* jm = app.add_subcommand("check-jm", "joint measurability of an observables file");
    jm->add_option("observables", o.input)->required();
    jm->callback([&] { action = [&](Session& s) { return cmd_check_jm(s, o); }; });

    auto* th = app.add_subcommand("jm-threshold", "largest depolarizing parameter keeping the family compatible");
    th->add_option("observables", o.input)->required();
    th->add_option("--precision", o.precision, "bracket width p/q");
    th->callback([&] { action = [&](Session& s) { return cmd_jm_threshold(s, o); }; });

    auto* lhs = app.add_subcommand("check-lhs", "LHS model search for an assemblage file");
    lhs->add_option("assemblage", o.input)->required();
    lhs->callback([&] { action = [&](Session& s) { return cmd_check_lhs(s, o); }; });

    auto* tv = app.add_subcommand("theorem-verify", "compare joint measurability with unsteerability on random families");
    tv->add_option("--trials", o.trials);
    tv->add_option("--seed", o.seed);
    tv->callback([&] { action = [&](Session& s) { return cmd_theorem_verify(s, o); }; });

    auto* tensor = app.add_subcommand("tensor", "bipartite state operations")->require_subcommand(1)->fallthrough();
    for (const std::string name : {"check-max", "check-sep", "marginal", "conditional"}) {
        auto* sub = tensor->add_subcommand(name);
        sub->add_option("state", o.input)->required();
        if (name == "marginal" || name == "conditional") sub->add_option("--side", o.side, "A or B");
        if (name == "conditional") sub->add_option("--effect", o.effect, "comma-separated coefficients");
        sub->callback([&, name] { action = [&, name](Session& s) { return cmd_tensor(s, o, name); }; });
    }

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        std::ostringstream out, err;
        const int code = app.exit(e, out, err);
        return {code == 0 ? kHolds : kInputError, out.str(), err.str()};
    }

    Session session(args);
    try {
        return session.finish(action(session), o.out);
    } catch (const AuditFailure& e) {
        return {kInternalError, "", std::string("gptsteer: internal error: ") + e.what() + "\n"};
    } catch (const NullConditioning& e) {
        return {kInputError, "", std::string("gptsteer: ") + e.what() + "\n"};
    } catch (const std::invalid_argument& e) {
        return {kInputError, "", std::string("gptsteer: ") + e.what() + "\n"};
    } catch (const std::out_of_range& e) {
        return {kInputError, "", std::string("gptsteer: ") + e.what() + "\n"};
    } catch (const nlohmann::json::exception& e) {
        return {kInputError, "", std::string("gptsteer: bad input: ") + e.what() + "\n"};
    } catch (const std::exception& e) {
        return {kInternalError, "", std::string("gptsteer: internal error: ") + e.what() + "\n"};
    }
}

}  // namespace gptsteer
