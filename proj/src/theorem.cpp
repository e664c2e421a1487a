#include "gptsteer/theorem.hpp"

#include <algorithm>

namespace gptsteer {

namespace {

constexpr int kMaxRejections = 100000;

Rational floor_to_grid(const Rational& x, long den, bool up) {
    // Grid point n/den on the requested side of x.
    const Rational scaled = x * den;
    boost::multiprecision::mpz_int n = boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
    Rational candidate(n, den);
    if (up && candidate < x) candidate += Rational(1, den);
    if (!up && candidate > x) candidate -= Rational(1, den);
    return candidate;
}

}  // namespace

std::size_t Sampler::below(std::size_t bound) {
    return static_cast<std::size_t>(engine_() % bound);
}

Effect Sampler::effect(const StateSpace& space, long denominator) {
    const Eigen::Index dim = space.ambient_dim();
    Vector lo = space.extremal_effects().front().coeffs, hi = lo;
    for (const auto& e : space.extremal_effects()) {
        lo = lo.cwiseMin(e.coeffs);
        hi = hi.cwiseMax(e.coeffs);
    }
    std::vector<Rational> start(dim);
    std::vector<std::size_t> steps(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
        start[d] = floor_to_grid(lo(d), denominator, true);
        const Rational end = floor_to_grid(hi(d), denominator, false);
        steps[d] = static_cast<std::size_t>(((end - start[d]) * denominator).convert_to<long>()) + 1;
    }
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        Vector e(dim);
        for (Eigen::Index d = 0; d < dim; ++d) {
            e(d) = start[d] + Rational(static_cast<long>(below(steps[d])), denominator);
        }
        if (is_valid_effect(e, space)) return Effect{std::move(e)};
    }
    throw std::runtime_error("effect sampler: rejection limit reached");
}

Observable Sampler::dichotomic_observable(const StateSpace& space, long denominator, std::string label) {
    return dichotomic(std::move(label), effect(space, denominator), space);
}

std::vector<Observable> Sampler::observable_set(const StateSpace& space, const SamplerConfig& config) {
    const std::size_t span = config.max_observables - config.min_observables + 1;
    const std::size_t count = config.min_observables + below(span);
    std::vector<Observable> out;
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(dichotomic_observable(space, config.denominator, "A" + std::to_string(i)));
    }
    return out;
}

State Sampler::state(const StateSpace& space) {
    std::vector<Rational> weights(space.vertex_count());
    long total = 0;
    for (auto& w : weights) {
        const long draw = static_cast<long>(below(5));
        w = draw;
        total += draw;
    }
    if (total == 0) {
        weights[below(weights.size())] = 1;
        total = 1;
    }
    Vector coords = Vector::Zero(space.ambient_dim());
    for (std::size_t i = 0; i < weights.size(); ++i) coords += (weights[i] / total) * space.vertices()[i];
    return State{std::move(coords)};
}

BipartiteState Sampler::max_tensor_state(const StateSpace& space, const BipartiteState& entangled) {
    auto product = [&] { return product_state(state(space), space, state(space), space); };
    const Rational p(static_cast<long>(1 + below(3)), 4);
    switch (below(3)) {
        case 0:
            return product();
        case 1:
            return mix_bipartite({product(), product()}, {p, 1 - p});
        default:
            return mix_bipartite({entangled, product()}, {p, 1 - p});
    }
}

std::vector<std::vector<Observable>> standard_probes(const StateSpace& space) {
    if (!(space == zoo_gbit())) return {};
    const std::vector<Observable> sharp{gbit_fiducial_x(), gbit_fiducial_y()};
    std::vector<std::vector<Observable>> probes{sharp};
    for (const Rational& eta : {Rational(1, 4), Rational(1, 2), Rational(3, 4)}) {
        probes.push_back({depolarize_observable(sharp[0], eta, space), depolarize_observable(sharp[1], eta, space)});
    }
    return probes;
}

TrialRecord run_trial(const std::vector<Observable>& observables, const BipartiteState& phi, Sampler& sampler,
                      const SamplerConfig& config) {
    const StateSpace& space = phi.space_a;
    TrialRecord record;
    record.observables = observables;

    const JmResult jm = check_joint_measurability(observables, space);
    const Assemblage assemblage = assemblage_from(phi, observables);
    const LhsResult lhs = check_lhs(assemblage);
    record.jointly_measurable = jm.jointly_measurable();
    record.unsteerable = lhs.unsteerable();
    record.agree = record.jointly_measurable == record.unsteerable;
    record.certificates_verified = audit(jm, observables, space) && audit(lhs, assemblage);
    if (!jm.jointly_measurable()) {
        record.lhs_construction_ok = true;
        return record;
    }

    const LhsModel model = jm_to_lhs(jm.mother, phi);
    record.lhs_construction_ok = reproduces(model, assemblage);

    record.round_trip_checked = true;
    try {
        const MotherObservable rebuilt = lhs_to_mother(model, phi);
        bool equal = rebuilt.axes.size() == observables.size();
        for (std::size_t x = 0; equal && x < observables.size(); ++x) {
            equal = marginalize_mother(rebuilt, x).effects == observables[x].effects;
        }
        record.round_trip_ok = equal && verify_mother(rebuilt, space);
    } catch (const std::exception&) {
        record.round_trip_ok = false;
    }

    for (std::size_t i = 0; i < config.extra_states; ++i) {
        const BipartiteState w = sampler.max_tensor_state(space, phi);
        ++record.extra_states;
        const Assemblage a = assemblage_from(w, observables);
        const LhsResult r = check_lhs(a);
        const bool ok = in_max_tensor(w) && reproduces(jm_to_lhs(jm.mother, w), a) && r.unsteerable() && audit(r, a);
        if (!ok) ++record.extra_failures;
    }
    return record;
}

std::size_t TheoremReport::disagreements() const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const auto& t) { return !t.agree; }));
}

std::size_t TheoremReport::failures() const {
    return static_cast<std::size_t>(std::count_if(trials.begin(), trials.end(), [](const auto& t) {
        return !t.certificates_verified || !t.lhs_construction_ok || (t.round_trip_checked && !t.round_trip_ok) ||
               t.extra_failures > 0;
    }));
}

std::size_t TheoremReport::jointly_measurable_count() const {
    return static_cast<std::size_t>(
        std::count_if(trials.begin(), trials.end(), [](const auto& t) { return t.jointly_measurable; }));
}

TheoremReport theorem_verify(const StateSpace& space, std::size_t n_trials, const SamplerConfig& config,
                             std::uint64_t seed) {
    if (config.denominator <= 0 || config.min_observables == 0 || config.max_observables < config.min_observables) {
        throw std::invalid_argument("theorem_verify: bad sampler configuration");
    }
    const BipartiteState phi = canonical_max_entangled(space);
    TheoremReport report{space.label(), seed, n_trials, config, {}};
    Sampler sampler(seed);
    std::size_t index = 0;
    for (const auto& probe : standard_probes(space)) {
        TrialRecord record = run_trial(probe, phi, sampler, config);
        record.index = index++;
        record.kind = "probe";
        report.trials.push_back(std::move(record));
    }
    for (std::size_t t = 0; t < n_trials; ++t) {
        const auto observables = sampler.observable_set(space, config);
        TrialRecord record = run_trial(observables, phi, sampler, config);
        record.index = index++;
        record.kind = "random";
        report.trials.push_back(std::move(record));
    }
    return report;
}

}  // namespace gptsteer
