#include "gptsteer/compatibility.hpp"

#include <stdexcept>

namespace gptsteer {

MixedRadix::MixedRadix(std::vector<std::size_t> radix) : radix_(std::move(radix)) {
    for (auto r : radix_) {
        if (r == 0) throw std::invalid_argument("MixedRadix: zero radix");
        count_ *= r;
    }
}

std::vector<std::size_t> MixedRadix::digits(std::size_t index) const {
    std::vector<std::size_t> out(radix_.size());
    for (std::size_t p = radix_.size(); p-- > 0;) {
        out[p] = index % radix_[p];
        index /= radix_[p];
    }
    return out;
}

std::size_t MixedRadix::index(const std::vector<std::size_t>& digits) const {
    std::size_t index = 0;
    for (std::size_t p = 0; p < radix_.size(); ++p) index = index * radix_[p] + digits[p];
    return index;
}

MixedRadix MotherObservable::tuples() const {
    std::vector<std::size_t> radix;
    for (const auto& axis : axes) radix.push_back(axis.size());
    return MixedRadix(std::move(radix));
}

namespace {

void check_family(const std::vector<Observable>& observables, const StateSpace& space) {
    if (observables.empty()) throw std::invalid_argument("empty observable list");
    for (const auto& obs : observables) {
        if (!is_valid_observable(obs, space)) {
            throw std::invalid_argument("observable '" + obs.label + "' is not valid on " + space.label());
        }
    }
}

MixedRadix radix_of(const std::vector<Observable>& observables) {
    std::vector<std::size_t> radix;
    for (const auto& obs : observables) radix.push_back(obs.size());
    return MixedRadix(std::move(radix));
}

}  // namespace

LinearSystem jm_system(const std::vector<Observable>& observables, const StateSpace& space) {
    check_family(observables, space);
    const MixedRadix tuples = radix_of(observables);
    const Eigen::Index dim = space.ambient_dim();
    const auto count = static_cast<Eigen::Index>(tuples.size());
    LinearSystem system(count * dim);

    for (Eigen::Index t = 0; t < count; ++t) {
        for (const auto& v : space.vertices()) {
            Vector row = Vector::Zero(system.variable_count);
            row.segment(t * dim, dim) = v;
            system.add_inequality(std::move(row), 0);
        }
    }
    const Vector u = space.unit_effect().coeffs;
    for (Eigen::Index d = 0; d < dim; ++d) {
        Vector row = Vector::Zero(system.variable_count);
        for (Eigen::Index t = 0; t < count; ++t) row(t * dim + d) = 1;
        system.add_equality(std::move(row), u(d));
    }
    for (std::size_t j = 0; j < observables.size(); ++j) {
        for (std::size_t k = 0; k < observables[j].size(); ++k) {
            for (Eigen::Index d = 0; d < dim; ++d) {
                Vector row = Vector::Zero(system.variable_count);
                for (Eigen::Index t = 0; t < count; ++t) {
                    if (tuples.digits(static_cast<std::size_t>(t))[j] == k) row(t * dim + d) = 1;
                }
                system.add_equality(std::move(row), observables[j].effects[k].coeffs(d));
            }
        }
    }
    return system;
}

JmResult check_joint_measurability(const std::vector<Observable>& observables, const StateSpace& space) {
    const LinearSystem system = jm_system(observables, space);
    const auto lp = lp_feasible(system);
    JmResult result;
    if (!lp.feasible()) {
        result.status = JmStatus::incompatible;
        result.certificate = lp.certificate;
        return result;
    }
    result.status = JmStatus::jointly_measurable;
    result.mother.axes = observables;
    const Eigen::Index dim = space.ambient_dim();
    const std::size_t count = radix_of(observables).size();
    for (std::size_t t = 0; t < count; ++t) {
        result.mother.effects.push_back(Effect{lp.witness.segment(static_cast<Eigen::Index>(t) * dim, dim)});
    }
    if (!verify_mother(result.mother, space)) {
        throw std::logic_error("joint measurability: mother observable failed re-verification");
    }
    return result;
}

bool verify_mother(const MotherObservable& mother, const StateSpace& space) {
    const MixedRadix tuples = mother.tuples();
    if (mother.effects.size() != tuples.size()) return false;
    Vector total = Vector::Zero(space.ambient_dim());
    for (const auto& e : mother.effects) {
        if (!is_nonnegative_effect(e.coeffs, space)) return false;
        total += e.coeffs;
    }
    if (total != space.unit_effect().coeffs) return false;
    for (std::size_t j = 0; j < mother.axes.size(); ++j) {
        const Observable marginal = marginalize_mother(mother, j);
        for (std::size_t k = 0; k < marginal.size(); ++k) {
            if (marginal.effects[k] != mother.axes[j].effects[k]) return false;
        }
    }
    return true;
}

bool audit(const JmResult& result, const std::vector<Observable>& observables, const StateSpace& space) {
    if (result.jointly_measurable()) {
        if (result.mother.axes.size() != observables.size()) return false;
        for (std::size_t j = 0; j < observables.size(); ++j) {
            if (result.mother.axes[j].effects != observables[j].effects) return false;
        }
        return verify_mother(result.mother, space);
    }
    return verify_certificate(jm_system(observables, space), result.certificate);
}

Observable marginalize_mother(const MotherObservable& mother, std::size_t axis) {
    if (axis >= mother.axes.size()) throw std::out_of_range("marginalize_mother: axis out of range");
    const MixedRadix tuples = mother.tuples();
    const Observable& source = mother.axes[axis];
    const Eigen::Index dim = mother.effects.front().coeffs.size();
    Observable out{source.label, source.outcomes, std::vector<Effect>(source.size(), Effect{Vector::Zero(dim)})};
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        out.effects[tuples.digits(t)[axis]].coeffs += mother.effects[t].coeffs;
    }
    return out;
}

namespace {

bool jm_at(const std::vector<Observable>& observables, const StateSpace& space, const Rational& eta) {
    std::vector<Observable> noisy;
    for (const auto& obs : observables) noisy.push_back(depolarize_observable(obs, eta, space));
    return check_joint_measurability(noisy, space).jointly_measurable();
}

}  // namespace

Bracket jm_noise_threshold(const std::vector<Observable>& observables, const StateSpace& space,
                           const Rational& precision) {
    if (precision <= 0) throw std::invalid_argument("jm_noise_threshold: precision must be positive");
    check_family(observables, space);
    if (jm_at(observables, space, 1)) return {1, 1};
    Bracket bracket{0, 1};
    while (bracket.hi - bracket.lo > precision) {
        const Rational mid = (bracket.lo + bracket.hi) / 2;
        (jm_at(observables, space, mid) ? bracket.lo : bracket.hi) = mid;
    }
    return bracket;
}

std::vector<SubsetStatus> subset_jm_scan(const std::vector<Observable>& observables, const StateSpace& space) {
    if (observables.size() > 4) throw std::invalid_argument("subset_jm_scan: at most 4 observables");
    check_family(observables, space);
    std::vector<SubsetStatus> out;
    const std::size_t m = observables.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << m); ++mask) {
        SubsetStatus entry;
        std::vector<Observable> subset;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::size_t{1} << i)) {
                entry.members.push_back(i);
                subset.push_back(observables[i]);
            }
        }
        entry.status = check_joint_measurability(subset, space).status;
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace gptsteer
