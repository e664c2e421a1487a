#include "gptsteer/steering.hpp"

namespace gptsteer {

namespace {

MixedRadix strategies_of(const Assemblage& assemblage) {
    std::vector<std::size_t> radix;
    for (const auto& setting : assemblage.elements) radix.push_back(setting.size());
    return MixedRadix(std::move(radix));
}

}  // namespace

Vector Assemblage::bob_marginal() const {
    Vector sum = Vector::Zero(space_b.ambient_dim());
    for (const auto& element : elements.front()) sum += element;
    return sum;
}

void validate_assemblage(const Assemblage& assemblage) {
    const Eigen::Index dim = assemblage.space_b.ambient_dim();
    if (assemblage.elements.empty()) throw InvalidAssemblage("assemblage has no settings");
    if (assemblage.outcomes.size() != assemblage.elements.size()) {
        throw InvalidAssemblage("assemblage outcome labels do not match its settings");
    }
    std::optional<Vector> reference;
    for (std::size_t x = 0; x < assemblage.elements.size(); ++x) {
        const auto& setting = assemblage.elements[x];
        if (setting.empty()) throw InvalidAssemblage("setting " + std::to_string(x) + " has no outcomes");
        if (assemblage.outcomes[x].size() != setting.size()) {
            throw InvalidAssemblage("setting " + std::to_string(x) + " has mismatched outcome labels");
        }
        Vector sum = Vector::Zero(dim);
        for (std::size_t k = 0; k < setting.size(); ++k) {
            if (setting[k].size() != dim) {
                throw InvalidAssemblage("element (" + std::to_string(x) + "," + std::to_string(k) + ") has wrong length");
            }
            if (!is_valid_subnormalized_state(setting[k], assemblage.space_b)) {
                throw InvalidAssemblage("element (" + std::to_string(x) + "," + std::to_string(k) +
                                        ") is not a sub-normalized state");
            }
            sum += setting[k];
        }
        if (!reference) {
            reference = sum;
        } else if (sum != *reference) {
            throw InvalidAssemblage("no-signaling violated: setting " + std::to_string(x) + " sums to " +
                                    to_string(sum) + " but setting 0 sums to " + to_string(*reference));
        }
    }
    if ((*reference)(0) != 1) throw InvalidAssemblage("Bob's marginal is not normalized");
}

Assemblage assemblage_from(const BipartiteState& w, const std::vector<Observable>& observables) {
    if (!in_max_tensor(w)) throw std::invalid_argument("assemblage_from: state is not in the max tensor product");
    Assemblage out{w.space_b, {}, {}};
    for (const auto& obs : observables) {
        if (!is_valid_observable(obs, w.space_a)) {
            throw std::invalid_argument("assemblage_from: observable '" + obs.label + "' is not valid on " +
                                        w.space_a.label());
        }
        std::vector<Vector> setting;
        for (const auto& e : obs.effects) setting.push_back(conditional_subnormalized(w, e, Side::A));
        out.elements.push_back(std::move(setting));
        out.outcomes.push_back(obs.outcomes);
    }
    return out;
}

std::vector<std::vector<Vector>> reconstruct(const LhsModel& model, Eigen::Index dim) {
    std::vector<std::vector<Vector>> out;
    if (model.lambdas.empty()) return out;
    for (const auto& row : model.lambdas.front().response) out.emplace_back(row.size(), Vector::Zero(dim));
    for (const auto& lambda : model.lambdas) {
        if (lambda.response.size() != out.size()) throw StructuralError("LHS model: inconsistent setting count");
        for (std::size_t x = 0; x < out.size(); ++x) {
            if (lambda.response[x].size() != out[x].size()) throw StructuralError("LHS model: inconsistent outcome count");
            for (std::size_t k = 0; k < out[x].size(); ++k) {
                const Rational& p = lambda.response[x][k];
                if (p != 0) out[x][k] += lambda.weight * p * lambda.state.coords;
            }
        }
    }
    return out;
}

bool reproduces(const LhsModel& model, const Assemblage& assemblage) {
    Rational total(0);
    for (const auto& lambda : model.lambdas) {
        if (lambda.weight < 0) return false;
        total += lambda.weight;
        if (!is_valid_state(lambda.state.coords, assemblage.space_b)) return false;
        for (const auto& row : lambda.response) {
            Rational row_sum(0);
            for (const auto& p : row) {
                if (p < 0) return false;
                row_sum += p;
            }
            if (row_sum != 1) return false;
        }
    }
    if (total != 1) return false;
    try {
        return reconstruct(model, assemblage.space_b.ambient_dim()) == assemblage.elements;
    } catch (const StructuralError&) {
        return false;
    }
}

LinearSystem lhs_system(const Assemblage& assemblage) {
    const MixedRadix strategies = strategies_of(assemblage);
    const auto& vertices = assemblage.space_b.vertices();
    const auto nv = static_cast<Eigen::Index>(vertices.size());
    const Eigen::Index dim = assemblage.space_b.ambient_dim();
    LinearSystem system(static_cast<Eigen::Index>(strategies.size()) * nv);
    for (std::size_t x = 0; x < assemblage.settings(); ++x) {
        for (std::size_t k = 0; k < assemblage.elements[x].size(); ++k) {
            for (Eigen::Index d = 0; d < dim; ++d) {
                Vector row = Vector::Zero(system.variable_count);
                for (std::size_t lambda = 0; lambda < strategies.size(); ++lambda) {
                    if (strategies.digits(lambda)[x] != k) continue;
                    for (Eigen::Index v = 0; v < nv; ++v) {
                        row(static_cast<Eigen::Index>(lambda) * nv + v) = vertices[v](d);
                    }
                }
                system.add_equality(std::move(row), assemblage.elements[x][k](d));
            }
        }
    }
    for (Eigen::Index i = 0; i < system.variable_count; ++i) system.add_nonnegativity(i);
    return system;
}

LhsResult check_lhs(const Assemblage& assemblage) {
    validate_assemblage(assemblage);
    const LinearSystem system = lhs_system(assemblage);
    const auto lp = lp_feasible(system);
    const MixedRadix strategies = strategies_of(assemblage);
    const auto& vertices = assemblage.space_b.vertices();
    const auto nv = static_cast<Eigen::Index>(vertices.size());
    const Eigen::Index dim = assemblage.space_b.ambient_dim();

    LhsResult result;
    if (!lp.feasible()) {
        result.status = LhsStatus::steerable;
        result.certificate = lp.certificate;
        Eigen::Index row = 0;
        result.inequality.violation = 0;
        for (std::size_t x = 0; x < assemblage.settings(); ++x) {
            std::vector<Vector> setting;
            for (std::size_t k = 0; k < assemblage.elements[x].size(); ++k) {
                Vector f = lp.certificate.equality_multipliers.segment(row, dim);
                row += dim;
                result.inequality.violation += f.dot(assemblage.elements[x][k]);
                setting.push_back(std::move(f));
            }
            result.inequality.coefficients.push_back(std::move(setting));
        }
        return result;
    }
    result.status = LhsStatus::unsteerable;
    for (std::size_t lambda = 0; lambda < strategies.size(); ++lambda) {
        Vector sigma = Vector::Zero(dim);
        for (Eigen::Index v = 0; v < nv; ++v) {
            const Rational& c = lp.witness(static_cast<Eigen::Index>(lambda) * nv + v);
            if (c != 0) sigma += c * vertices[v];
        }
        if (sigma(0) == 0) continue;
        HiddenVariable hv{sigma(0), State{sigma / sigma(0)}, {}};
        const auto digits = strategies.digits(lambda);
        for (std::size_t x = 0; x < assemblage.settings(); ++x) {
            std::vector<Rational> row(assemblage.elements[x].size(), Rational(0));
            row[digits[x]] = 1;
            hv.response.push_back(std::move(row));
        }
        result.model.lambdas.push_back(std::move(hv));
    }
    if (!reproduces(result.model, assemblage)) {
        throw std::logic_error("check_lhs: LHS model failed re-verification");
    }
    return result;
}

bool verify_steering_inequality(const SteeringInequality& inequality, const Assemblage& assemblage) {
    if (inequality.coefficients.size() != assemblage.settings()) return false;
    Rational value(0);
    for (std::size_t x = 0; x < assemblage.settings(); ++x) {
        if (inequality.coefficients[x].size() != assemblage.elements[x].size()) return false;
        for (std::size_t k = 0; k < assemblage.elements[x].size(); ++k) {
            value += inequality.coefficients[x][k].dot(assemblage.elements[x][k]);
        }
    }
    if (value != inequality.violation || value <= 0) return false;
    // Deterministic strategies sending a vertex are the extreme LHS assemblages.
    const MixedRadix strategies = strategies_of(assemblage);
    for (std::size_t lambda = 0; lambda < strategies.size(); ++lambda) {
        const auto digits = strategies.digits(lambda);
        for (const auto& v : assemblage.space_b.vertices()) {
            Rational bound(0);
            for (std::size_t x = 0; x < assemblage.settings(); ++x) bound += inequality.coefficients[x][digits[x]].dot(v);
            if (bound > 0) return false;
        }
    }
    return true;
}

bool audit(const LhsResult& result, const Assemblage& assemblage) {
    if (result.unsteerable()) return reproduces(result.model, assemblage);
    return verify_certificate(lhs_system(assemblage), result.certificate) &&
           verify_steering_inequality(result.inequality, assemblage);
}

LhsModel jm_to_lhs(const MotherObservable& mother, const BipartiteState& w) {
    const MixedRadix tuples = mother.tuples();
    LhsModel model;
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        const Vector sub = conditional_subnormalized(w, mother.effects[t], Side::A);
        if (sub(0) == 0) continue;
        HiddenVariable hv{sub(0), State{sub / sub(0)}, {}};
        const auto digits = tuples.digits(t);
        for (std::size_t x = 0; x < mother.axes.size(); ++x) {
            std::vector<Rational> row(mother.axes[x].size(), Rational(0));
            row[digits[x]] = 1;
            hv.response.push_back(std::move(row));
        }
        model.lambdas.push_back(std::move(hv));
    }
    return model;
}

Effect find_conditioning_effect(const BipartiteState& w, const Vector& target) {
    if (!is_valid_subnormalized_state(target, w.space_b)) {
        throw std::invalid_argument("find_conditioning_effect: target is not a sub-normalized state on B");
    }
    const Eigen::Index dim_a = w.space_a.ambient_dim();
    LinearSystem system(dim_a);
    for (const auto& v : w.space_a.vertices()) {
        system.add_inequality(v, 0);
        system.add_inequality(-v, -1);
    }
    for (Eigen::Index d = 0; d < w.matrix.cols(); ++d) system.add_equality(w.matrix.col(d), target(d));
    const auto lp = lp_feasible(system);
    if (!lp.feasible()) {
        throw NotRemotelyPreparable("no effect on A prepares " + to_string(target) + " on B");
    }
    return Effect{lp.witness};
}

MotherObservable lhs_to_mother(const LhsModel& model, const BipartiteState& w) {
    if (model.lambdas.empty()) throw std::invalid_argument("lhs_to_mother: empty model");
    std::vector<std::size_t> radix;
    for (const auto& row : model.lambdas.front().response) radix.push_back(row.size());
    const MixedRadix tuples(radix);
    const Eigen::Index dim_a = w.space_a.ambient_dim();

    std::vector<Effect> prep;
    for (const auto& lambda : model.lambdas) {
        prep.push_back(find_conditioning_effect(w, lambda.weight * lambda.state.coords));
    }
    MotherObservable mother;
    mother.effects.assign(tuples.size(), Effect{Vector::Zero(dim_a)});
    for (std::size_t t = 0; t < tuples.size(); ++t) {
        const auto digits = tuples.digits(t);
        for (std::size_t l = 0; l < model.lambdas.size(); ++l) {
            Rational p(1);
            for (std::size_t x = 0; x < radix.size() && p != 0; ++x) p *= model.lambdas[l].response[x][digits[x]];
            if (p != 0) mother.effects[t].coeffs += p * prep[l].coeffs;
        }
    }
    Vector total = Vector::Zero(dim_a);
    for (const auto& e : mother.effects) total += e.coeffs;
    if (total != w.space_a.unit_effect().coeffs) {
        throw ConstructionFailure("lhs_to_mother: recovered effects do not sum to the unit effect");
    }
    // Axes are the mother's own marginals; they must steer W to the model's assemblage.
    for (std::size_t x = 0; x < radix.size(); ++x) {
        Observable axis{"x" + std::to_string(x), {}, std::vector<Effect>(radix[x], Effect{Vector::Zero(dim_a)})};
        for (std::size_t k = 0; k < radix[x]; ++k) axis.outcomes.push_back(std::to_string(k));
        mother.axes.push_back(std::move(axis));
    }
    for (std::size_t x = 0; x < radix.size(); ++x) mother.axes[x] = marginalize_mother(mother, x);
    const auto target = reconstruct(model, w.space_b.ambient_dim());
    for (std::size_t x = 0; x < radix.size(); ++x) {
        for (std::size_t k = 0; k < radix[x]; ++k) {
            if (conditional_subnormalized(w, mother.axes[x].effects[k], Side::A) != target[x][k]) {
                throw ConstructionFailure("lhs_to_mother: marginals do not reproduce the model's assemblage");
            }
        }
    }
    return mother;
}

bool is_steerable_state(const BipartiteState& w, const std::vector<Observable>& family) {
    if (family.empty()) return false;
    return !check_lhs(assemblage_from(w, family)).unsteerable();
}

bool StrongSteeringReport::all_prepared() const {
    for (const auto& d : decompositions) {
        if (!d.prepared) return false;
    }
    return true;
}

StrongSteeringReport is_strongly_steerable_for(const BipartiteState& w, const std::vector<Decomposition>& decompositions) {
    const Vector bob = marginal(w, Side::B).coords;
    StrongSteeringReport report;
    for (const auto& decomposition : decompositions) {
        Vector sum = Vector::Zero(bob.size());
        for (const auto& c : decomposition) {
            if (c.weight < 0 || c.state.coords.size() != bob.size()) {
                throw std::invalid_argument("malformed decomposition component");
            }
            sum += c.weight * c.state.coords;
        }
        if (sum != bob) throw std::invalid_argument("decomposition does not sum to Bob's marginal");

        DecompositionReport entry;
        Vector effect_sum = Vector::Zero(w.space_a.ambient_dim());
        for (std::size_t i = 0; i < decomposition.size(); ++i) {
            try {
                Effect e = find_conditioning_effect(w, decomposition[i].weight * decomposition[i].state.coords);
                effect_sum += e.coeffs;
                entry.effects.emplace_back(std::move(e));
            } catch (const NotRemotelyPreparable&) {
                entry.effects.emplace_back(std::nullopt);
                entry.unreachable.push_back(i);
            }
        }
        entry.unit_sum = entry.unreachable.empty() && effect_sum == w.space_a.unit_effect().coeffs;
        entry.prepared = entry.unit_sum;
        report.decompositions.push_back(std::move(entry));
    }
    return report;
}

}  // namespace gptsteer
