#pragma once

// Assemblages, local-hidden-state models, and the two constructions linking
// unsteerability with joint measurability.
//
// LHS detection only searches over deterministic response functions
// lambda: x -> k. Any stochastic response p(k|x, lambda) is a convex
// combination of deterministic ones, so splitting each stochastic hidden
// variable into deterministic copies (weighted by the product of its response
// probabilities) gives a deterministic model for the same assemblage. The
// restriction therefore loses nothing and keeps the search finite.

#include "gptsteer/compatibility.hpp"
#include "gptsteer/composites.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gptsteer {

/// Sub-normalized states on Bob's side indexed by setting x and outcome k.
struct Assemblage {
    StateSpace space_b;
    std::vector<std::vector<Vector>> elements;           // [x][k]
    std::vector<std::vector<std::string>> outcomes;      // [x][k] labels

    std::size_t settings() const { return elements.size(); }
    /// sum_k elements[0][k]
    Vector bob_marginal() const;
};

class InvalidAssemblage : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Cone membership and 0 <= u(element) <= 1 per element, identical sums across
/// settings (no-signaling), and a normalized marginal. Throws InvalidAssemblage
/// with a diagnostic.
void validate_assemblage(const Assemblage& assemblage);

/// element(x, k) = [e^{k_x} (x) u_B](W). Requires W in the max tensor product.
Assemblage assemblage_from(const BipartiteState& w, const std::vector<Observable>& observables);

struct HiddenVariable {
    Rational weight;                              // Gamma(lambda)
    State state;                                  // omega^lambda, normalized on B
    std::vector<std::vector<Rational>> response;  // p(k | x, lambda), [x][k]
};

struct LhsModel {
    std::vector<HiddenVariable> lambdas;
};

/// sum_lambda Gamma(lambda) p(k|x,lambda) omega^lambda for every (x, k).
std::vector<std::vector<Vector>> reconstruct(const LhsModel& model, Eigen::Index dim);

/// Weights, states, and responses are well formed and reproduce the assemblage exactly.
bool reproduces(const LhsModel& model, const Assemblage& assemblage);

/// A linear functional F on assemblages: sum_{x,k} F[x][k] . sigma_{x,k} is
/// <= 0 for every assemblage admitting an LHS model, and `violation` is its
/// value on the checked assemblage (> 0).
struct SteeringInequality {
    std::vector<std::vector<Vector>> coefficients;
    Rational violation;
};

enum class LhsStatus { unsteerable, steerable };

struct LhsResult {
    LhsStatus status = LhsStatus::steerable;
    LhsModel model;                 // when unsteerable
    FarkasCertificate certificate;  // when steerable, against lhs_system
    SteeringInequality inequality;  // when steerable

    bool unsteerable() const { return status == LhsStatus::unsteerable; }
};

/// Variables: for each deterministic response lambda (MixedRadix over the
/// settings) the nonnegative vertex weights of its hidden state sigma_lambda.
/// Equalities: sum_{lambda : lambda_x = k} sigma_lambda = element(x, k).
LinearSystem lhs_system(const Assemblage& assemblage);

LhsResult check_lhs(const Assemblage& assemblage);

/// Bound <= 0 on every deterministic strategy and vertex, and a positive value on the assemblage.
bool verify_steering_inequality(const SteeringInequality& inequality, const Assemblage& assemblage);

bool audit(const LhsResult& result, const Assemblage& assemblage);

/// Hidden variable = outcome tuple of the mother, Gamma = e^{tuple}(marginal_A),
/// state = normalized conditional of W on e^{tuple}, deterministic response
/// k = tuple[x]. Tuples of zero weight are omitted.
LhsModel jm_to_lhs(const MotherObservable& mother, const BipartiteState& w);

class NotRemotelyPreparable : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// A valid effect e on A with [e (x) u_B](W) == target exactly. Throws
/// NotRemotelyPreparable when none exists.
Effect find_conditioning_effect(const BipartiteState& w, const Vector& target);

class ConstructionFailure : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

/// For each lambda finds e^lambda preparing Gamma(lambda) omega^lambda, then
/// e^{tuple} = sum_lambda e^lambda prod_x p(tuple[x] | x, lambda). Throws
/// NotRemotelyPreparable from the search, or ConstructionFailure when the
/// effects do not sum to u_A or the marginals do not steer W to the model's
/// assemblage.
MotherObservable lhs_to_mother(const LhsModel& model, const BipartiteState& w);

/// Steerability of W relative to a finite family of Alice's observables. An
/// LHS model for the whole family restricts to every sub-family, so checking
/// the full family decides whether some sub-family is steerable.
bool is_steerable_state(const BipartiteState& w, const std::vector<Observable>& family);

struct DecompositionComponent {
    Rational weight;
    State state;
};
using Decomposition = std::vector<DecompositionComponent>;

struct DecompositionReport {
    bool prepared = false;            // every component reached and effects sum to u_A
    std::vector<std::optional<Effect>> effects;
    std::vector<std::size_t> unreachable;
    bool unit_sum = false;
};

struct StrongSteeringReport {
    std::vector<DecompositionReport> decompositions;
    bool all_prepared() const;
};

/// Tries to remotely prepare each supplied decomposition of Bob's marginal.
/// Throws std::invalid_argument when a decomposition does not sum to the marginal.
StrongSteeringReport is_strongly_steerable_for(const BipartiteState& w, const std::vector<Decomposition>& decompositions);

}  // namespace gptsteer
