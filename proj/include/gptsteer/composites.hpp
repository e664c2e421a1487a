#pragma once

// Bipartite states under local tomography: a joint state is the bilinear form
// phi(e_A, e_B) = e_A^T M e_B, stored as the rational matrix M.

#include "gptsteer/gpt.hpp"
#include "gptsteer/lp.hpp"

#include <stdexcept>
#include <vector>

namespace gptsteer {

enum class Side { A, B };

struct BipartiteState {
    StateSpace space_a;
    StateSpace space_b;
    Matrix matrix;  // ambient_dim(A) x ambient_dim(B), matrix(0, 0) == 1

    /// Checks shape and normalization; max-tensor membership is a separate question.
    BipartiteState(StateSpace a, StateSpace b, Matrix m);
};

class NullConditioning : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

class UnsupportedModel : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

Rational pairing(const BipartiteState& w, const Effect& a, const Effect& b);

BipartiteState product_state(const State& a, const StateSpace& space_a, const State& b, const StateSpace& space_b);

/// Convex combination of bipartite states over the same pair of spaces.
BipartiteState mix_bipartite(const std::vector<BipartiteState>& states, const std::vector<Rational>& weights);

/// Nonnegativity on every pair of extremal effects, which suffices by bilinearity.
bool in_max_tensor(const BipartiteState& w);

struct SeparableTerm {
    Rational weight;
    State a;
    State b;
};

struct SeparabilityResult {
    bool separable = false;
    std::vector<SeparableTerm> decomposition;  // when separable
    FarkasCertificate certificate;             // when entangled, against separability_system
    /// Entanglement witness read off the certificate: <W, v_A v_B^T> <= 0 for
    /// every vertex pair, and <W, M> > 0.
    Matrix witness;
};

/// Weights on all vertex-pair outer products reproducing the matrix.
LinearSystem separability_system(const BipartiteState& w);

/// Requires in_max_tensor(w); throws std::invalid_argument otherwise.
SeparabilityResult is_separable(const BipartiteState& w);

/// Checks a separable decomposition or an entanglement witness against the state.
bool audit(const SeparabilityResult& result, const BipartiteState& w);

State marginal(const BipartiteState& w, Side side);

/// Unnormalized state on the far side after conditioning on effect e on `conditioning`.
Vector conditional_subnormalized(const BipartiteState& w, const Effect& e, Side conditioning);

struct ConditionalState {
    Rational probability;
    State state;
};

/// Throws NullConditioning when the effect has zero probability.
ConditionalState conditional_state(const BipartiteState& w, const Effect& e, Side conditioning);

/// Linear map J (as a matrix acting on effect coefficients) taking the effect
/// cone onto the state cone with J(u) = barycenter. Implemented for simplices
/// and the gbit square; throws UnsupportedModel otherwise.
Matrix cone_isomorphism(const StateSpace& space);

/// phi(e_A, e_B) = e_B . J(e_A). Throws UnsupportedModel where cone_isomorphism does.
BipartiteState canonical_max_entangled(const StateSpace& space);

}  // namespace gptsteer
