#pragma once

// Single-system objects of a polytopic probabilistic theory.
//
// Coordinates: a state lives in Q^{d+1} with coords[0] its normalization, an
// effect pairs with a state by the plain dot product, and the unit effect is
// (1, 0, ..., 0).

#include "gptsteer/rational.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gptsteer {

struct State {
    Vector coords;

    friend bool operator==(const State& a, const State& b) { return a.coords == b.coords; }
};

struct Effect {
    Vector coeffs;

    friend bool operator==(const Effect& a, const Effect& b) { return a.coeffs == b.coeffs; }
};

/// Polytope of normalized states given by its vertices. Construction validates
/// the vertex list and precomputes the extremal effects.
class StateSpace {
  public:
    StateSpace(std::string label, std::vector<Vector> vertices);

    const std::string& label() const { return label_; }
    Eigen::Index ambient_dim() const { return ambient_dim_; }
    const std::vector<Vector>& vertices() const { return vertices_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    /// Vertices of the effect polytope {e : 0 <= e(v) <= 1}, lexicographically sorted.
    const std::vector<Effect>& extremal_effects() const { return extremal_effects_; }

    Effect unit_effect() const { return Effect{unit_vector(ambient_dim_, 0)}; }
    Effect zero_effect() const { return Effect{Vector::Zero(ambient_dim_)}; }
    /// Equal-weight mixture of the vertices.
    State barycenter() const;

    friend bool operator==(const StateSpace& a, const StateSpace& b) {
        return a.ambient_dim_ == b.ambient_dim_ && a.vertices_ == b.vertices_;
    }

  private:
    std::string label_;
    Eigen::Index ambient_dim_;
    std::vector<Vector> vertices_;
    std::vector<Effect> extremal_effects_;
};

/// Outcome-indexed family of effects; outcomes[i] labels effects[i].
struct Observable {
    std::string label;
    std::vector<std::string> outcomes;
    std::vector<Effect> effects;

    std::size_t size() const { return effects.size(); }
};

Rational probability(const Effect& e, const State& omega);

/// 0 <= e(v) <= 1 at every vertex, which suffices by convexity.
bool is_valid_effect(const Vector& e, const StateSpace& space);
/// Membership in the vertex cone only (no upper bound).
bool is_nonnegative_effect(const Vector& e, const StateSpace& space);
bool is_valid_state(const Vector& omega, const StateSpace& space);
/// Nonnegative cone over the vertices with 0 <= coords[0] <= 1.
bool is_valid_subnormalized_state(const Vector& omega, const StateSpace& space);
bool is_valid_observable(const Observable& obs, const StateSpace& space);

/// Effect-polytope vertices computed from scratch by active-set enumeration.
std::vector<Effect> extremal_effects(const StateSpace& space);

State mix_states(std::span<const State> states, std::span<const Rational> weights);
Effect mix_effects(std::span<const Effect> effects, std::span<const Rational> weights);

/// Outcome k maps to eta e^k + (1 - eta) e^k(mu) u with mu the barycenter.
Observable depolarize_observable(const Observable& obs, const Rational& eta, const StateSpace& space);

/// Two-outcome observable {e, u - e} with outcomes "+" and "-".
Observable dichotomic(std::string label, const Effect& e, const StateSpace& space);
/// One-outcome observable {u}.
Observable trivial_observable(const StateSpace& space);

// Model zoo -----------------------------------------------------------------

/// Simplex with n vertices: (1, 0, ..., 0) and (1, e_i) for i = 1..n-1.
StateSpace zoo_classical(int n);
/// n-gon in ambient dimension 3. n = 4 is the gbit square (1, +-1, +-1); other
/// n use rational points on the unit circle near the regular angles.
StateSpace zoo_polygon(int n);
StateSpace zoo_gbit();
/// Resolves "gbit", "classical-N", "polygon-N". Throws std::invalid_argument for unknown names.
StateSpace zoo_model(std::string_view name);
std::vector<std::string> zoo_names();

/// Sharp gbit fiducials X = {(1/2)(1, +-1, 0)} and Y = {(1/2)(1, 0, +-1)}.
Observable gbit_fiducial_x();
Observable gbit_fiducial_y();

}  // namespace gptsteer
