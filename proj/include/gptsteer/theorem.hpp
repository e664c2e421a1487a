#pragma once

// Seeded sampling of observables and bipartite states, and the experiment
// comparing joint measurability against unsteerability on the canonical
// entangled state.

#include "gptsteer/steering.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gptsteer {

struct SamplerConfig {
    /// Effect coordinates are drawn on the grid (1/denominator) Z inside the
    /// bounding box of the effect polytope, then rejected until valid.
    long denominator = 4;
    std::size_t min_observables = 2;
    std::size_t max_observables = 3;
    /// Extra max-tensor states checked per jointly measurable trial.
    std::size_t extra_states = 10;
};

/// Deterministic sampler. Uses only the raw mt19937_64 stream (no standard
/// distributions), so sequences are identical across standard libraries.
class Sampler {
  public:
    explicit Sampler(std::uint64_t seed) : engine_(seed) {}

    std::size_t below(std::size_t bound);
    Effect effect(const StateSpace& space, long denominator);
    Observable dichotomic_observable(const StateSpace& space, long denominator, std::string label);
    std::vector<Observable> observable_set(const StateSpace& space, const SamplerConfig& config);
    /// Mixture of vertices with small integer weights.
    State state(const StateSpace& space);
    /// A product, a mixture of two products, or a mixture of `entangled` with a product.
    BipartiteState max_tensor_state(const StateSpace& space, const BipartiteState& entangled);

  private:
    std::mt19937_64 engine_;
};

/// Fixed observable families probed before the random trials: on the gbit the
/// sharp fiducials and their depolarized versions at 1/4, 1/2, 3/4; empty elsewhere.
std::vector<std::vector<Observable>> standard_probes(const StateSpace& space);

struct TrialRecord {
    std::size_t index = 0;
    std::string kind;  // "probe" or "random"
    std::vector<Observable> observables;
    bool jointly_measurable = false;
    bool unsteerable = false;
    bool agree = false;
    bool certificates_verified = false;
    /// jm_to_lhs on the canonical state reproduces its assemblage.
    bool lhs_construction_ok = false;
    bool round_trip_checked = false;
    bool round_trip_ok = false;
    std::size_t extra_states = 0;
    std::size_t extra_failures = 0;
};

struct TheoremReport {
    std::string model;
    std::uint64_t seed = 0;
    std::size_t requested_trials = 0;
    SamplerConfig config;
    std::vector<TrialRecord> trials;

    std::size_t disagreements() const;
    /// Any audit, construction, round-trip, or extra-state failure.
    std::size_t failures() const;
    std::size_t jointly_measurable_count() const;
    bool passed() const { return disagreements() == 0 && failures() == 0; }
};

/// Runs one trial against the canonical entangled state `phi`.
TrialRecord run_trial(const std::vector<Observable>& observables, const BipartiteState& phi, Sampler& sampler,
                      const SamplerConfig& config);

/// Probes followed by n_trials random families. Throws UnsupportedModel when
/// the space has no canonical entangled state.
TheoremReport theorem_verify(const StateSpace& space, std::size_t n_trials, const SamplerConfig& config,
                             std::uint64_t seed);

}  // namespace gptsteer
