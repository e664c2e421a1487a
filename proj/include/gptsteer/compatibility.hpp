#pragma once

// Joint measurability: a family of observables is compatible when a single
// mother observable over the Cartesian product of their outcome sets
// reproduces every one of them as a marginal.

#include "gptsteer/gpt.hpp"
#include "gptsteer/lp.hpp"

#include <vector>

namespace gptsteer {

/// Mixed-radix indexing of outcome tuples; the first position is most significant.
class MixedRadix {
  public:
    explicit MixedRadix(std::vector<std::size_t> radix);

    std::size_t size() const { return count_; }
    std::size_t positions() const { return radix_.size(); }
    const std::vector<std::size_t>& radix() const { return radix_; }
    std::vector<std::size_t> digits(std::size_t index) const;
    std::size_t index(const std::vector<std::size_t>& digits) const;

  private:
    std::vector<std::size_t> radix_;
    std::size_t count_ = 1;
};

struct MotherObservable {
    std::vector<Observable> axes;
    std::vector<Effect> effects;  // one per outcome tuple, in MixedRadix order

    MixedRadix tuples() const;
};

enum class JmStatus { jointly_measurable, incompatible };

struct JmResult {
    JmStatus status = JmStatus::incompatible;
    MotherObservable mother;        // when jointly measurable
    FarkasCertificate certificate;  // when incompatible, against jm_system

    bool jointly_measurable() const { return status == JmStatus::jointly_measurable; }
};

/// Feasibility system whose variables are the coefficients of every mother
/// effect (tuple-major): positivity at each vertex, unit sum, and one
/// marginal equality block per (axis, outcome).
LinearSystem jm_system(const std::vector<Observable>& observables, const StateSpace& space);

JmResult check_joint_measurability(const std::vector<Observable>& observables, const StateSpace& space);

/// Positivity on every vertex, unit sum, and exact marginals onto the axes.
bool verify_mother(const MotherObservable& mother, const StateSpace& space);

/// Re-checks whichever payload the result carries.
bool audit(const JmResult& result, const std::vector<Observable>& observables, const StateSpace& space);

Observable marginalize_mother(const MotherObservable& mother, std::size_t axis);

struct Bracket {
    Rational lo;
    Rational hi;
};

/// Bisection on the depolarizing parameter. The family is jointly measurable
/// at lo and not at hi, with hi - lo <= precision; [1, 1] when already
/// jointly measurable without noise.
Bracket jm_noise_threshold(const std::vector<Observable>& observables, const StateSpace& space,
                           const Rational& precision);

struct SubsetStatus {
    std::vector<std::size_t> members;
    JmStatus status;
};

/// Status of every nonempty subset, ordered by membership bitmask. At most four observables.
std::vector<SubsetStatus> subset_jm_scan(const std::vector<Observable>& observables, const StateSpace& space);

}  // namespace gptsteer
