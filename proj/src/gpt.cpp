#include "gptsteer/gpt.hpp"

#include "gptsteer/lp.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace gptsteer {

namespace {

constexpr int kMaxClassical = 6;
constexpr int kMaxPolygon = 12;
// Denominator used when rationalizing tan(theta / 2) for polygon vertices.
constexpr long kPolygonDenominator = 1000;

void check_weights(std::span<const Rational> weights, std::size_t count) {
    if (weights.size() != count || count == 0) throw StructuralError("mixture: weight count mismatch");
    Rational total(0);
    for (const auto& w : weights) {
        if (w < 0) throw std::invalid_argument("mixture: negative weight");
        total += w;
    }
    if (total != 1) throw std::invalid_argument("mixture: weights do not sum to 1");
}

Rational rationalize(double x) {
    return Rational(static_cast<long>(std::lround(x * kPolygonDenominator)), kPolygonDenominator);
}

Vector circle_point(int k, int n) {
    if (2 * k == n) return make_vector({1, -1, 0});
    double theta = 2.0 * std::numbers::pi * k / n;
    if (theta > std::numbers::pi) theta -= 2.0 * std::numbers::pi;
    const double t = std::tan(theta / 2.0);
    if (std::abs(t) <= 1.0) {
        const Rational q = rationalize(t);
        const Rational den = 1 + q * q;
        return make_vector({1, (1 - q * q) / den, 2 * q / den});
    }
    const Rational s = rationalize(1.0 / t);
    const Rational den = s * s + 1;
    return make_vector({1, (s * s - 1) / den, 2 * s / den});
}

int parse_suffix(std::string_view name, std::string_view prefix) {
    const std::string_view digits = name.substr(prefix.size());
    int value = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec != std::errc{} || ptr != digits.data() + digits.size() || digits.empty()) {
        throw std::invalid_argument("unknown model '" + std::string(name) + "'");
    }
    return value;
}

}  // namespace

StateSpace::StateSpace(std::string label, std::vector<Vector> vertices)
    : label_(std::move(label)), vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw StructuralError("state space needs at least one vertex");
    ambient_dim_ = vertices_.front().size();
    if (ambient_dim_ < 1) throw StructuralError("state space ambient dimension must be positive");
    Matrix stacked(static_cast<Eigen::Index>(vertices_.size()), ambient_dim_);
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        const Vector& v = vertices_[i];
        if (v.size() != ambient_dim_) throw StructuralError("vertices have inconsistent length");
        if (v(0) != 1) throw StructuralError("vertex normalization coordinate must be 1");
        stacked.row(static_cast<Eigen::Index>(i)) = v.transpose();
    }
    // Full linear span keeps the effect polytope bounded.
    if (exact_rank(stacked) != ambient_dim_) {
        throw StructuralError("vertices must span the ambient space");
    }
    if (vertices_.size() > 1) {
        for (std::size_t i = 0; i < vertices_.size(); ++i) {
            std::vector<Vector> others;
            for (std::size_t j = 0; j < vertices_.size(); ++j) {
                if (j != i) others.push_back(vertices_[j]);
            }
            if (convex_member(vertices_[i], others).feasible()) {
                throw StructuralError("vertex " + std::to_string(i) + " is a mixture of the others");
            }
        }
    }
    extremal_effects_ = gptsteer::extremal_effects(*this);
}

State StateSpace::barycenter() const {
    Vector sum = Vector::Zero(ambient_dim_);
    for (const auto& v : vertices_) sum += v;
    return State{sum / Rational(static_cast<long>(vertices_.size()))};
}

Rational probability(const Effect& e, const State& omega) {
    if (e.coeffs.size() != omega.coords.size()) throw StructuralError("probability: dimension mismatch");
    return e.coeffs.dot(omega.coords);
}

bool is_valid_effect(const Vector& e, const StateSpace& space) {
    if (e.size() != space.ambient_dim()) return false;
    for (const auto& v : space.vertices()) {
        const Rational p = e.dot(v);
        if (p < 0 || p > 1) return false;
    }
    return true;
}

bool is_nonnegative_effect(const Vector& e, const StateSpace& space) {
    if (e.size() != space.ambient_dim()) return false;
    for (const auto& v : space.vertices()) {
        if (e.dot(v) < 0) return false;
    }
    return true;
}

bool is_valid_state(const Vector& omega, const StateSpace& space) {
    if (omega.size() != space.ambient_dim() || omega(0) != 1) return false;
    return convex_member(omega, space.vertices()).feasible();
}

bool is_valid_subnormalized_state(const Vector& omega, const StateSpace& space) {
    if (omega.size() != space.ambient_dim() || omega(0) < 0 || omega(0) > 1) return false;
    return cone_member(omega, space.vertices()).feasible();
}

bool is_valid_observable(const Observable& obs, const StateSpace& space) {
    if (obs.effects.empty() || obs.outcomes.size() != obs.effects.size()) return false;
    Vector sum = Vector::Zero(space.ambient_dim());
    for (const auto& e : obs.effects) {
        if (!is_valid_effect(e.coeffs, space)) return false;
        sum += e.coeffs;
    }
    return sum == space.unit_effect().coeffs;
}

std::vector<Effect> extremal_effects(const StateSpace& space) {
    LinearSystem halfspaces(space.ambient_dim());
    for (const auto& v : space.vertices()) {
        halfspaces.add_inequality(v, 0);
        halfspaces.add_inequality(-v, -1);
    }
    std::vector<Effect> effects;
    for (auto& point : vertex_enumerate(halfspaces)) effects.push_back(Effect{std::move(point)});
    return effects;
}

State mix_states(std::span<const State> states, std::span<const Rational> weights) {
    check_weights(weights, states.size());
    Vector out = Vector::Zero(states.front().coords.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].coords.size() != out.size()) throw StructuralError("mix_states: dimension mismatch");
        out += weights[i] * states[i].coords;
    }
    return State{std::move(out)};
}

Effect mix_effects(std::span<const Effect> effects, std::span<const Rational> weights) {
    check_weights(weights, effects.size());
    Vector out = Vector::Zero(effects.front().coeffs.size());
    for (std::size_t i = 0; i < effects.size(); ++i) {
        if (effects[i].coeffs.size() != out.size()) throw StructuralError("mix_effects: dimension mismatch");
        out += weights[i] * effects[i].coeffs;
    }
    return Effect{std::move(out)};
}

Observable depolarize_observable(const Observable& obs, const Rational& eta, const StateSpace& space) {
    if (eta < 0 || eta > 1) throw std::invalid_argument("depolarize_observable: eta outside [0,1]");
    const State mu = space.barycenter();
    const Vector u = space.unit_effect().coeffs;
    Observable out{obs.label, obs.outcomes, {}};
    if (eta != 1) out.label += "@" + to_string(eta);
    for (const auto& e : obs.effects) {
        out.effects.push_back(Effect{eta * e.coeffs + (1 - eta) * probability(e, mu) * u});
    }
    return out;
}

Observable dichotomic(std::string label, const Effect& e, const StateSpace& space) {
    return Observable{std::move(label), {"+", "-"}, {e, Effect{space.unit_effect().coeffs - e.coeffs}}};
}

Observable trivial_observable(const StateSpace& space) {
    return Observable{"trivial", {"0"}, {space.unit_effect()}};
}

StateSpace zoo_classical(int n) {
    if (n < 2) throw std::invalid_argument("classical model needs n >= 2");
    std::vector<Vector> vertices;
    vertices.push_back(unit_vector(n, 0));
    for (int i = 1; i < n; ++i) {
        Vector v = unit_vector(n, 0);
        v(i) = 1;
        vertices.push_back(std::move(v));
    }
    return StateSpace("classical-" + std::to_string(n), std::move(vertices));
}

StateSpace zoo_polygon(int n) {
    if (n < 3) throw std::invalid_argument("polygon model needs n >= 3");
    std::vector<Vector> vertices;
    if (n == 4) {
        vertices = {make_vector({1, 1, 1}), make_vector({1, -1, 1}), make_vector({1, -1, -1}),
                    make_vector({1, 1, -1})};
        return StateSpace("gbit", std::move(vertices));
    }
    for (int k = 0; k < n; ++k) vertices.push_back(circle_point(k, n));
    return StateSpace("polygon-" + std::to_string(n), std::move(vertices));
}

StateSpace zoo_gbit() { return zoo_polygon(4); }

StateSpace zoo_model(std::string_view name) {
    if (name == "gbit" || name == "polygon-4") return zoo_gbit();
    if (name.starts_with("classical-")) {
        const int n = parse_suffix(name, "classical-");
        if (n < 2 || n > kMaxClassical) throw std::invalid_argument("classical-N needs 2 <= N <= 6");
        return zoo_classical(n);
    }
    if (name.starts_with("polygon-")) {
        const int n = parse_suffix(name, "polygon-");
        if (n < 3 || n > kMaxPolygon) throw std::invalid_argument("polygon-N needs 3 <= N <= 12");
        return zoo_polygon(n);
    }
    throw std::invalid_argument("unknown model '" + std::string(name) + "'");
}

std::vector<std::string> zoo_names() {
    std::vector<std::string> names{"gbit"};
    for (int n = 2; n <= kMaxClassical; ++n) names.push_back("classical-" + std::to_string(n));
    for (int n = 3; n <= kMaxPolygon; ++n) {
        if (n != 4) names.push_back("polygon-" + std::to_string(n));
    }
    return names;
}

Observable gbit_fiducial_x() {
    return Observable{"X", {"+", "-"},
                      {Effect{make_vector({Rational(1, 2), Rational(1, 2), 0})},
                       Effect{make_vector({Rational(1, 2), Rational(-1, 2), 0})}}};
}

Observable gbit_fiducial_y() {
    return Observable{"Y", {"+", "-"},
                      {Effect{make_vector({Rational(1, 2), 0, Rational(1, 2)})},
                       Effect{make_vector({Rational(1, 2), 0, Rational(-1, 2)})}}};
}

}  // namespace gptsteer
