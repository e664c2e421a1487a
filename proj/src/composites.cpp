#include "gptsteer/composites.hpp"

#include <algorithm>

namespace gptsteer {

BipartiteState::BipartiteState(StateSpace a, StateSpace b, Matrix m)
    : space_a(std::move(a)), space_b(std::move(b)), matrix(std::move(m)) {
    if (matrix.rows() != space_a.ambient_dim() || matrix.cols() != space_b.ambient_dim()) {
        throw StructuralError("bipartite state: matrix shape does not match the spaces");
    }
    if (matrix(0, 0) != 1) throw std::invalid_argument("bipartite state: phi(u_A, u_B) must be 1");
}

Rational pairing(const BipartiteState& w, const Effect& a, const Effect& b) {
    if (a.coeffs.size() != w.matrix.rows() || b.coeffs.size() != w.matrix.cols()) {
        throw StructuralError("pairing: dimension mismatch");
    }
    return a.coeffs.dot(w.matrix * b.coeffs);
}

BipartiteState product_state(const State& a, const StateSpace& space_a, const State& b, const StateSpace& space_b) {
    if (!is_valid_state(a.coords, space_a) || !is_valid_state(b.coords, space_b)) {
        throw std::invalid_argument("product_state: factors must be valid normalized states");
    }
    return BipartiteState(space_a, space_b, a.coords * b.coords.transpose());
}

BipartiteState mix_bipartite(const std::vector<BipartiteState>& states, const std::vector<Rational>& weights) {
    if (states.empty() || states.size() != weights.size()) throw StructuralError("mix_bipartite: size mismatch");
    Rational total(0);
    Matrix m = Matrix::Zero(states.front().matrix.rows(), states.front().matrix.cols());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (weights[i] < 0) throw std::invalid_argument("mix_bipartite: negative weight");
        if (!(states[i].space_a == states.front().space_a) || !(states[i].space_b == states.front().space_b)) {
            throw std::invalid_argument("mix_bipartite: states live on different spaces");
        }
        total += weights[i];
        m += weights[i] * states[i].matrix;
    }
    if (total != 1) throw std::invalid_argument("mix_bipartite: weights do not sum to 1");
    return BipartiteState(states.front().space_a, states.front().space_b, std::move(m));
}

bool in_max_tensor(const BipartiteState& w) {
    if (w.matrix(0, 0) != 1) return false;
    for (const auto& ea : w.space_a.extremal_effects()) {
        const Eigen::Matrix<Rational, 1, Eigen::Dynamic> row = ea.coeffs.transpose() * w.matrix;
        for (const auto& eb : w.space_b.extremal_effects()) {
            if (row.dot(eb.coeffs.transpose()) < 0) return false;
        }
    }
    return true;
}

LinearSystem separability_system(const BipartiteState& w) {
    const auto& va = w.space_a.vertices();
    const auto& vb = w.space_b.vertices();
    const Eigen::Index rows = w.matrix.rows(), cols = w.matrix.cols();
    const auto terms = static_cast<Eigen::Index>(va.size() * vb.size());
    LinearSystem system(terms);
    // Entry (r, c) of sum_{ij} p_ij v_i v_j^T; term index i * |vb| + j.
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
            Vector row(terms);
            for (std::size_t i = 0; i < va.size(); ++i) {
                for (std::size_t j = 0; j < vb.size(); ++j) {
                    row(static_cast<Eigen::Index>(i * vb.size() + j)) = va[i](r) * vb[j](c);
                }
            }
            system.add_equality(std::move(row), w.matrix(r, c));
        }
    }
    for (Eigen::Index t = 0; t < terms; ++t) system.add_nonnegativity(t);
    return system;
}

SeparabilityResult is_separable(const BipartiteState& w) {
    if (!in_max_tensor(w)) throw std::invalid_argument("is_separable: state is not in the max tensor product");
    const LinearSystem system = separability_system(w);
    const auto lp = lp_feasible(system);
    SeparabilityResult result;
    const auto& va = w.space_a.vertices();
    const auto& vb = w.space_b.vertices();
    if (lp.feasible()) {
        result.separable = true;
        for (std::size_t i = 0; i < va.size(); ++i) {
            for (std::size_t j = 0; j < vb.size(); ++j) {
                const Rational& p = lp.witness(static_cast<Eigen::Index>(i * vb.size() + j));
                if (p != 0) result.decomposition.push_back({p, State{va[i]}, State{vb[j]}});
            }
        }
        return result;
    }
    result.separable = false;
    result.certificate = lp.certificate;
    result.witness = Matrix(w.matrix.rows(), w.matrix.cols());
    for (Eigen::Index r = 0; r < w.matrix.rows(); ++r) {
        for (Eigen::Index c = 0; c < w.matrix.cols(); ++c) {
            result.witness(r, c) = lp.certificate.equality_multipliers(r * w.matrix.cols() + c);
        }
    }
    return result;
}

bool audit(const SeparabilityResult& result, const BipartiteState& w) {
    if (result.separable) {
        Matrix m = Matrix::Zero(w.matrix.rows(), w.matrix.cols());
        Rational total(0);
        for (const auto& term : result.decomposition) {
            if (term.weight < 0) return false;
            if (!is_valid_state(term.a.coords, w.space_a) || !is_valid_state(term.b.coords, w.space_b)) return false;
            total += term.weight;
            m += term.weight * term.a.coords * term.b.coords.transpose();
        }
        return total == 1 && m == w.matrix;
    }
    if (!verify_certificate(separability_system(w), result.certificate)) return false;
    for (const auto& va : w.space_a.vertices()) {
        for (const auto& vb : w.space_b.vertices()) {
            if ((result.witness.cwiseProduct(va * vb.transpose())).sum() > 0) return false;
        }
    }
    return result.witness.cwiseProduct(w.matrix).sum() > 0;
}

State marginal(const BipartiteState& w, Side side) {
    return State{side == Side::A ? Vector(w.matrix.col(0)) : Vector(w.matrix.row(0).transpose())};
}

Vector conditional_subnormalized(const BipartiteState& w, const Effect& e, Side conditioning) {
    if (conditioning == Side::A) {
        if (e.coeffs.size() != w.matrix.rows()) throw StructuralError("conditioning effect has wrong length");
        return w.matrix.transpose() * e.coeffs;
    }
    if (e.coeffs.size() != w.matrix.cols()) throw StructuralError("conditioning effect has wrong length");
    return w.matrix * e.coeffs;
}

ConditionalState conditional_state(const BipartiteState& w, const Effect& e, Side conditioning) {
    Vector sub = conditional_subnormalized(w, e, conditioning);
    Rational p = sub(0);
    if (p == 0) throw NullConditioning("conditioning on an effect of probability zero");
    return {p, State{sub / p}};
}

namespace {

bool is_gbit_square(const StateSpace& space) {
    if (space.ambient_dim() != 3 || space.vertex_count() != 4) return false;
    for (const auto& v : space.vertices()) {
        if (!((v(1) == 1 || v(1) == -1) && (v(2) == 1 || v(2) == -1))) return false;
    }
    return true;  // four distinct vertices with +-1 entries cover the square
}

}  // namespace

Matrix cone_isomorphism(const StateSpace& space) {
    const Eigen::Index n = space.ambient_dim();
    if (static_cast<Eigen::Index>(space.vertex_count()) == n) {
        // Simplex: J sends the indicator effect of vertex i to v_i / n, i.e. J = V^T V / n.
        Matrix v(n, n);
        for (Eigen::Index i = 0; i < n; ++i) v.row(i) = space.vertices()[i].transpose();
        return (v.transpose() * v) / Rational(static_cast<long>(n));
    }
    if (is_gbit_square(space)) {
        Matrix j(3, 3);
        j << 1, 0, 0,
             0, 1, -1,
             0, 1, 1;
        return j;
    }
    throw UnsupportedModel("no effect-to-state cone isomorphism known for '" + space.label() + "'");
}

BipartiteState canonical_max_entangled(const StateSpace& space) {
    return BipartiteState(space, space, cone_isomorphism(space).transpose());
}

}  // namespace gptsteer
