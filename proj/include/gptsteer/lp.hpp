#pragma once

// Exact linear programming over an ordered field: feasibility with Farkas
// certificates, optimization, active-set vertex enumeration, and cone/hull
// membership. Every routine is a pure function of its inputs.
//
// The solver is a dense two-phase tableau simplex with Bland's rule, so the
// pivot sequence (and hence every returned point) is a deterministic function
// of the input system.

#include "gptsteer/rational.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gptsteer {

template <typename Scalar>
struct LinearRow {
    VectorX<Scalar> coeffs;
    Scalar rhs;
};

/// Equalities `coeffs . x == rhs` and inequalities `coeffs . x >= rhs` over free variables.
template <typename Scalar>
struct BasicLinearSystem {
    Eigen::Index variable_count = 0;
    std::vector<LinearRow<Scalar>> equalities;
    std::vector<LinearRow<Scalar>> inequalities;

    BasicLinearSystem() = default;
    explicit BasicLinearSystem(Eigen::Index variables) : variable_count(variables) {}

    void add_equality(VectorX<Scalar> coeffs, Scalar rhs) {
        equalities.push_back({std::move(coeffs), std::move(rhs)});
    }
    void add_inequality(VectorX<Scalar> coeffs, Scalar rhs) {
        inequalities.push_back({std::move(coeffs), std::move(rhs)});
    }
    /// x_index >= 0
    void add_nonnegativity(Eigen::Index index) {
        VectorX<Scalar> row = VectorX<Scalar>::Zero(variable_count);
        row(index) = 1;
        add_inequality(std::move(row), Scalar(0));
    }

    void validate() const {
        if (variable_count < 0) throw StructuralError("negative variable count");
        for (const auto& row : equalities) {
            if (row.coeffs.size() != variable_count) throw StructuralError("equality row has wrong length");
        }
        for (const auto& row : inequalities) {
            if (row.coeffs.size() != variable_count) throw StructuralError("inequality row has wrong length");
        }
    }
};

using LinearSystem = BasicLinearSystem<Rational>;

/// Multipliers proving infeasibility: equality multipliers are free, inequality
/// multipliers are nonnegative, the combined coefficient row vanishes and the
/// combined right-hand side is strictly positive (the contradiction 0 >= positive).
template <typename Scalar>
struct BasicFarkasCertificate {
    VectorX<Scalar> equality_multipliers;
    VectorX<Scalar> inequality_multipliers;
};
using FarkasCertificate = BasicFarkasCertificate<Rational>;

enum class Feasibility { feasible, infeasible };

template <typename Scalar>
struct BasicFeasibilityResult {
    Feasibility status = Feasibility::infeasible;
    VectorX<Scalar> witness;                      // set when feasible
    BasicFarkasCertificate<Scalar> certificate;   // set when infeasible

    bool feasible() const { return status == Feasibility::feasible; }
};
using FeasibilityResult = BasicFeasibilityResult<Rational>;

enum class Sense { maximize, minimize };
enum class OptimumStatus { optimal, unbounded, infeasible };

template <typename Scalar>
struct BasicOptimizationResult {
    OptimumStatus status = OptimumStatus::infeasible;
    Scalar value{};
    VectorX<Scalar> argmax;                       // optimizer for either sense
    BasicFarkasCertificate<Scalar> certificate;   // set when infeasible
};
using OptimizationResult = BasicOptimizationResult<Rational>;

/// Raised by vertex_enumerate when the feasible region is not bounded.
class UnboundedPolyhedron : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

template <typename Scalar>
bool satisfies(const BasicLinearSystem<Scalar>& system, const VectorX<Scalar>& x) {
    if (x.size() != system.variable_count) return false;
    for (const auto& row : system.equalities) {
        if (row.coeffs.dot(x) != row.rhs) return false;
    }
    for (const auto& row : system.inequalities) {
        if (row.coeffs.dot(x) < row.rhs) return false;
    }
    return true;
}

template <typename Scalar>
bool verify_certificate(const BasicLinearSystem<Scalar>& system,
                        const BasicFarkasCertificate<Scalar>& cert) {
    if (cert.equality_multipliers.size() != static_cast<Eigen::Index>(system.equalities.size()) ||
        cert.inequality_multipliers.size() != static_cast<Eigen::Index>(system.inequalities.size())) {
        return false;
    }
    VectorX<Scalar> combined = VectorX<Scalar>::Zero(system.variable_count);
    Scalar rhs(0);
    for (std::size_t i = 0; i < system.equalities.size(); ++i) {
        const Scalar& y = cert.equality_multipliers(static_cast<Eigen::Index>(i));
        if (y == 0) continue;
        combined += y * system.equalities[i].coeffs;
        rhs += y * system.equalities[i].rhs;
    }
    for (std::size_t i = 0; i < system.inequalities.size(); ++i) {
        const Scalar& z = cert.inequality_multipliers(static_cast<Eigen::Index>(i));
        if (z < 0) return false;
        if (z == 0) continue;
        combined += z * system.inequalities[i].coeffs;
        rhs += z * system.inequalities[i].rhs;
    }
    for (Eigen::Index j = 0; j < combined.size(); ++j) {
        if (combined(j) != 0) return false;
    }
    return rhs > 0;
}

namespace detail {

/// Dense two-phase tableau in standard form  A' w = b', w >= 0, b' >= 0.
template <typename Scalar>
class Simplex {
  public:
    using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

    explicit Simplex(const BasicLinearSystem<Scalar>& system) : system_(system) {
        system.validate();
        build();
    }

    /// Runs phase one. Returns false (and fills the certificate) when infeasible.
    bool phase_one(BasicFarkasCertificate<Scalar>& cert) {
        VectorX<Scalar> cost = VectorX<Scalar>::Zero(total_cols_);
        for (Eigen::Index j = artificial_begin_; j < total_cols_; ++j) cost(j) = 1;
        set_objective(cost);
        run(total_cols_);  // artificials may move during phase one
        if (-tableau_(rows_, total_cols_) > 0) {
            cert = extract_certificate(cost);
            return false;
        }
        drive_out_artificials();
        return true;
    }

    /// Minimizes objective . x over the original variables. Requires a successful phase one.
    bool phase_two(const VectorX<Scalar>& objective) {
        VectorX<Scalar> cost = VectorX<Scalar>::Zero(total_cols_);
        for (Eigen::Index j = 0; j < system_.variable_count; ++j) {
            cost(plus_col_[j]) = objective(j);
            if (minus_col_[j] >= 0) cost(minus_col_[j]) = -objective(j);
        }
        set_objective(cost);
        return run(artificial_begin_);
    }

    Scalar objective_value() const { return -tableau_(rows_, total_cols_); }

    VectorX<Scalar> solution() const {
        VectorX<Scalar> w = VectorX<Scalar>::Zero(total_cols_);
        for (Eigen::Index i = 0; i < rows_; ++i) w(basis_[i]) = tableau_(i, total_cols_);
        VectorX<Scalar> x(system_.variable_count);
        for (Eigen::Index j = 0; j < system_.variable_count; ++j) {
            x(j) = w(plus_col_[j]);
            if (minus_col_[j] >= 0) x(j) -= w(minus_col_[j]);
        }
        return x;
    }

  private:
    void build() {
        const Eigen::Index n = system_.variable_count;
        const auto eq_count = static_cast<Eigen::Index>(system_.equalities.size());
        const auto ineq_count = static_cast<Eigen::Index>(system_.inequalities.size());

        // An inequality with one positive coefficient and zero rhs is a sign
        // bound; it becomes a nonnegative column instead of a row.
        bound_row_of_.assign(n, -1);
        std::vector<bool> consumed(ineq_count, false);
        for (Eigen::Index i = 0; i < ineq_count; ++i) {
            const auto& row = system_.inequalities[i];
            if (row.rhs != 0) continue;
            Eigen::Index nonzero = -1;
            bool single = true;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (row.coeffs(j) == 0) continue;
                if (nonzero >= 0) { single = false; break; }
                nonzero = j;
            }
            if (!single || nonzero < 0 || row.coeffs(nonzero) < 0 || bound_row_of_[nonzero] >= 0) continue;
            bound_row_of_[nonzero] = i;
            consumed[i] = true;
        }

        Eigen::Index col = 0;
        plus_col_.assign(n, -1);
        minus_col_.assign(n, -1);
        for (Eigen::Index j = 0; j < n; ++j) {
            plus_col_[j] = col++;
            if (bound_row_of_[j] < 0) minus_col_[j] = col++;
        }

        // Row bookkeeping: which original constraint each tableau row encodes.
        for (Eigen::Index i = 0; i < eq_count; ++i) row_origin_.push_back({false, i});
        for (Eigen::Index i = 0; i < ineq_count; ++i) {
            if (!consumed[i]) row_origin_.push_back({true, i});
        }
        rows_ = static_cast<Eigen::Index>(row_origin_.size());

        slack_col_.assign(rows_, -1);
        for (Eigen::Index r = 0; r < rows_; ++r) {
            if (row_origin_[r].first) slack_col_[r] = col++;
        }

        // Orient each row so rhs >= 0; rows whose slack ends up with +1 start basic on it.
        sign_.assign(rows_, 1);
        std::vector<bool> needs_artificial(rows_, true);
        for (Eigen::Index r = 0; r < rows_; ++r) {
            const auto& row = origin_row(r);
            if (row_origin_[r].first) {
                // coeffs.x - s = rhs; negate when rhs <= 0 so the slack reads +1.
                if (row.rhs <= 0) {
                    sign_[r] = -1;
                    needs_artificial[r] = false;
                }
            } else if (row.rhs < 0) {
                sign_[r] = -1;
            }
        }
        artificial_begin_ = col;
        artificial_col_.assign(rows_, -1);
        for (Eigen::Index r = 0; r < rows_; ++r) {
            if (needs_artificial[r]) artificial_col_[r] = col++;
        }
        total_cols_ = col;

        tableau_ = RowMatrix::Zero(rows_ + 1, total_cols_ + 1);
        basis_.assign(rows_, -1);
        initial_col_.assign(rows_, -1);
        for (Eigen::Index r = 0; r < rows_; ++r) {
            const auto& row = origin_row(r);
            const Scalar s(sign_[r]);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (row.coeffs(j) == 0) continue;
                tableau_(r, plus_col_[j]) = s * row.coeffs(j);
                if (minus_col_[j] >= 0) tableau_(r, minus_col_[j]) = -s * row.coeffs(j);
            }
            if (slack_col_[r] >= 0) tableau_(r, slack_col_[r]) = -s;
            tableau_(r, total_cols_) = s * row.rhs;
            if (artificial_col_[r] >= 0) {
                tableau_(r, artificial_col_[r]) = 1;
                basis_[r] = artificial_col_[r];
            } else {
                basis_[r] = slack_col_[r];
            }
            initial_col_[r] = basis_[r];
        }
    }

    const LinearRow<Scalar>& origin_row(Eigen::Index r) const {
        const auto& [is_ineq, index] = row_origin_[r];
        return is_ineq ? system_.inequalities[index] : system_.equalities[index];
    }

    void set_objective(const VectorX<Scalar>& cost) {
        for (Eigen::Index j = 0; j < total_cols_; ++j) tableau_(rows_, j) = cost(j);
        tableau_(rows_, total_cols_) = 0;
        for (Eigen::Index r = 0; r < rows_; ++r) {
            const Scalar cb = cost(basis_[r]);
            if (cb == 0) continue;
            for (Eigen::Index j = 0; j <= total_cols_; ++j) {
                if (tableau_(r, j) != 0) tableau_(rows_, j) -= cb * tableau_(r, j);
            }
        }
    }

    void pivot(Eigen::Index prow, Eigen::Index pcol) {
        const Scalar inv = Scalar(1) / tableau_(prow, pcol);
        std::vector<Eigen::Index> nz;
        for (Eigen::Index j = 0; j <= total_cols_; ++j) {
            if (tableau_(prow, j) == 0) continue;
            tableau_(prow, j) *= inv;
            nz.push_back(j);
        }
        for (Eigen::Index r = 0; r <= rows_; ++r) {
            if (r == prow) continue;
            const Scalar factor = tableau_(r, pcol);
            if (factor == 0) continue;
            for (Eigen::Index j : nz) tableau_(r, j) -= factor * tableau_(prow, j);
        }
        basis_[prow] = pcol;
    }

    /// Bland's rule over columns [0, allowed_cols). Returns false on unboundedness.
    bool run(Eigen::Index allowed_cols) {
        while (true) {
            Eigen::Index entering = -1;
            for (Eigen::Index j = 0; j < allowed_cols; ++j) {
                if (tableau_(rows_, j) < 0) { entering = j; break; }
            }
            if (entering < 0) return true;
            Eigen::Index leaving = -1;
            Scalar best_ratio;
            for (Eigen::Index r = 0; r < rows_; ++r) {
                if (tableau_(r, entering) <= 0) continue;
                Scalar ratio = tableau_(r, total_cols_) / tableau_(r, entering);
                if (leaving < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[r] < basis_[leaving])) {
                    leaving = r;
                    best_ratio = std::move(ratio);
                }
            }
            if (leaving < 0) return false;
            pivot(leaving, entering);
        }
    }

    void drive_out_artificials() {
        for (Eigen::Index r = 0; r < rows_; ++r) {
            if (basis_[r] < artificial_begin_) continue;
            for (Eigen::Index j = 0; j < artificial_begin_; ++j) {
                if (tableau_(r, j) != 0) {
                    pivot(r, j);
                    break;
                }
            }
            // A row with no structural entries left is redundant; its artificial stays at zero.
        }
    }

    BasicFarkasCertificate<Scalar> extract_certificate(const VectorX<Scalar>& cost) const {
        // Simplex multipliers y_r = c_j - d_j on each row's initial unit column.
        BasicFarkasCertificate<Scalar> cert;
        cert.equality_multipliers = VectorX<Scalar>::Zero(static_cast<Eigen::Index>(system_.equalities.size()));
        cert.inequality_multipliers = VectorX<Scalar>::Zero(static_cast<Eigen::Index>(system_.inequalities.size()));
        for (Eigen::Index r = 0; r < rows_; ++r) {
            const Eigen::Index c = initial_col_[r];
            const Scalar multiplier = (cost(c) - tableau_(rows_, c)) * Scalar(sign_[r]);
            const auto& [is_ineq, index] = row_origin_[r];
            (is_ineq ? cert.inequality_multipliers : cert.equality_multipliers)(index) = multiplier;
        }
        // Sign bounds absorb the nonpositive residual on their column.
        for (Eigen::Index j = 0; j < system_.variable_count; ++j) {
            const Eigen::Index b = bound_row_of_[j];
            if (b < 0) continue;
            Scalar residual(0);
            for (std::size_t i = 0; i < system_.equalities.size(); ++i) {
                residual += cert.equality_multipliers(static_cast<Eigen::Index>(i)) * system_.equalities[i].coeffs(j);
            }
            for (std::size_t i = 0; i < system_.inequalities.size(); ++i) {
                if (static_cast<Eigen::Index>(i) == b) continue;
                residual += cert.inequality_multipliers(static_cast<Eigen::Index>(i)) * system_.inequalities[i].coeffs(j);
            }
            cert.inequality_multipliers(b) = -residual / system_.inequalities[b].coeffs(j);
        }
        return cert;
    }

    const BasicLinearSystem<Scalar>& system_;
    RowMatrix tableau_;
    Eigen::Index rows_ = 0;
    Eigen::Index total_cols_ = 0;
    Eigen::Index artificial_begin_ = 0;
    std::vector<Eigen::Index> bound_row_of_, plus_col_, minus_col_;
    std::vector<std::pair<bool, Eigen::Index>> row_origin_;
    std::vector<Eigen::Index> slack_col_, artificial_col_, basis_, initial_col_;
    std::vector<int> sign_;
};

template <typename Scalar>
bool lex_less(const VectorX<Scalar>& a, const VectorX<Scalar>& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace detail

template <typename Scalar>
BasicFeasibilityResult<Scalar> lp_feasible(const BasicLinearSystem<Scalar>& system) {
    detail::Simplex<Scalar> simplex(system);
    BasicFeasibilityResult<Scalar> result;
    if (!simplex.phase_one(result.certificate)) {
        result.status = Feasibility::infeasible;
        return result;
    }
    result.status = Feasibility::feasible;
    result.witness = simplex.solution();
    return result;
}

template <typename Scalar>
BasicOptimizationResult<Scalar> lp_optimize(const VectorX<Scalar>& objective,
                                           const BasicLinearSystem<Scalar>& system, Sense sense) {
    if (objective.size() != system.variable_count) throw StructuralError("objective has wrong length");
    detail::Simplex<Scalar> simplex(system);
    BasicOptimizationResult<Scalar> result;
    if (!simplex.phase_one(result.certificate)) {
        result.status = OptimumStatus::infeasible;
        return result;
    }
    const VectorX<Scalar> cost = sense == Sense::maximize ? VectorX<Scalar>(-objective) : objective;
    if (!simplex.phase_two(cost)) {
        result.status = OptimumStatus::unbounded;
        return result;
    }
    result.status = OptimumStatus::optimal;
    result.argmax = simplex.solution();
    result.value = objective.dot(result.argmax);
    return result;
}

/// Extreme points of a bounded polyhedron {x : G x >= h}, sorted lexicographically.
template <typename Scalar>
std::vector<VectorX<Scalar>> vertex_enumerate(const BasicLinearSystem<Scalar>& halfspaces) {
    halfspaces.validate();
    if (!halfspaces.equalities.empty()) throw StructuralError("vertex_enumerate takes inequalities only");
    const Eigen::Index n = halfspaces.variable_count;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Sense sense : {Sense::maximize, Sense::minimize}) {
            const auto opt = lp_optimize<Scalar>(VectorX<Scalar>::Unit(n, j), halfspaces, sense);
            if (opt.status == OptimumStatus::infeasible) return {};
            if (opt.status == OptimumStatus::unbounded) throw UnboundedPolyhedron("polyhedron is unbounded");
        }
    }

    const auto m = static_cast<Eigen::Index>(halfspaces.inequalities.size());
    std::vector<VectorX<Scalar>> found;
    if (n == 0) return found;
    std::vector<Eigen::Index> active(n);
    for (Eigen::Index i = 0; i < n; ++i) active[i] = i;
    // Walk all n-subsets of the m halfspaces in lexicographic order.
    while (n <= m) {
        MatrixX<Scalar> a(n, n);
        VectorX<Scalar> b(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            a.row(r) = halfspaces.inequalities[active[r]].coeffs.transpose();
            b(r) = halfspaces.inequalities[active[r]].rhs;
        }
        if (auto point = solve_square<Scalar>(std::move(a), std::move(b)); point && satisfies(halfspaces, *point)) {
            found.push_back(std::move(*point));
        }
        Eigen::Index pos = n - 1;
        while (pos >= 0 && active[pos] == m - n + pos) --pos;
        if (pos < 0) break;
        ++active[pos];
        for (Eigen::Index k = pos + 1; k < n; ++k) active[k] = active[k - 1] + 1;
    }
    std::sort(found.begin(), found.end(), detail::lex_less<Scalar>);
    found.erase(std::unique(found.begin(), found.end(),
                            [](const auto& a, const auto& b) { return a == b; }),
                found.end());
    return found;
}

/// {c >= 0 : sum_i c_i generators[i] == point}; the system behind cone_member.
template <typename Scalar>
BasicLinearSystem<Scalar> cone_system(const VectorX<Scalar>& point,
                                      const std::vector<VectorX<Scalar>>& generators) {
    const auto k = static_cast<Eigen::Index>(generators.size());
    for (const auto& g : generators) {
        if (g.size() != point.size()) throw StructuralError("cone membership: dimension mismatch");
    }
    BasicLinearSystem<Scalar> system(k);
    for (Eigen::Index d = 0; d < point.size(); ++d) {
        VectorX<Scalar> row(k);
        for (Eigen::Index i = 0; i < k; ++i) row(i) = generators[i](d);
        system.add_equality(std::move(row), point(d));
    }
    for (Eigen::Index i = 0; i < k; ++i) system.add_nonnegativity(i);
    return system;
}

/// cone_system plus the row sum_i c_i == 1; the system behind convex_member.
template <typename Scalar>
BasicLinearSystem<Scalar> hull_system(const VectorX<Scalar>& point,
                                      const std::vector<VectorX<Scalar>>& vertices) {
    auto system = cone_system(point, vertices);
    system.add_equality(VectorX<Scalar>::Ones(system.variable_count), Scalar(1));
    return system;
}

/// Nonnegative coefficients reproducing point (witness), or a certificate against cone_system.
template <typename Scalar>
BasicFeasibilityResult<Scalar> cone_member(const VectorX<Scalar>& point,
                                          const std::vector<VectorX<Scalar>>& generators) {
    return lp_feasible(cone_system(point, generators));
}

/// Probability weights reproducing point from vertices, or a certificate
/// against hull_system. Among all weight vectors the one maximizing the
/// smallest weight is returned, so interior points spread weight over every
/// vertex.
template <typename Scalar>
BasicFeasibilityResult<Scalar> convex_member(const VectorX<Scalar>& point,
                                            const std::vector<VectorX<Scalar>>& vertices) {
    if (vertices.empty()) throw StructuralError("convex_member: no vertices");
    auto hull = hull_system(point, vertices);
    const Eigen::Index k = hull.variable_count;

    // Same system with an extra variable t <= every weight; t is bounded by 1/k.
    BasicLinearSystem<Scalar> spread(k + 1);
    for (const auto& row : hull.equalities) {
        VectorX<Scalar> extended = VectorX<Scalar>::Zero(k + 1);
        extended.head(k) = row.coeffs;
        spread.add_equality(std::move(extended), row.rhs);
    }
    for (Eigen::Index i = 0; i < k; ++i) spread.add_nonnegativity(i);
    for (Eigen::Index i = 0; i < k; ++i) {
        VectorX<Scalar> row = VectorX<Scalar>::Zero(k + 1);
        row(i) = 1;
        row(k) = -1;
        spread.add_inequality(std::move(row), Scalar(0));
    }
    const auto opt = lp_optimize<Scalar>(VectorX<Scalar>::Unit(k + 1, k), spread, Sense::maximize);
    if (opt.status != OptimumStatus::optimal) return lp_feasible(hull);

    BasicFeasibilityResult<Scalar> result;
    result.status = Feasibility::feasible;
    result.witness = opt.argmax.head(k);
    return result;
}

}  // namespace gptsteer
