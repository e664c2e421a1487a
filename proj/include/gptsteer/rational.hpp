#pragma once

// Exact scalar and dense linear-algebra types shared by every module.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gptsteer {

/// GMP rational, always in lowest terms with a positive denominator.
/// Expression templates are off so values compose cleanly inside Eigen.
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<Rational>;
using Matrix = MatrixX<Rational>;

/// Raised for dimension mismatches and other malformed inputs.
class StructuralError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Parses "p/q", "n", or "-p/q". Throws StructuralError on anything else or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" form; integers are written "n/1".
std::string to_string(const Rational& value);

/// Comma-separated "p/q" list, used by the CLI for inline vectors.
Vector parse_vector(std::string_view text);
std::string to_string(const Vector& v);

Vector make_vector(std::initializer_list<Rational> values);
Vector unit_vector(Eigen::Index size, Eigen::Index index);

/// Exact rank by fraction-preserving Gaussian elimination.
template <typename Scalar>
Eigen::Index exact_rank(MatrixX<Scalar> a) {
    Eigen::Index rank = 0;
    for (Eigen::Index col = 0; col < a.cols() && rank < a.rows(); ++col) {
        Eigen::Index pivot = rank;
        while (pivot < a.rows() && a(pivot, col) == 0) ++pivot;
        if (pivot == a.rows()) continue;
        a.row(pivot).swap(a.row(rank));
        for (Eigen::Index r = rank + 1; r < a.rows(); ++r) {
            if (a(r, col) == 0) continue;
            const Scalar factor = a(r, col) / a(rank, col);
            a.row(r) -= factor * a.row(rank);
        }
        ++rank;
    }
    return rank;
}

/// Solves a square system exactly; empty when the matrix is singular.
template <typename Scalar>
std::optional<VectorX<Scalar>> solve_square(MatrixX<Scalar> a, VectorX<Scalar> b) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n || b.size() != n) throw StructuralError("solve_square: shape mismatch");
    for (Eigen::Index col = 0; col < n; ++col) {
        Eigen::Index pivot = col;
        while (pivot < n && a(pivot, col) == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != col) {
            a.row(pivot).swap(a.row(col));
            std::swap(b(pivot), b(col));
        }
        const Scalar inv = Scalar(1) / a(col, col);
        a.row(col) *= inv;
        b(col) *= inv;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (r == col || a(r, col) == 0) continue;
            const Scalar factor = a(r, col);
            a.row(r) -= factor * a.row(col);
            b(r) -= factor * b(col);
        }
    }
    return b;
}

}  // namespace gptsteer
