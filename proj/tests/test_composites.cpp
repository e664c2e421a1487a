#include "gptsteer/composites.hpp"
#include "gptsteer/theorem.hpp"

#include <doctest.h>

#include <algorithm>

using namespace gptsteer;

namespace {

Vector half(std::initializer_list<Rational> v) { return make_vector(v) / Rational(2); }

// Picks a basis among the extremal effects (as matrix columns).
Matrix effect_basis(const StateSpace& s) {
    Matrix basis(s.ambient_dim(), 0);
    for (const auto& e : s.extremal_effects()) {
        Matrix candidate(s.ambient_dim(), basis.cols() + 1);
        candidate << basis, e.coeffs;
        if (exact_rank(candidate) == candidate.cols()) basis = candidate;
        if (basis.cols() == s.ambient_dim()) break;
    }
    return basis;
}

}  // namespace

TEST_CASE("product states") {
    const auto gbit = zoo_gbit();
    const State mu = gbit.barycenter();
    const auto mm = product_state(mu, gbit, mu, gbit);
    Matrix expected = Matrix::Zero(3, 3);
    expected(0, 0) = 1;
    CHECK(mm.matrix == expected);

    const State a{gbit.vertices()[0]}, b{gbit.vertices()[1]};
    const auto ab = product_state(a, gbit, b, gbit);
    CHECK(exact_rank(ab.matrix) == 1);
    for (Eigen::Index r = 0; r < 3; ++r) {
        for (Eigen::Index c = 0; c < 3; ++c) CHECK(abs(ab.matrix(r, c)) == 1);
    }
    for (const auto& ea : gbit.extremal_effects()) {
        for (const auto& eb : gbit.extremal_effects()) CHECK(pairing(ab, ea, eb) == probability(ea, a) * probability(eb, b));
    }
    CHECK_THROWS_AS(product_state(State{make_vector({1, 2, 0})}, gbit, mu, gbit), std::invalid_argument);
    CHECK_THROWS_AS(BipartiteState(gbit, gbit, Matrix::Zero(2, 3)), StructuralError);
}

TEST_CASE("max tensor membership") {
    const auto gbit = zoo_gbit();
    const auto phi = canonical_max_entangled(gbit);
    CHECK(in_max_tensor(product_state(gbit.barycenter(), gbit, State{gbit.vertices()[2]}, gbit)));
    CHECK(in_max_tensor(phi));
    // Oracle: the 6 x 6 positivity table computed directly.
    int negative = 0;
    for (const auto& ea : gbit.extremal_effects()) {
        for (const auto& eb : gbit.extremal_effects()) negative += (ea.coeffs.transpose() * phi.matrix * eb.coeffs)(0, 0) < 0;
    }
    CHECK(negative == 0);

    auto scaled = product_state(gbit.barycenter(), gbit, gbit.barycenter(), gbit);
    CHECK_THROWS_AS(BipartiteState(gbit, gbit, Matrix(2 * scaled.matrix)), std::invalid_argument);
    scaled.matrix *= 2;
    CHECK_FALSE(in_max_tensor(scaled));

    // Normalized but outside the max tensor product.
    Matrix bad = phi.matrix;
    bad(2, 2) = 2;
    CHECK_FALSE(in_max_tensor(BipartiteState(gbit, gbit, bad)));
}

TEST_CASE("separability") {
    const auto gbit = zoo_gbit();
    const State a{gbit.vertices()[0]}, b{gbit.vertices()[3]};
    const auto prod = product_state(a, gbit, b, gbit);
    auto r = is_separable(prod);
    REQUIRE(r.separable);
    CHECK(r.decomposition.size() == 1);
    CHECK(audit(r, prod));

    const auto mix = mix_bipartite({prod, product_state(b, gbit, a, gbit)}, {Rational(1, 2), Rational(1, 2)});
    r = is_separable(mix);
    REQUIRE(r.separable);
    CHECK(audit(r, mix));

    const auto phi = canonical_max_entangled(gbit);
    r = is_separable(phi);
    REQUIRE_FALSE(r.separable);
    CHECK(verify_certificate(separability_system(phi), r.certificate));
    CHECK(audit(r, phi));

    Matrix bad = phi.matrix;
    bad(2, 2) = 2;
    CHECK_THROWS_AS(is_separable(BipartiteState(gbit, gbit, bad)), std::invalid_argument);
}

TEST_CASE("minimal tensor product sits inside the maximal one") {
    Sampler sampler(123);
    for (const auto& name : {"gbit", "classical-3", "polygon-5"}) {
        const auto s = zoo_model(name);
        for (int trial = 0; trial < 34; ++trial) {
            std::vector<BipartiteState> terms;
            std::vector<Rational> weights;
            const std::size_t count = 1 + sampler.below(3);
            for (std::size_t i = 0; i < count; ++i) {
                terms.push_back(product_state(sampler.state(s), s, sampler.state(s), s));
                weights.push_back(Rational(1, static_cast<long>(count)));
            }
            const auto w = mix_bipartite(terms, weights);
            CHECK(in_max_tensor(w));
        }
    }
}

TEST_CASE("marginals") {
    const auto gbit = zoo_gbit();
    const State a{gbit.vertices()[1]}, b = gbit.barycenter();
    const auto prod = product_state(a, gbit, b, gbit);
    CHECK(marginal(prod, Side::A) == a);
    CHECK(marginal(prod, Side::B) == b);
    const auto phi = canonical_max_entangled(gbit);
    CHECK(marginal(phi, Side::A) == gbit.barycenter());
    CHECK(marginal(phi, Side::B) == gbit.barycenter());
    const auto mix = mix_bipartite({prod, phi}, {Rational(1, 3), Rational(2, 3)});
    CHECK(marginal(mix, Side::A).coords ==
          Rational(1, 3) * marginal(prod, Side::A).coords + Rational(2, 3) * marginal(phi, Side::A).coords);
}

TEST_CASE("conditional states") {
    const auto gbit = zoo_gbit();
    const auto phi = canonical_max_entangled(gbit);
    const auto on_u = conditional_state(phi, gbit.unit_effect(), Side::B);
    CHECK(on_u.probability == 1);
    CHECK(on_u.state == marginal(phi, Side::A));

    const State a{gbit.vertices()[0]}, b{gbit.vertices()[2]};
    const auto prod = product_state(a, gbit, b, gbit);
    const auto given = conditional_state(prod, Effect{half({1, 0, 1})}, Side::A);
    CHECK(given.state == b);

    const auto steer = conditional_state(phi, Effect{half({1, 1, 0})}, Side::A);
    CHECK(steer.probability == Rational(1, 2));
    CHECK(steer.state.coords == make_vector({1, 1, 1}));

    // (1,1,1) gives X- probability zero.
    CHECK_THROWS_AS(conditional_state(prod, Effect{half({1, -1, 0})}, Side::A), NullConditioning);
    CHECK(conditional_subnormalized(prod, Effect{half({1, -1, 0})}, Side::A) == Vector::Zero(3));
}

TEST_CASE("no-signaling and conditional consistency") {
    Sampler sampler(2024);
    for (const auto& name : {"gbit", "classical-2", "classical-3"}) {
        const auto s = zoo_model(name);
        const auto phi = canonical_max_entangled(s);
        for (int trial = 0; trial < 15; ++trial) {
            const auto w = sampler.max_tensor_state(s, phi);
            const auto obs = sampler.dichotomic_observable(s, 4, "A");
            for (Side side : {Side::A, Side::B}) {
                const Side other = side == Side::A ? Side::B : Side::A;
                Vector sum = Vector::Zero(s.ambient_dim());
                Vector chained = Vector::Zero(s.ambient_dim());
                for (const auto& e : obs.effects) {
                    const Vector sub = conditional_subnormalized(w, e, side);
                    sum += sub;
                    if (sub(0) != 0) {
                        const auto c = conditional_state(w, e, side);
                        chained += c.probability * c.state.coords;
                    }
                }
                CHECK(sum == marginal(w, other).coords);
                CHECK(chained == marginal(w, other).coords);
            }
        }
    }
}

TEST_CASE("local tomography: extremal-effect statistics determine the matrix") {
    Sampler sampler(77);
    const auto s = zoo_gbit();
    const auto phi = canonical_max_entangled(s);
    const Matrix basis = effect_basis(s);
    REQUIRE(basis.cols() == 3);
    for (int trial = 0; trial < 10; ++trial) {
        const auto w = sampler.max_tensor_state(s, phi);
        Matrix table(3, 3);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) table(i, j) = pairing(w, Effect{basis.col(i)}, Effect{basis.col(j)});
        }
        // table = B^T M B, so M = B^{-T} table B^{-1}.
        Matrix rebuilt(3, 3);
        Matrix bt = basis.transpose();
        Matrix x(3, 3);
        for (int c = 0; c < 3; ++c) x.col(c) = *solve_square<Rational>(bt, table.col(c));
        for (int r = 0; r < 3; ++r) rebuilt.row(r) = solve_square<Rational>(bt, x.row(r).transpose())->transpose();
        CHECK(rebuilt == w.matrix);
    }
}

TEST_CASE("canonical entangled states") {
    const auto bit = zoo_classical(2);
    const auto cb = canonical_max_entangled(bit);
    CHECK(in_max_tensor(cb));
    // Perfect correlation: the two point indicators.
    const Effect f0{make_vector({1, -1})}, f1{make_vector({0, 1})};
    CHECK(pairing(cb, f0, f0) == Rational(1, 2));
    CHECK(pairing(cb, f1, f1) == Rational(1, 2));
    CHECK(pairing(cb, f0, f1) == 0);
    CHECK(is_separable(cb).separable);  // classical composites are separable

    const auto gbit = zoo_gbit();
    const Matrix j = cone_isomorphism(gbit);
    CHECK(j * gbit.unit_effect().coeffs == gbit.barycenter().coords);
    CHECK(j * half({1, 1, 0}) == half({1, 1, 1}));
    std::vector<Vector> images;
    for (const auto& e : gbit.extremal_effects()) {
        if (e.coeffs(0) == Rational(1, 2)) images.push_back(j * e.coeffs * 2);
    }
    REQUIRE(images.size() == 4);
    for (const auto& v : gbit.vertices()) CHECK(std::find(images.begin(), images.end(), v) != images.end());

    const auto tri = canonical_max_entangled(zoo_polygon(3));
    CHECK(in_max_tensor(tri));
    CHECK(marginal(tri, Side::B) == zoo_polygon(3).barycenter());
    CHECK_THROWS_AS(canonical_max_entangled(zoo_polygon(5)), UnsupportedModel);
}
