#include "gptsteer/gpt.hpp"
#include "gptsteer/lp.hpp"

#include <doctest.h>

#include <random>

using namespace gptsteer;

namespace {

Rational determinant(const Matrix& m) {
    if (m.rows() == 1) return m(0, 0);
    Rational det(0);
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (m(0, c) == 0) continue;
        Matrix minor(m.rows() - 1, m.cols() - 1);
        for (Eigen::Index r = 1; r < m.rows(); ++r) {
            for (Eigen::Index k = 0, kk = 0; k < m.cols(); ++k) {
                if (k != c) minor(r - 1, kk++) = m(r, k);
            }
        }
        const Rational term = m(0, c) * determinant(minor);
        det += (c % 2 == 0) ? term : Rational(-term);
    }
    return det;
}

// Brute-force effect-polytope vertices: every square subsystem of the
// 2|V| constraints 0 <= e.v <= 1 is solved by Cramer's rule and kept when
// the solution is feasible. Independent of the simplex and of solve_square.
std::vector<Vector> effect_vertices_oracle(const StateSpace& space) {
    const Eigen::Index n = space.ambient_dim();
    std::vector<std::pair<Vector, Rational>> rows;  // coeffs . e == rhs
    for (const auto& v : space.vertices()) {
        rows.push_back({v, 0});
        rows.push_back({v, 1});
    }
    std::vector<Vector> found;
    const std::size_t m = rows.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
        if (static_cast<Eigen::Index>(__builtin_popcountll(mask)) != n) continue;
        Matrix a(n, n);
        Vector b(n);
        Eigen::Index r = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (std::size_t{1} << i)) {
                a.row(r) = rows[i].first.transpose();
                b(r++) = rows[i].second;
            }
        }
        const Rational det = determinant(a);
        if (det == 0) continue;
        Vector x(n);
        for (Eigen::Index c = 0; c < n; ++c) {
            Matrix ac = a;
            ac.col(c) = b;
            x(c) = determinant(ac) / det;
        }
        bool ok = true;
        for (const auto& v : space.vertices()) ok = ok && x.dot(v) >= 0 && x.dot(v) <= 1;
        if (ok && std::find(found.begin(), found.end(), x) == found.end()) found.push_back(x);
    }
    return found;
}

bool same_set(std::vector<Vector> a, const std::vector<Effect>& b) {
    if (a.size() != b.size()) return false;
    for (const auto& e : b) {
        const auto it = std::find(a.begin(), a.end(), e.coeffs);
        if (it == a.end()) return false;
        a.erase(it);
    }
    return a.empty();
}

Vector half(std::initializer_list<Rational> v) { return make_vector(v) / Rational(2); }

}  // namespace

TEST_CASE("probability and effect validity") {
    const auto gbit = zoo_gbit();
    const State mu = gbit.barycenter();
    CHECK(mu.coords == make_vector({1, 0, 0}));
    CHECK(probability(gbit.unit_effect(), mu) == 1);
    CHECK(probability(gbit.unit_effect(), State{gbit.vertices()[2]}) == 1);
    CHECK(probability(gbit.zero_effect(), mu) == 0);
    CHECK(probability(Effect{half({1, 1, 0})}, State{make_vector({1, 1, 1})}) == 1);
    CHECK_THROWS_AS(probability(Effect{make_vector({1, 0})}, mu), StructuralError);

    CHECK(is_valid_effect(gbit.unit_effect().coeffs, gbit));
    CHECK_FALSE(is_valid_effect(2 * gbit.unit_effect().coeffs, gbit));
    // (1/4)(1,1,1) evaluates to -1/4 on (1,-1,-1).
    const Vector quarter = make_vector({1, 1, 1}) / Rational(4);
    CHECK(quarter.dot(make_vector({1, -1, -1})) == Rational(-1, 4));
    CHECK_FALSE(is_valid_effect(quarter, gbit));
}

TEST_CASE("state validity") {
    const auto gbit = zoo_gbit();
    for (const auto& v : gbit.vertices()) CHECK(is_valid_state(v, gbit));
    CHECK(is_valid_state(gbit.barycenter().coords, gbit));
    CHECK_FALSE(is_valid_state(make_vector({1, 2, 0}), gbit));
    CHECK_FALSE(is_valid_state(make_vector({Rational(1, 2), 0, 0}), gbit));
    CHECK(is_valid_subnormalized_state(make_vector({Rational(1, 2), 0, 0}), gbit));
    CHECK_FALSE(is_valid_subnormalized_state(make_vector({2, 0, 0}), gbit));
}

TEST_CASE("observable validity") {
    const auto gbit = zoo_gbit();
    const Effect e{half({1, 1, 0})};
    CHECK(is_valid_observable(dichotomic("e", e, gbit), gbit));
    CHECK_FALSE(is_valid_observable(Observable{"uu", {"a", "b"}, {gbit.unit_effect(), gbit.unit_effect()}}, gbit));
    CHECK(is_valid_observable(gbit_fiducial_x(), gbit));
    CHECK(is_valid_observable(gbit_fiducial_y(), gbit));
    CHECK_FALSE(is_valid_observable(Observable{"empty", {}, {}}, gbit));
    // Zero effects are allowed.
    CHECK(is_valid_observable(Observable{"z", {"a", "b"}, {gbit.unit_effect(), gbit.zero_effect()}}, gbit));
}

TEST_CASE("extremal effects match the brute-force oracle") {
    SUBCASE("classical bit") {
        const auto s = zoo_classical(2);
        CHECK(s.extremal_effects().size() == 4);
        CHECK(same_set(effect_vertices_oracle(s), s.extremal_effects()));
    }
    SUBCASE("gbit") {
        const auto s = zoo_gbit();
        REQUIRE(s.extremal_effects().size() == 6);
        CHECK(same_set(effect_vertices_oracle(s), s.extremal_effects()));
        CHECK(same_set({Vector::Zero(3), make_vector({1, 0, 0}), half({1, 1, 0}), half({1, -1, 0}), half({1, 0, 1}),
                        half({1, 0, -1})},
                       s.extremal_effects()));
    }
    SUBCASE("classical trit") {
        const auto s = zoo_classical(3);
        CHECK(s.extremal_effects().size() == 8);
        CHECK(same_set(effect_vertices_oracle(s), s.extremal_effects()));
        // Each extremal effect is 0/1-valued on the vertices.
        for (const auto& e : s.extremal_effects()) {
            for (const auto& v : s.vertices()) CHECK((e.coeffs.dot(v) == 0 || e.coeffs.dot(v) == 1));
        }
    }
    SUBCASE("pentagon") {
        const auto s = zoo_polygon(5);
        CHECK(same_set(effect_vertices_oracle(s), s.extremal_effects()));
    }
}

TEST_CASE("gbit effect polytope is closed under the square's symmetries") {
    const auto s = zoo_gbit();
    // Generators of the dihedral group acting on (b, c): swap and sign flip.
    auto swap = [](Vector v) { std::swap(v(1), v(2)); return v; };
    auto flip = [](Vector v) { v(1) = -v(1); return v; };
    std::vector<Vector> swapped, flipped;
    for (const auto& e : s.extremal_effects()) {
        swapped.push_back(swap(e.coeffs));
        flipped.push_back(flip(e.coeffs));
    }
    CHECK(same_set(swapped, s.extremal_effects()));
    CHECK(same_set(flipped, s.extremal_effects()));
}

TEST_CASE("random valid effects are mixtures of the extremal effects") {
    const auto s = zoo_gbit();
    std::vector<Vector> extremal;
    for (const auto& e : s.extremal_effects()) extremal.push_back(e.coeffs);
    std::mt19937_64 rng(5);
    int checked = 0;
    while (checked < 40) {
        Vector e(3);
        for (int d = 0; d < 3; ++d) e(d) = Rational(static_cast<long>(rng() % 17) - 8, 8);
        if (!is_valid_effect(e, s)) continue;
        ++checked;
        const auto r = convex_member(e, extremal);
        REQUIRE(r.feasible());
        Vector rebuilt = Vector::Zero(3);
        for (std::size_t i = 0; i < extremal.size(); ++i) rebuilt += r.witness(static_cast<Eigen::Index>(i)) * extremal[i];
        CHECK(rebuilt == e);
    }
}

TEST_CASE("mixing") {
    const auto gbit = zoo_gbit();
    const State a{make_vector({1, 1, 1})}, b{make_vector({1, -1, -1})};
    const std::vector<Rational> one{1};
    CHECK(mix_states(std::vector<State>{a}, one) == a);
    CHECK(mix_states(std::vector<State>{a, b}, std::vector<Rational>{Rational(1, 2), Rational(1, 2)}).coords ==
          make_vector({1, 0, 0}));
    CHECK(mix_states(std::vector<State>{a, a}, std::vector<Rational>{Rational(1, 3), Rational(2, 3)}) == a);
    CHECK_THROWS(mix_states(std::vector<State>{a, b}, std::vector<Rational>{Rational(1, 2), Rational(1, 3)}));
    CHECK_THROWS(mix_states(std::vector<State>{a, b}, std::vector<Rational>{Rational(3, 2), Rational(-1, 2)}));

    const Effect zero = gbit.zero_effect(), u = gbit.unit_effect();
    CHECK(mix_effects(std::vector<Effect>{zero, u}, std::vector<Rational>{Rational(1, 2), Rational(1, 2)}).coeffs ==
          half({1, 0, 0}));
    CHECK(mix_effects(std::vector<Effect>{u}, one) == u);
    CHECK(mix_effects(std::vector<Effect>{Effect{half({1, 1, 0})}, Effect{half({1, 0, 1})}},
                      std::vector<Rational>{Rational(1, 2), Rational(1, 2)})
              .coeffs == half({1, Rational(1, 2), Rational(1, 2)}));
}

TEST_CASE("mixing is associative") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<Effect> e;
        for (int i = 0; i < 3; ++i) e.push_back(Effect{make_vector({Rational(static_cast<long>(rng() % 9), 8),
                                                                     Rational(static_cast<long>(rng() % 9) - 4, 8),
                                                                     Rational(static_cast<long>(rng() % 9) - 4, 8)})});
        const Rational p(static_cast<long>(rng() % 5), 4), q(static_cast<long>(rng() % 5), 4);
        const Effect ab = mix_effects(std::vector<Effect>{e[0], e[1]}, std::vector<Rational>{p, 1 - p});
        const Effect nested = mix_effects(std::vector<Effect>{ab, e[2]}, std::vector<Rational>{q, 1 - q});
        const Effect flat = mix_effects(e, std::vector<Rational>{q * p, q * (1 - p), 1 - q});
        CHECK(nested == flat);
    }
}

TEST_CASE("depolarizing") {
    const auto gbit = zoo_gbit();
    const auto x = gbit_fiducial_x();
    CHECK(depolarize_observable(x, 1, gbit).effects == x.effects);
    const auto flat = depolarize_observable(x, 0, gbit);
    for (const auto& e : flat.effects) CHECK(e.coeffs == half({1, 0, 0}));
    const auto noisy = depolarize_observable(x, Rational(1, 2), gbit);
    CHECK(noisy.effects[0].coeffs == half({1, Rational(1, 2), 0}));
    CHECK(noisy.effects[1].coeffs == half({1, Rational(-1, 2), 0}));
    CHECK_THROWS_AS(depolarize_observable(x, Rational(3, 2), gbit), std::invalid_argument);

    // Valid for every eta on a grid, across the zoo.
    for (const auto& name : {"gbit", "classical-3", "polygon-5"}) {
        const auto s = zoo_model(name);
        for (const auto& e : s.extremal_effects()) {
            const auto obs = dichotomic("e", e, s);
            for (int k = 0; k <= 8; ++k) CHECK(is_valid_observable(depolarize_observable(obs, Rational(k, 8), s), s));
        }
    }
}

TEST_CASE("outcome probabilities sum to one") {
    std::mt19937_64 rng(3);
    for (const auto& name : {"gbit", "classical-2", "classical-3", "polygon-3", "polygon-6"}) {
        const auto s = zoo_model(name);
        for (const auto& e : s.extremal_effects()) {
            const auto obs = dichotomic("e", e, s);
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<State> vs;
                std::vector<Rational> w;
                long total = 0;
                for (const auto& v : s.vertices()) {
                    vs.push_back(State{v});
                    const long draw = 1 + static_cast<long>(rng() % 4);
                    w.push_back(draw);
                    total += draw;
                }
                for (auto& x : w) x /= total;
                const State omega = mix_states(vs, w);
                Rational sum(0);
                for (const auto& eff : obs.effects) sum += probability(eff, omega);
                CHECK(sum == 1);
            }
        }
    }
}

TEST_CASE("model zoo") {
    const auto c2 = zoo_classical(2);
    CHECK(c2.vertex_count() == 2);
    CHECK(c2.ambient_dim() == 2);
    const auto c3 = zoo_classical(3);
    Matrix v(3, 3);
    for (int i = 0; i < 3; ++i) v.row(i) = c3.vertices()[i].transpose();
    CHECK(exact_rank(v) == 3);
    CHECK_THROWS_AS(zoo_classical(1), std::invalid_argument);
    CHECK_THROWS_AS(zoo_polygon(2), std::invalid_argument);

    const auto g = zoo_polygon(4);
    CHECK(g.label() == "gbit");
    for (const auto& vert : g.vertices()) CHECK((abs(vert(1)) == 1 && abs(vert(2)) == 1));
    const auto tri = zoo_polygon(3);
    CHECK(tri.vertex_count() == 3);
    CHECK(tri.extremal_effects().size() == 8);
    for (int n = 5; n <= 8; ++n) {
        const auto p = zoo_polygon(n);
        CHECK(p.vertex_count() == static_cast<std::size_t>(n));
        for (const auto& vert : p.vertices()) CHECK(vert(1) * vert(1) + vert(2) * vert(2) == 1);
    }
    CHECK(zoo_model("classical-4").vertex_count() == 4);
    CHECK_THROWS_AS(zoo_model("nosuch"), std::invalid_argument);
    CHECK_THROWS_AS(zoo_model("classical-x"), std::invalid_argument);
}

TEST_CASE("state space construction rejects bad vertex lists") {
    CHECK_THROWS_AS(StateSpace("bad", {make_vector({2, 0})}), StructuralError);
    CHECK_THROWS_AS(StateSpace("flat", {make_vector({1, 0, 0}), make_vector({1, 1, 0})}), StructuralError);
    CHECK_THROWS_AS(StateSpace("interior", {make_vector({1, 0}), make_vector({1, 1}), make_vector({1, Rational(1, 2)})}),
                    StructuralError);
}
