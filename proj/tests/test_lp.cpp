#include "gptsteer/lp.hpp"

#include <doctest.h>

#include <random>

using namespace gptsteer;

namespace {

LinearSystem interval(Rational lo, Rational hi) {
    LinearSystem s(1);
    s.add_inequality(make_vector({1}), lo);
    s.add_inequality(make_vector({-1}), -hi);
    return s;
}

// Fourier-Motzkin elimination: an independent feasibility decision for
// systems of inequalities a.x >= b.
bool fourier_motzkin_feasible(std::vector<LinearRow<Rational>> rows, Eigen::Index vars) {
    for (Eigen::Index v = vars - 1; v >= 0; --v) {
        std::vector<LinearRow<Rational>> pos, neg, next;
        for (auto& r : rows) {
            if (r.coeffs(v) > 0) pos.push_back(r);
            else if (r.coeffs(v) < 0) neg.push_back(r);
            else next.push_back(r);
        }
        for (const auto& p : pos) {
            for (const auto& n : neg) {
                const Rational a = p.coeffs(v), b = -n.coeffs(v);
                next.push_back({b * p.coeffs + a * n.coeffs, b * p.rhs + a * n.rhs});
            }
        }
        rows = std::move(next);
    }
    for (const auto& r : rows) {
        if (0 < r.rhs) return false;
    }
    return true;
}

std::vector<LinearRow<Rational>> as_inequalities(const LinearSystem& s) {
    auto rows = s.inequalities;
    for (const auto& e : s.equalities) {
        rows.push_back(e);
        rows.push_back({-e.coeffs, -e.rhs});
    }
    return rows;
}

LinearSystem random_system(std::mt19937_64& rng, Eigen::Index vars) {
    LinearSystem s(vars);
    const int ineqs = 2 + static_cast<int>(rng() % 5);
    const int eqs = static_cast<int>(rng() % 2);
    auto draw = [&] { return Rational(static_cast<long>(rng() % 7) - 3, 1 + static_cast<long>(rng() % 3)); };
    for (int i = 0; i < ineqs + eqs; ++i) {
        Vector row(vars);
        for (Eigen::Index j = 0; j < vars; ++j) row(j) = draw();
        if (i < ineqs) s.add_inequality(row, draw());
        else s.add_equality(row, draw());
    }
    return s;
}

}  // namespace

TEST_CASE("rational text round trip and canonical form") {
    CHECK(to_string(parse_rational("2/4")) == "1/2");
    CHECK(to_string(parse_rational("-3")) == "-3/1");
    CHECK_THROWS_AS(parse_rational("6/-1"), StructuralError);
    CHECK_THROWS_AS(parse_rational("1/0"), StructuralError);
    CHECK_THROWS_AS(parse_rational("x"), StructuralError);
}

TEST_CASE("lp_feasible on intervals") {
    SUBCASE("nonempty interval has witness 0") {
        const auto r = lp_feasible(interval(0, 1));
        REQUIRE(r.feasible());
        CHECK(r.witness(0) == 0);
    }
    SUBCASE("empty interval carries the (1,1) certificate") {
        const auto s = interval(1, 0);
        const auto r = lp_feasible(s);
        REQUIRE_FALSE(r.feasible());
        CHECK(verify_certificate(s, r.certificate));
        CHECK(r.certificate.inequality_multipliers(0) == r.certificate.inequality_multipliers(1));
    }
    SUBCASE("malformed row is a structural error") {
        LinearSystem s(2);
        s.add_inequality(make_vector({1}), 0);
        CHECK_THROWS_AS(lp_feasible(s), StructuralError);
    }
}

TEST_CASE("lp_optimize") {
    const auto box = interval(0, 1);
    auto r = lp_optimize(make_vector({1}), box, Sense::maximize);
    REQUIRE(r.status == OptimumStatus::optimal);
    CHECK(r.value == 1);
    CHECK(r.argmax(0) == 1);
    r = lp_optimize(make_vector({1}), box, Sense::minimize);
    CHECK(r.value == 0);

    LinearSystem free(1);
    CHECK(lp_optimize(make_vector({1}), free, Sense::maximize).status == OptimumStatus::unbounded);
    CHECK(lp_optimize(make_vector({1}), interval(2, 1), Sense::maximize).status == OptimumStatus::infeasible);
    CHECK_THROWS_AS(lp_optimize(make_vector({1, 2}), box, Sense::maximize), StructuralError);
}

TEST_CASE("lp_optimize handles redundant equalities") {
    // x + y == 1 stated twice, x,y >= 0; max x.
    LinearSystem s(2);
    s.add_equality(make_vector({1, 1}), 1);
    s.add_equality(make_vector({2, 2}), 2);
    s.add_nonnegativity(0);
    s.add_nonnegativity(1);
    const auto r = lp_optimize(make_vector({1, 0}), s, Sense::maximize);
    REQUIRE(r.status == OptimumStatus::optimal);
    CHECK(r.value == 1);
    CHECK(satisfies(s, r.argmax));
}

TEST_CASE("vertex_enumerate") {
    SUBCASE("unit square") {
        LinearSystem s(2);
        s.add_nonnegativity(0);
        s.add_nonnegativity(1);
        s.add_inequality(make_vector({-1, 0}), -1);
        s.add_inequality(make_vector({0, -1}), -1);
        const auto v = vertex_enumerate(s);
        REQUIRE(v.size() == 4);
        CHECK(v[0] == make_vector({0, 0}));
        CHECK(v[1] == make_vector({0, 1}));
        CHECK(v[2] == make_vector({1, 0}));
        CHECK(v[3] == make_vector({1, 1}));
    }
    SUBCASE("probability simplex in three variables") {
        LinearSystem s(3);
        for (int i = 0; i < 3; ++i) s.add_nonnegativity(i);
        s.add_inequality(make_vector({1, 1, 1}), 1);
        s.add_inequality(make_vector({-1, -1, -1}), -1);
        const auto v = vertex_enumerate(s);
        REQUIRE(v.size() == 3);
        for (int i = 0; i < 3; ++i) CHECK(v[2 - i] == unit_vector(3, i));
    }
    SUBCASE("unbounded region is rejected") {
        LinearSystem s(2);
        s.add_nonnegativity(0);
        s.add_nonnegativity(1);
        CHECK_THROWS_AS(vertex_enumerate(s), UnboundedPolyhedron);
    }
    SUBCASE("empty region has no vertices") {
        CHECK(vertex_enumerate(interval(1, 0)).empty());
    }
    SUBCASE("equalities are rejected") {
        LinearSystem s(1);
        s.add_equality(make_vector({1}), 0);
        CHECK_THROWS_AS(vertex_enumerate(s), StructuralError);
    }
}

TEST_CASE("cone and convex membership") {
    const std::vector<Vector> gbit{make_vector({1, 1, 1}), make_vector({1, -1, 1}), make_vector({1, -1, -1}),
                                   make_vector({1, 1, -1})};
    SUBCASE("generator itself") {
        const std::vector<Vector> gens{make_vector({1, 0}), make_vector({0, 1})};
        const auto r = cone_member(gens[0], gens);
        REQUIRE(r.feasible());
        CHECK(r.witness == make_vector({1, 0}));
    }
    SUBCASE("zero vector") {
        const auto r = cone_member<Rational>(Vector::Zero(3), gbit);
        REQUIRE(r.feasible());
        CHECK(r.witness == Vector::Zero(4));
    }
    SUBCASE("gbit barycenter") {
        const Vector mu = make_vector({1, 0, 0});
        const auto cone = cone_member(mu, gbit);
        REQUIRE(cone.feasible());
        Vector rebuilt = Vector::Zero(3);
        for (int i = 0; i < 4; ++i) {
            CHECK(cone.witness(i) >= 0);
            rebuilt += cone.witness(i) * gbit[i];
        }
        CHECK(rebuilt == mu);
        // (1/4, 1/4, 1/4, 1/4) solves the underdetermined 3x4 system directly.
        const Vector quarter = Vector::Constant(4, Rational(1, 4));
        CHECK(satisfies(hull_system(mu, gbit), quarter));
        const auto hull = convex_member(mu, gbit);
        REQUIRE(hull.feasible());
        CHECK(hull.witness == quarter);
    }
    SUBCASE("edge midpoint") {
        const auto r = convex_member<Rational>(make_vector({1, 0, 1}), gbit);
        REQUIRE(r.feasible());
        CHECK(r.witness == make_vector({Rational(1, 2), Rational(1, 2), 0, 0}));
    }
    SUBCASE("outside the hull") {
        const Vector p = make_vector({1, 2, 0});
        const auto r = convex_member(p, gbit);
        REQUIRE_FALSE(r.feasible());
        CHECK(verify_certificate(hull_system(p, gbit), r.certificate));
    }
}

TEST_CASE("random systems agree with Fourier-Motzkin and carry checkable payloads") {
    std::mt19937_64 rng(20240611);
    int feasible = 0, infeasible = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Eigen::Index vars = 1 + static_cast<Eigen::Index>(rng() % 3);
        const auto s = random_system(rng, vars);
        const auto r = lp_feasible(s);
        CHECK(r.feasible() == fourier_motzkin_feasible(as_inequalities(s), vars));
        if (r.feasible()) {
            ++feasible;
            CHECK(satisfies(s, r.witness));
        } else {
            ++infeasible;
            CHECK(verify_certificate(s, r.certificate));
        }
        // Same input, same answer.
        const auto again = lp_feasible(s);
        CHECK(again.status == r.status);
        if (r.feasible()) CHECK(again.witness == r.witness);
    }
    CHECK(feasible > 30);
    CHECK(infeasible > 30);
}

TEST_CASE("optimum matches the best enumerated vertex on random bounded polytopes") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 60; ++trial) {
        LinearSystem s = random_system(rng, 2);
        s.equalities.clear();
        // Box keeps the region bounded.
        s.add_inequality(make_vector({1, 0}), -2);
        s.add_inequality(make_vector({-1, 0}), -2);
        s.add_inequality(make_vector({0, 1}), -2);
        s.add_inequality(make_vector({0, -1}), -2);
        const Vector c = make_vector({Rational(static_cast<long>(rng() % 5) - 2), Rational(static_cast<long>(rng() % 5) - 2)});
        const auto vertices = vertex_enumerate(s);
        const auto opt = lp_optimize(c, s, Sense::maximize);
        if (vertices.empty()) {
            CHECK(opt.status == OptimumStatus::infeasible);
            continue;
        }
        REQUIRE(opt.status == OptimumStatus::optimal);
        Rational best = c.dot(vertices.front());
        for (const auto& v : vertices) best = std::max(best, Rational(c.dot(v)));
        CHECK(opt.value == best);
        CHECK(satisfies(s, opt.argmax));
    }
}
