#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "orb/critical.hpp"

using namespace orb;
using NC = BasicNovikov<NFElem>;

TEST_CASE("number field arithmetic in Q[w]/(w^4 - 1/3)") {
    auto K = make_root_field(4, Rational(1, 3), "w^4 = 1/3");
    NFElem w = NFElem::gen(K);
    NFElem w2 = w * w;
    CHECK((w2 * w2) == NFElem(Rational(1, 3)));
    CHECK((w * coeff_inv(w)) == NFElem(1));
    // 1/w = 3 w^3
    NFElem winv = coeff_inv(w);
    CHECK(winv.c[3] == 3);
    NFElem a = NFElem(1) + w;
    CHECK((a * coeff_inv(a)) == NFElem(1));
    CHECK(coeff_is_zero(a - a));
    CHECK(coeff_str(w) == "1*w");
    // promotion: rational constants mix in freely
    CHECK((NFElem(Rational(1, 2)) * w + w * NFElem(Rational(1, 2))) == w);
    CHECK_THROWS_AS(coeff_inv(NFElem(0)), NotInvertible);
}

TEST_CASE("reducible moduli are rejected") {
    CHECK_THROWS_AS(make_root_field(2, Rational(4), "w^2 = 4"), HypothesisViolated);
    CHECK_THROWS_AS(make_root_field(3, Rational(8, 27), "w^3 = 8/27"), HypothesisViolated);
    CHECK_THROWS_AS(make_root_field(4, Rational(-4), "w^4 = -4"), HypothesisViolated);
    CHECK_NOTHROW(make_root_field(6, Rational(1, 5), "w^6 = 1/5"));
    CHECK_NOTHROW(make_root_field(8, Rational(1, 7), "w^8 = 1/7"));
}

TEST_CASE("novikov series over a number field") {
    auto K = make_root_field(4, Rational(1, 3), "w^4 = 1/3");
    NFElem w = NFElem::gen(K);
    NC z = NC::term(w, Rational(5, 2));
    NC u = NC::constant(NFElem(2)) - z.shifted(-8);
    NC inv = nov_invert(u, 100);
    CHECK(((u * inv) - NC::one()).truncated(80).terms.empty());
}

TEST_CASE("gradient residual") {
    std::array<Novikov, 3> origin{};
    CHECK(!gradient_residual(w_lead(OrbifoldData(3, 3, 3)), origin).has_value());
    auto res = gradient_residual(w_22r(3, 1, {1}, 100), origin);
    REQUIRE(res.has_value());
    CHECK(*res == 1);
    std::array<Novikov, 3> bad{Novikov::t_power(-1), Novikov::zero(), Novikov::zero()};
    CHECK_THROWS_AS(gradient_residual(w_lead(OrbifoldData(3, 3, 3)), bad),
                    DivergentSubstitution);
}

TEST_CASE("hyperplane branch r=3, lambda=1") {
    auto pts = solve_22r_hyperplane(3, 1, {}, 200);
    REQUIRE(pts.size() == 2);
    for (auto& p : pts) {
        CHECK(p.branch == CriticalBranch::HyperplaneZ);
        CHECK(p.coords[2] == Novikov::term(Rational(-2), 8));
        // x + y = -T^lambda/2 exactly
        Novikov s = p.coords[0] + p.coords[1];
        REQUIRE(s.terms.size() == 1);
        CHECK(s.coeff_at(1) == Rational(-1, 2));
        REQUIRE(p.residual_valuation.has_value());
        CHECK(*p.residual_valuation >= Rational(200 - 24));
    }
    CHECK(pts[0].coordinate_valuations[0] == Rational(1));
    CHECK(pts[0].coordinate_valuations[1] == Rational(23));  // 8r - lambda
    CHECK(pts[1].coordinate_valuations[0] == Rational(23));
    CHECK(pts[1].coordinate_valuations[1] == Rational(1));
    // xy = T^8 g(-2T^8) has valuation 8r, leading coefficient 13
    Novikov xy = pts[0].coords[0] * pts[0].coords[1];
    CHECK(xy.val() == 24);
    CHECK(xy.leading_coeff() == 13);
}

TEST_CASE("diagonal branch valuations") {
    struct Case {
        long r;
        Rational lambda;
    } cases[] = {{3, 1}, {5, 2}, {7, Rational(5, 2)}};
    for (auto& cs : cases) {
        auto pts = solve_22r_diagonal(cs.r, cs.lambda, {}, 200);
        REQUIRE(pts.size() == 1);
        auto& p = pts[0];
        Rational mu = (2 * cs.lambda + 8) / (cs.r + 1);
        CHECK(p.branch == CriticalBranch::Diagonal);
        CHECK(p.multiplicity == cs.r + 1);
        CHECK(p.coordinate_valuations[2] == mu);
        CHECK(p.coordinate_valuations[0] == cs.lambda + 8 - mu);
        CHECK(p.coordinate_valuations[1] == cs.lambda + 8 - mu);
        REQUIRE(p.residual_valuation.has_value());
        CHECK(*p.residual_valuation >= Rational(200 - 24));
        // leading coefficient of z is the field generator
        CHECK(p.coords[2].leading_coeff() == NFElem::gen(p.coords[2].leading_coeff().F));
    }
}

TEST_CASE("newton refinement of truncated hyperplane seeds") {
    auto pts = solve_22r_hyperplane(3, 1, {}, 260);
    std::array<Novikov, 3> seed;
    for (int v = 0; v < 2; ++v) {
        Novikov s;  // exact truncation of the root below T^40
        for (auto& [e, c] : pts[0].coords[v].terms)
            if (e < 40) s.terms.emplace_back(e, c);
        seed[v] = s;
    }
    seed[2] = Novikov::term(Rational(-2), 8);
    auto W = w_22r(3, 1, {}, 260);
    auto refined = newton_refine(W, seed, 200, 260);
    REQUIRE(refined.residual_valuation.has_value());
    CHECK(*refined.residual_valuation >= 200);
    CHECK(refined.coords[0].agrees_with(pts[0].coords[0], 180));
}

TEST_CASE("newton refinement fixed point and failure modes") {
    auto W = w_lead(OrbifoldData(2, 2, 2));
    std::array<Novikov, 3> origin{};
    auto p = newton_refine(W, origin, 100);
    CHECK(!p.residual_valuation.has_value());  // exact critical point
    for (auto& c : p.coords) CHECK(c.is_exact_zero());

    // singular Hessian at the origin of w_22r(3,1): f''(0) = 0
    auto W2 = w_22r(3, 1, {}, 100);
    CHECK_THROWS_AS(newton_refine(W2, origin, 50), HenselConditionFailed);

    // seed with x = y = 0 but z on the diagonal-branch polygon: the residual
    // T^lambda does not clear twice the inverse-Hessian loss
    auto K = make_root_field(4, Rational(1, 3), "w^4 = 1/3");
    std::array<NC, 3> gap{NC::zero(), NC::zero(), NC::term(NFElem::gen(K), Rational(5, 2))};
    CHECK_THROWS_AS(newton_refine(W2, gap, 50), HenselConditionFailed);
}

TEST_CASE("escape report") {
    auto rep = escape_check(3, 1, {}, 200);
    CHECK(rep.pass);
    CHECK(rep.count == 6);
    CHECK(rep.expected == 6);
    CHECK(rep.all_escape);
    CHECK(rep.xy_val_hyperplane == 24);  // 8r

    auto rep5 = escape_check(5, 2, {}, 200);
    CHECK(rep5.pass);
    CHECK(rep5.count == 8);
    CHECK(rep5.diagonal[0].coordinate_valuations[2] == Rational(2));

    // lambda just under the bound min(3, (3r-5)/2) = 2 for r = 3
    auto repb = escape_check(3, Rational(19, 10), {}, 150);
    CHECK(repb.pass);
}

TEST_CASE("custom bulk coefficients") {
    auto rep = escape_check(5, 2, {Rational(2), Rational(-1, 3)}, 150);
    CHECK(rep.pass);
    CHECK(rep.count == 8);
}
