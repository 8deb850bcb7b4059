#include <doctest.h>

#include <cmath>
#include <memory>

#include <msgt/charmap.hpp>
#include <msgt/errors.hpp>
#include <msgt/registry.hpp>

#include "oracles.hpp"

using namespace msgt;

namespace {

CharacteristicMap k2_map() {
    return CharacteristicMap(require_system("sec5-z"), false, Interval{0.0, 50.0});
}

std::shared_ptr<const CharacteristicMap> k2_ptr() {
    return std::make_shared<CharacteristicMap>(require_system("sec5-z"), false,
                                               Interval{0.0, 50.0});
}

std::shared_ptr<const CharacteristicMap> k1_ptr() {
    return std::make_shared<CharacteristicMap>(require_system("sec5p-x"), true,
                                               Interval{0.0, 50.0});
}

}  // namespace

TEST_CASE("equilibria at the fold inputs match the paper values") {
    const SystemDef z = require_system("sec5-z");

    const auto at4 = equilibria_at_input(z, 4.0);
    REQUIRE(at4.size() == 2);
    CHECK(std::abs(at4[0].state[0] - 0.5) < 1e-9);
    CHECK(std::abs(at4[1].state[0] - 2.0) < 1e-9);
    CHECK(at4[0].stability == Stability::attracting);
    CHECK(at4[1].stability == Stability::semi_stable_above);

    const auto at5 = equilibria_at_input(z, 5.0);
    REQUIRE(at5.size() == 2);
    CHECK(std::abs(at5[0].state[0] - 1.0) < 1e-9);
    CHECK(std::abs(at5[1].state[0] - 2.5) < 1e-9);
    CHECK(at5[0].stability == Stability::semi_stable_below);
    CHECK(at5[1].stability == Stability::attracting);

    for (const auto& e : at4) CHECK(e.residual < 1e-10);
    for (const auto& e : at5) CHECK(e.residual < 1e-10);
}

TEST_CASE("triple-valued range with the repelling middle branch") {
    const SystemDef z = require_system("sec5-z");
    const auto roots = equilibria_at_input(z, 4.5);
    const auto expected = oracle::p_inverse(4.5);
    REQUIRE(roots.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(roots[i].state[0] - expected[i]) < 1e-9);
    }
    CHECK(roots[0].stability == Stability::attracting);
    CHECK(roots[1].stability == Stability::repelling);
    CHECK(roots[1].state[0] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(roots[2].stability == Stability::attracting);
}

TEST_CASE("root finder guards") {
    SystemDef planar;
    planar.name = "planar";
    planar.dim = 2;
    planar.rhs = {Expression::parse("-x1", 2), Expression::parse("-x2", 2)};
    planar.output = Expression::parse("x1", 2);
    planar.state_cone = OrderCone::standard(2);
    planar.state_domain = {StateInterval{}, StateInterval{}};
    CHECK_THROWS_AS(equilibria_at_input(planar, 0.0), InputError);

    SystemDef flat;
    flat.name = "flat";
    flat.dim = 1;
    flat.rhs = {Expression::parse("0*x1", 1)};
    flat.output = Expression::parse("x1", 1);
    flat.state_domain = {StateInterval{}};
    CHECK_THROWS_AS(equilibria_at_input(flat, 0.0), Error);  // root continuum
}

TEST_CASE("root completeness: factored reconstruction of the cubic") {
    const SystemDef z = require_system("sec5-z");
    for (double y : {4.0, 4.5, 5.0}) {
        const auto eq = equilibria_at_input(z, y);
        for (int s = 0; s < 10; ++s) {
            const double zz = 0.3 * s;
            double product = 2.0;  // leading coefficient of P
            for (const auto& e : eq) {
                const int multiplicity = (e.stability == Stability::semi_stable_above ||
                                          e.stability == Stability::semi_stable_below)
                                             ? 2
                                             : 1;
                for (int m = 0; m < multiplicity; ++m) product *= zz - e.state[0];
            }
            CHECK(std::abs(product - (oracle::cubic_p(zz) - y)) < 1e-8);
        }
    }
}

TEST_CASE("cardinality profile of the cubic characteristic") {
    const CharacteristicMap k2 = k2_map();
    const CardinalityProfile profile = cardinality_profile(k2, 0.0, 6.0, 601);

    REQUIRE(profile.intervals.size() == 3);
    CHECK(profile.intervals[0].count == 1);
    CHECK(profile.intervals[1].count == 3);
    CHECK(profile.intervals[2].count == 1);
    CHECK(profile.intervals[0].lo == 0.0);
    CHECK(profile.intervals[2].hi == 6.0);

    REQUIRE(profile.folds.size() == 2);
    CHECK(std::abs(profile.folds[0] - 4.0) < 1e-6);
    CHECK(std::abs(profile.folds[1] - 5.0) < 1e-6);
}

TEST_CASE("profile is stable under grid refinement") {
    const CharacteristicMap k2 = k2_map();
    const CardinalityProfile coarse = cardinality_profile(k2, 0.0, 6.0, 301);
    const CardinalityProfile fine = cardinality_profile(k2, 0.0, 6.0, 1201);
    REQUIRE(coarse.intervals.size() == fine.intervals.size());
    for (std::size_t i = 0; i < coarse.intervals.size(); ++i) {
        CHECK(coarse.intervals[i].count == fine.intervals[i].count);
    }
    REQUIRE(coarse.folds.size() == fine.folds.size());
    for (std::size_t i = 0; i < coarse.folds.size(); ++i) {
        CHECK(std::abs(coarse.folds[i] - fine.folds[i]) < 1e-6);
    }
}

TEST_CASE("the saturating gain is single-valued everywhere") {
    const auto k1 = k1_ptr();
    const CardinalityProfile profile = cardinality_profile(*k1, 0.0, 10.0, 201);
    REQUIRE(profile.intervals.size() == 1);
    CHECK(profile.intervals[0].count == 1);
    CHECK(profile.folds.empty());
}

TEST_CASE("graph closedness toward the folds") {
    const CharacteristicMap k2 = k2_map();
    const auto limit_members_4 = k2.values(4.0);
    double v = 0.0;
    for (int j = 1; j <= 20; ++j) v = k2.values(4.0 - std::pow(2.0, -j)).front();
    double best = 1e300;
    for (double m : limit_members_4) best = std::min(best, std::abs(v - m));
    CHECK(best < 1e-5);  // limit of the lower branch lands on 0.5 in k2(4)

    const auto limit_members_5 = k2.values(5.0);
    for (int j = 1; j <= 20; ++j) v = k2.values(5.0 + std::pow(2.0, -j)).front();
    best = 1e300;
    for (double m : limit_members_5) best = std::min(best, std::abs(v - m));
    CHECK(best < 1e-5);  // limit from above lands on 2.5 in k2(5)
}

TEST_CASE("local boundedness: grid sup stable under refinement") {
    const CharacteristicMap k2 = k2_map();
    auto sup_on = [&](int n) {
        double sup = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = 8.0 * i / (n - 1);
            for (double val : k2.values(u)) sup = std::max(sup, std::abs(val));
        }
        return sup;
    };
    const double coarse = sup_on(101);
    const double fine = sup_on(201);
    CHECK(std::isfinite(fine));
    CHECK(std::abs(fine - coarse) < 0.01 * (1.0 + coarse));
}

TEST_CASE("weak non-decreasingness of the characteristics") {
    std::vector<double> grid61;
    for (int i = 0; i < 61; ++i) grid61.push_back(6.0 * i / 60.0);

    const auto plus = OrderCone::standard(1);
    const CharacteristicMap k2 = k2_map();
    CHECK(check_weakly_nondecreasing(k2, grid61, plus, plus).pass);

    std::vector<double> grid01;
    for (int i = 0; i <= 20; ++i) grid01.push_back(i / 20.0);
    CHECK(check_weakly_nondecreasing(*make_zorro(0.0), grid01, plus, plus).pass);

    // Every characteristic of the monotone-passing subsystems qualifies in
    // its declared cone orders.
    const CharacteristicMap kx(require_system("sec5-x"), false, Interval{0.0, 50.0});
    CHECK(check_weakly_nondecreasing(kx, grid61, plus, plus).pass);
    const CharacteristicMap k1(require_system("sec5p-x"), true, Interval{0.0, 50.0});
    CHECK(check_weakly_nondecreasing(k1, grid61, OrderCone::opposite(1), plus).pass);
    // The feedback branch preserves order into the reversed output cone.
    const CharacteristicMap kwo(require_system("sec5-z"), true, Interval{0.0, 50.0});
    CHECK(check_weakly_nondecreasing(kwo, grid61, plus, OrderCone::opposite(1)).pass);

    // F(x) = {-x} is decreasing: the check fails at the first ordered pair.
    const PiecewiseLinearMap negate({{0.0, 0.0}, {1.0, -1.0}}, "negate");
    const PairwiseCheckReport bad =
        check_weakly_nondecreasing(negate, std::vector<double>{0.0, 1.0}, plus, plus);
    CHECK_FALSE(bad.pass);
    CHECK_FALSE(bad.witness.empty());
}

TEST_CASE("anti-monotone characteristic of the feedback branch") {
    const CharacteristicMap kw(require_system("sec5-z"), true, Interval{0.0, 50.0});

    // Hand values through h(z) = 1/(1+z^2): k_w(4) and k_w(5).
    const auto at4 = kw.values(4.0);
    REQUIRE(at4.size() == 2);
    CHECK(at4[0] == doctest::Approx(0.2).epsilon(1e-9));   // z = 2
    CHECK(at4[1] == doctest::Approx(0.8).epsilon(1e-9));   // z = 1/2
    const auto at5 = kw.values(5.0);
    REQUIRE(at5.size() == 2);
    CHECK(at5[0] == doctest::Approx(4.0 / 29.0).epsilon(1e-9));  // z = 5/2
    CHECK(at5[1] == doctest::Approx(0.5).epsilon(1e-9));         // z = 1

    std::vector<double> grid61;
    for (int i = 0; i < 61; ++i) grid61.push_back(8.0 * i / 60.0);
    CHECK(check_antimonotone(kw, grid61).pass);

    const PiecewiseLinearMap identity({{0.0, 0.0}, {1.0, 1.0}}, "identity");
    CHECK_FALSE(check_antimonotone(identity, std::vector<double>{0.0, 1.0}).pass);

    const PiecewiseLinearMap constant({{0.0, 0.7}, {1.0, 0.7}}, "constant");
    CHECK(check_antimonotone(constant, std::vector<double>{0.0, 0.5, 1.0}).pass);
}

TEST_CASE("no-cycles certificates") {
    const OrderCone scalar = OrderCone::standard(1);
    std::vector<std::vector<double>> pair{{0.5}, {2.0}};
    CHECK(check_no_cycles_by_order(pair, scalar) == CycleVerdict::no_cycles_certified);

    const OrderCone plane = OrderCone::standard(2);
    std::vector<std::vector<double>> incomparable{{0.0, 1.0}, {1.0, 0.0}};
    CHECK(check_no_cycles_by_order(incomparable, plane) == CycleVerdict::inconclusive);
    std::vector<std::vector<double>> chain{{0.0, 0.0}, {1.0, 1.0}};
    CHECK(check_no_cycles_by_order(chain, plane) == CycleVerdict::no_cycles_certified);
}

TEST_CASE("characteristic verification on the cubic subsystem") {
    const SystemDef z = require_system("sec5-z");
    const std::vector<double> u_grid{0.0, 2.0, 4.0, 4.5, 5.0, 5.5};
    std::vector<std::vector<double>> x0_grid;
    for (int i = 0; i < 20; ++i) x0_grid.push_back({5.0 * i / 19.0});
    // At u = 4.5 this start sits on the repelling equilibrium: a singleton
    // basin that coverage must still account for.
    x0_grid.push_back({1.5});

    const CharacteristicReport report = verify_characteristic(z, u_grid, x0_grid, {});
    CHECK(report.coverage.pass);
    CHECK(report.lyapunov.pass);
    CHECK(report.isolation.pass);
    CHECK(report.no_cycles.pass);
    CHECK(report.pass);
    CHECK(report.no_cycles.detail == "scalar: no cycles");
}

TEST_CASE("divergent dynamics fail coverage with unsettled witnesses") {
    SystemDef grow;
    grow.name = "grow";
    grow.dim = 1;
    grow.rhs = {Expression::parse("x1", 1)};
    grow.output = Expression::parse("x1", 1);
    grow.state_domain = {StateInterval{}};

    const std::vector<double> u_grid{0.0};
    std::vector<std::vector<double>> x0_grid{{0.5}, {1.0}};
    VerifyCharacteristicOptions opts;
    opts.t_final = 30.0;
    const CharacteristicReport report = verify_characteristic(grow, u_grid, x0_grid, opts);
    CHECK_FALSE(report.coverage.pass);
    CHECK_FALSE(report.coverage.witnesses.empty());
    CHECK_FALSE(report.pass);
}

TEST_CASE("composition of characteristics") {
    const auto loop = compose_maps(k2_ptr(), k1_ptr());

    // k1(2.5) = 149/29 > 5, so the composition is single-valued there.
    const auto at25 = loop->values(2.5);
    REQUIRE(at25.size() == 1);
    const double expected = oracle::bisect(
        [](double zz) { return oracle::cubic_p(zz) - 149.0 / 29.0; }, 1.0, 5.0);
    CHECK(std::abs(at25[0] - expected) < 1e-9);
    CHECK(at25[0] == doctest::Approx(2.5295).epsilon(1e-3));

    // k1(0) = 6 forces the single branch above 5/2.
    const auto at0 = loop->values(0.0);
    REQUIRE(at0.size() == 1);
    const double expected0 =
        oracle::bisect([](double zz) { return oracle::cubic_p(zz) - 6.0; }, 1.0, 5.0);
    CHECK(std::abs(at0[0] - expected0) < 1e-9);

    // Composing singleton identities is the identity.
    auto identity = std::make_shared<ClosedFormMap>(Expression::parse("u", 0),
                                                    Interval{0.0, 10.0}, "id");
    const auto twice = compose_maps(identity, identity);
    CHECK(twice->values(3.25) == std::vector<double>{3.25});

    // Inner values outside the outer domain are named in the error.
    auto narrow = std::make_shared<ClosedFormMap>(Expression::parse("u", 0),
                                                  Interval{0.0, 1.0}, "narrow");
    auto shift = std::make_shared<ClosedFormMap>(Expression::parse("u + 5", 0),
                                                 Interval{0.0, 10.0}, "shift");
    const auto bad = compose_maps(narrow, shift);
    CHECK_THROWS_AS(bad->values(0.5), DomainError);
}
