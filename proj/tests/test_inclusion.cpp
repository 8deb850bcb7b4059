#include <doctest.h>

#include <cmath>

#include <msgt/errors.hpp>
#include <msgt/inclusion.hpp>
#include <msgt/registry.hpp>

#include "oracles.hpp"

using namespace msgt;

namespace {

MultiMapPtr sec5_loop_map() {
    return require_multimap("sec5-positive-form");  // k2 o k1
}

}  // namespace

TEST_CASE("zorro construction") {
    const auto zorro = make_zorro(0.0);
    REQUIRE(zorro->vertices().size() == 4);
    CHECK(zorro->vertices()[1] == std::array<double, 2>{0.5, 0.25});
    CHECK(zorro->vertices()[2] == std::array<double, 2>{0.25, 0.5});

    const auto perturbed = make_zorro(1.5);
    CHECK(perturbed->vertices()[2][0] == doctest::Approx(0.4).epsilon(1e-15));
    CHECK(perturbed->vertices()[2][1] == 0.5);

    CHECK_THROWS_AS(make_zorro(-0.1), InputError);
}

TEST_CASE("middle-branch slope is -(1+eps)") {
    for (double eps : {0.0, 0.25, 1.0, 1.5, 3.0}) {
        const auto map = make_zorro(eps);
        CHECK(map->segment_slope(1) == doctest::Approx(-(1.0 + eps)).epsilon(1e-12));
    }
}

TEST_CASE("zorro evaluation on the fold region") {
    const auto zorro = make_zorro(0.0);

    const auto at_03 = zorro->values(0.3);
    REQUIRE(at_03.size() == 3);
    CHECK(at_03[0] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(at_03[1] == doctest::Approx(0.45).epsilon(1e-12));
    CHECK(at_03[2] == doctest::Approx(8.0 / 15.0).epsilon(1e-12));

    CHECK(zorro->values(0.0) == std::vector<double>{0.0});

    // The period-2 membership from the worked example: 1/4 in F(1/2). The
    // vertical line at 1/2 also crosses the upper segment at 2/3.
    const auto at_half = zorro->values(0.5);
    REQUIRE(at_half.size() == 2);
    CHECK(at_half[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(at_half[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    CHECK_THROWS_AS(zorro->values(1.5), DomainError);
}

TEST_CASE("successors are sorted and deduplicated") {
    const auto zorro = make_zorro(0.0);
    const auto succ = successors(*zorro, 0.375, 1e-9);
    REQUIRE(succ.size() == 3);
    CHECK(succ[0] == doctest::Approx(0.1875));
    CHECK(succ[1] == doctest::Approx(0.375));  // middle fixed point 3/4 - x
    CHECK(succ[2] == doctest::Approx(0.5833333333333).epsilon(1e-9));

    const auto single = successors(*sec5_loop_map(), 2.5, 1e-9);
    REQUIRE(single.size() == 1);
    CHECK(single[0] == doctest::Approx(2.5295).epsilon(1e-3));
}

TEST_CASE("period-2 orbit from the fold region") {
    const auto zorro = make_zorro(0.0);
    const PathSet set = iterate_paths(*zorro, 0.3, 40, 10'000);
    CHECK_FALSE(set.truncated);

    bool found_period2 = false;
    for (const InclusionPath& p : set.paths) {
        if (p.kind == PathKind::periodic && p.period == 2) {
            REQUIRE(p.orbit.size() == 2);
            const double lo = std::min(p.orbit[0], p.orbit[1]);
            const double hi = std::max(p.orbit[0], p.orbit[1]);
            CHECK(lo == doctest::Approx(0.3).epsilon(1e-12));
            CHECK(hi == doctest::Approx(0.45).epsilon(1e-12));  // 3/4 - 0.3
            found_period2 = true;
        }
    }
    CHECK(found_period2);
}

TEST_CASE("perturbed zorro converges along every path") {
    const auto map = make_zorro(1.5);
    const PathSet set = iterate_paths(*map, 0.45, 200, 10'000);
    CHECK_FALSE(set.truncated);
    REQUIRE_FALSE(set.paths.empty());

    bool found_middle_then_lower = false;
    for (const InclusionPath& p : set.paths) {
        CHECK(p.kind == PathKind::converged);
        CHECK((std::abs(p.limit) < 1e-6 || std::abs(p.limit - 3.0 / 7.0) < 1e-6 ||
               std::abs(p.limit - 1.0) < 1e-6));
        if (p.values.size() >= 3 && std::abs(p.values[1] - 0.375) < 1e-12 &&
            std::abs(p.values[2] - 0.1875) < 1e-12) {
            // middle branch maps 0.45 to 0.375, then the lower branch halves to 0
            CHECK(std::abs(p.limit) < 1e-6);
            found_middle_then_lower = true;
        }
    }
    CHECK(found_middle_then_lower);
}

TEST_CASE("loop map iterates to the unique fixed point") {
    const auto loop = sec5_loop_map();
    const PathSet set = iterate_paths(*loop, 5.0, 50, 10'000);
    REQUIRE(set.paths.size() == 1);  // single-valued after the first step
    CHECK(set.paths[0].kind == PathKind::converged);
    CHECK(std::abs(set.paths[0].limit - oracle::loop_fixed_point()) < 1e-6);
}

TEST_CASE("replay invariant on stored paths") {
    const auto zorro = make_zorro(0.0);
    const PathSet set = iterate_paths(*zorro, 0.3, 40, 10'000);
    for (const InclusionPath& p : set.paths) {
        CHECK(replay_residual(*zorro, p) < 1e-8);
    }
    const auto loop = sec5_loop_map();
    const PathSet loop_set = iterate_paths(*loop, 5.0, 50, 10'000);
    for (const InclusionPath& p : loop_set.paths) {
        CHECK(replay_residual(*loop, p) < 1e-8);
    }
}

TEST_CASE("contraction shrinks successive increments") {
    const auto loop = sec5_loop_map();
    const PathSet set = iterate_paths(*loop, 5.0, 50, 10'000);
    const auto& v = set.paths[0].values;
    const double rate_bound = 160.0 / 7569.0 + 1e-3;
    for (std::size_t k = 2; k < v.size(); ++k) {
        const double prev = std::abs(v[k - 1] - v[k - 2]);
        const double cur = std::abs(v[k] - v[k - 1]);
        if (prev < 1e-11) break;  // at the arithmetic noise floor
        CHECK(cur <= rate_bound * prev + 1e-12);
    }
}

TEST_CASE("fixed points of the zorro family") {
    const auto zorro = make_zorro(0.0);
    const auto fp = find_fixed_points(*zorro, 0.0, 1.0, 1024, 1e-9);
    REQUIRE(fp.size() == 3);
    CHECK(std::abs(fp[0] - 0.0) < 1e-9);
    CHECK(std::abs(fp[1] - 0.375) < 1e-9);  // 3/4 - x = x
    CHECK(std::abs(fp[2] - 1.0) < 1e-9);

    const auto perturbed = make_zorro(1.5);
    const auto fp15 = find_fixed_points(*perturbed, 0.0, 1.0, 1024, 1e-9);
    REQUIRE(fp15.size() == 3);
    CHECK(std::abs(fp15[0] - 0.0) < 1e-9);
    CHECK(std::abs(fp15[1] - 3.0 / 7.0) < 1e-9);  // (3+2e)/(4(2+e)) at e = 3/2
    CHECK(std::abs(fp15[2] - 1.0) < 1e-9);
}

TEST_CASE("fixed points are stable under grid refinement") {
    const auto zorro = make_zorro(0.0);
    const auto coarse = find_fixed_points(*zorro, 0.0, 1.0, 512, 1e-9);
    const auto fine = find_fixed_points(*zorro, 0.0, 1.0, 2048, 1e-9);
    REQUIRE(coarse.size() == fine.size());
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        CHECK(std::abs(coarse[i] - fine[i]) < 1e-9);
    }
}

TEST_CASE("fixed point of the contraction loop map") {
    const auto loop = sec5_loop_map();
    const auto fp = find_fixed_points(*loop, 2.5, 4.0, 512, 1e-9);
    REQUIRE(fp.size() == 1);
    CHECK(std::abs(fp[0] - oracle::loop_fixed_point()) < 1e-8);

    // Membership residual straight from the defining equation.
    CHECK(std::abs(oracle::cubic_p(fp[0]) - oracle::gain_k1(fp[0])) < 1e-9);
}

TEST_CASE("grid classification verdicts") {
    std::vector<double> starts;
    for (int i = 0; i <= 10; ++i) starts.push_back(i / 10.0);

    const auto zorro = make_zorro(0.0);
    const GridClassification cls0 = classify_grid(*zorro, starts, 200, 1e-9);
    CHECK(cls0.verdict == GridVerdict::periodic_found);
    for (const auto& s : cls0.starts) {
        const bool inside_fold = s.start >= 0.25 && s.start <= 0.5;
        CHECK((s.periodic > 0) == inside_fold);
    }

    const auto perturbed = make_zorro(1.5);
    const GridClassification cls15 = classify_grid(*perturbed, starts, 200, 1e-9);
    CHECK(cls15.verdict == GridVerdict::all_converge);

    std::vector<double> loop_starts;
    for (int i = 0; i < 9; ++i) loop_starts.push_back(8.0 * i / 8.0);
    const GridClassification clsloop = classify_grid(*sec5_loop_map(), loop_starts, 60, 1e-9);
    CHECK(clsloop.verdict == GridVerdict::all_converge);
    for (const auto& s : clsloop.starts) {
        for (const auto& p : s.paths) {
            CHECK(std::abs(p.limit - oracle::loop_fixed_point()) < 1e-6);
        }
    }
}

TEST_CASE("escape radius marks divergent selections") {
    const PiecewiseLinearMap doubling({{0.0, 1.0}, {1e9, 2e9 + 1.0}}, "affine-doubling");
    IterateOptions opts;
    opts.escape_radius = 1e6;
    const PathSet set = iterate_paths(doubling, 1.0, 100, 100, opts);
    REQUIRE(set.paths.size() == 1);
    CHECK(set.paths[0].escaped);
    CHECK(set.paths[0].kind == PathKind::undetermined);

    const GridClassification cls = classify_grid(doubling, std::vector<double>{1.0}, 100, 1e-9);
    CHECK(cls.verdict == GridVerdict::divergent_found);
}

TEST_CASE("domain escape flags the path") {
    const PiecewiseLinearMap shift({{0.0, 0.5}, {1.0, 1.5}}, "shift");
    const PathSet set = iterate_paths(shift, 0.4, 20, 100);
    REQUIRE(set.paths.size() == 1);
    CHECK(set.paths[0].escaped);
    CHECK(set.paths[0].note.find("domain") != std::string::npos);
}

TEST_CASE("branch cap truncates enumeration") {
    const Interconnection me = require_interconnection("multiequil");
    const auto loop = compose_maps(characteristic_kw(me), characteristic_ky(me));
    const PathSet capped = iterate_paths(*loop, 1.0, 40, 50);
    CHECK(capped.truncated);
    CHECK(capped.paths.size() <= 50);
}

TEST_CASE("period minimality") {
    // The alternating path must classify with period 2, not 4 or 8.
    const auto zorro = make_zorro(0.0);
    const PathSet set = iterate_paths(*zorro, 0.3, 40, 10'000);
    for (const auto& p : set.paths) {
        if (p.kind == PathKind::periodic) CHECK(p.period == 2);
    }
}

TEST_CASE("argument validation") {
    const auto zorro = make_zorro(0.0);
    CHECK_THROWS_AS(iterate_paths(*zorro, 0.3, 0, 10), InputError);
    CHECK_THROWS_AS(iterate_paths(*zorro, 0.3, 10, 0), InputError);
    CHECK_THROWS_AS(iterate_paths(*zorro, 2.0, 10, 10), DomainError);
    CHECK_THROWS_AS(find_fixed_points(*zorro, 0.0, 2.0, 64, 1e-9), InputError);
    CHECK_THROWS_AS(find_fixed_points(*zorro, 0.5, 0.5, 64, 1e-9), InputError);
    CHECK_THROWS_AS(classify_grid(*zorro, std::vector<double>{}, 10, 1e-9), InputError);
}
