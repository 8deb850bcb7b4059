#include <doctest.h>

#include <cmath>

#include <msgt/errors.hpp>
#include <msgt/integrate.hpp>
#include <msgt/registry.hpp>

#include "oracles.hpp"

using namespace msgt;

namespace {

SystemDef make_scalar(const std::string& rhs, const std::string& name = "scalar") {
    SystemDef sys;
    sys.name = name;
    sys.dim = 1;
    sys.rhs = {Expression::parse(rhs, 1)};
    sys.output = Expression::parse("x1", 1);
    sys.state_domain = {StateInterval{0.0, std::numeric_limits<double>::infinity()}};
    return sys;
}

SystemDef rotation_system() {
    SystemDef sys;
    sys.name = "rotation";
    sys.dim = 2;
    sys.rhs = {Expression::parse("-x2", 2), Expression::parse("x1", 2)};
    sys.output = Expression::parse("x1", 2);
    sys.state_cone = OrderCone::standard(2);
    const double inf = std::numeric_limits<double>::infinity();
    sys.state_domain = {StateInterval{-inf, inf}, StateInterval{-inf, inf}};
    return sys;
}

}  // namespace

TEST_CASE("equilibrium of the linear subsystem holds exactly") {
    const SystemDef sys = require_system("sec5-x");
    const Trajectory traj =
        integrate(sys, std::vector<double>{5.0}, InputSignal::constant(0.0), 10.0, {});
    for (const auto& s : traj.states) {
        CHECK(s[0] == doctest::Approx(5.0).epsilon(1e-9));
    }
}

TEST_CASE("linear relaxation matches the closed form") {
    const SystemDef sys = require_system("sec5-x");
    const Trajectory traj =
        integrate(sys, std::vector<double>{0.0}, InputSignal::constant(1.0), 20.0, {});
    const double expected = 6.0 * (1.0 - std::exp(-20.0));
    CHECK(std::abs(traj.states.back()[0] - expected) < 1e-6);
    CHECK(std::abs(traj.states.back()[0] - 6.0) < 1e-6);
}

TEST_CASE("cubic subsystem settles on the smallest root of P(z) = 4.5") {
    const SystemDef sys = require_system("sec5-z");
    const Trajectory traj =
        integrate(sys, std::vector<double>{0.0}, InputSignal::constant(4.5), 50.0, {});
    const double expected = oracle::p_inverse(4.5).front();  // (3 - sqrt(3))/2
    CHECK(expected == doctest::Approx((3.0 - std::sqrt(3.0)) / 2.0).epsilon(1e-12));
    CHECK(std::abs(traj.states.back()[0] - expected) < 1e-6);
}

TEST_CASE("trajectory outputs are h of the stored states") {
    const SystemDef sys = require_system("sec5-z");
    const Trajectory traj =
        integrate(sys, std::vector<double>{1.0}, InputSignal::constant(4.0), 5.0, {});
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(traj.outputs[k] == doctest::Approx(sys.output_eval(traj.states[k])).epsilon(1e-14));
    }
    CHECK(traj.times.front() == 0.0);
    for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
}

TEST_CASE("checkpoints land exactly and piecewise inputs restart") {
    const SystemDef sys = require_system("sec5-x");
    IntegrateOptions opts;
    opts.checkpoints = {0.3, 0.7};
    const InputSignal u = InputSignal::piecewise_constant({0.0, 1.0}, {-5.0, -4.0});
    const Trajectory traj = integrate(sys, std::vector<double>{0.0}, u, 2.0, opts);

    auto has_time = [&](double t) {
        for (double tt : traj.times) {
            if (tt == t) return true;
        }
        return false;
    };
    CHECK(has_time(0.3));
    CHECK(has_time(0.7));
    CHECK(has_time(1.0));  // breakpoint
    CHECK(traj.times.back() == 2.0);

    // dx = -x on [0,1] from 0 stays 0; then dx = -x + 1 gives 1 - e^{-1}.
    const double expected = 1.0 - std::exp(-1.0);
    CHECK(std::abs(traj.states.back()[0] - expected) < 1e-7);
}

TEST_CASE("integrator order: tightening tolerances reduces the error") {
    const SystemDef sys = make_scalar("-x1", "decay");
    double previous = std::numeric_limits<double>::infinity();
    for (double rel : {1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
        IntegrateOptions opts;
        opts.rel_tol = rel;
        opts.abs_tol = rel * 1e-3;
        const Trajectory traj =
            integrate(sys, std::vector<double>{1.0}, InputSignal::constant(0.0), 1.0, opts);
        const double err = std::abs(traj.states.back()[0] - std::exp(-1.0));
        CHECK(err < 10.0 * rel);
        CHECK(err <= previous * 1.5 + 1e-15);  // slack for step-control noise
        previous = err;
    }
}

TEST_CASE("blow-up reports an integration failure with the last time") {
    SystemDef sys = make_scalar("x1^2", "burst");
    try {
        integrate(sys, std::vector<double>{1.0}, InputSignal::constant(0.0), 2.0, {});
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.last_time() > 0.5);
        CHECK(e.last_time() < 1.5);  // the pole sits at t = 1
    }
}

TEST_CASE("leaving the state domain is an invariance violation") {
    const SystemDef sys = make_scalar("-1 + 0*x1", "drain");
    CHECK_THROWS_AS(
        integrate(sys, std::vector<double>{0.5}, InputSignal::constant(0.0), 2.0, {}),
        IntegrationError);
    const std::vector<double> outside{-1.0};
    CHECK_THROWS_AS(integrate(sys, outside, InputSignal::constant(0.0), 1.0, {}), InputError);
}

TEST_CASE("omega-limit estimates for the cubic subsystem") {
    const SystemDef sys = require_system("sec5-z");

    auto at = [&](double z0, double u) {
        return omega_limit_estimate(sys, std::vector<double>{z0}, u, 50.0, 1e-6);
    };

    const OmegaLimitResult hi = at(3.0, 4.5);
    REQUIRE(hi.settled);
    CHECK(std::abs(hi.point[0] - oracle::p_inverse(4.5).back()) < 1e-6);  // (3+sqrt(3))/2

    const OmegaLimitResult middle = at(1.5, 4.5);
    REQUIRE(middle.settled);
    CHECK(middle.point[0] == doctest::Approx(1.5).epsilon(1e-9));  // starts at the unstable root

    const OmegaLimitResult origin = at(0.0, 0.0);
    REQUIRE(origin.settled);
    CHECK(std::abs(origin.point[0]) < 1e-9);

    // Settled points are equilibria within the tolerance.
    for (const OmegaLimitResult* r : {&hi, &middle, &origin}) {
        CHECK(r->residual < 1e-6);
    }
}

TEST_CASE("divergence is reported as not settled") {
    const SystemDef sys = make_scalar("x1", "grow");
    const OmegaLimitResult res =
        omega_limit_estimate(sys, std::vector<double>{1.0}, 0.0, 20.0, 1e-6);
    CHECK_FALSE(res.settled);
    CHECK_FALSE(res.note.empty());
}

TEST_CASE("monotone subsystems pass the sampled check across seeds") {
    const SystemDef z = require_system("sec5-z");
    const SystemDef x = require_system("sec5-x");
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        CHECK(check_monotone_sampled(z, 24, 8.0, seed).pass);
        CHECK(check_monotone_sampled(x, 24, 8.0, seed).pass);
    }
}

TEST_CASE("rotation fails the monotonicity check with a witness") {
    const SystemDef rot = rotation_system();
    const MonotoneReport report = check_monotone_sampled(rot, 24, 6.0, 1);
    CHECK_FALSE(report.pass);
    REQUIRE(report.witness.has_value());
    CHECK(report.witness->time > 0.0);
    CHECK_FALSE(report.witness->what.empty());
}
