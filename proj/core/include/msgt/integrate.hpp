#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msgt/system.hpp"

namespace msgt {

struct IntegrateOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    /// Output stride: no accepted step exceeds this duration. 0 picks t_final/100.
    double max_step = 0.0;
    double initial_step = 0.0;  // 0 picks a heuristic
    std::size_t max_steps = 4'000'000;
    /// Times inside (0, t_final) the stepper must land on exactly.
    std::vector<double> checkpoints;
};

/// Generic autonomous-in-structure ODE field; the driving signal, if any, is
/// baked into `f`. Kinks of the drive go into the integrator's restart list.
struct OdeField {
    std::size_t dim = 0;
    std::function<void(double t, std::span<const double> state, std::span<double> deriv)> f;
    std::vector<StateInterval> domain;  // empty = unconstrained
};

struct RawTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
};

/// Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) with step rejection.
/// Restarts at every listed breakpoint, lands exactly on checkpoints and
/// t_final. States leaving the domain by at most abs_tol are projected onto
/// the boundary; larger violations raise IntegrationError, as do step-size
/// underflow and non-finite values.
RawTrajectory integrate_field(const OdeField& field, std::span<const double> x0,
                              double t_final, const IntegrateOptions& opts,
                              std::span<const double> breakpoints = {});

Trajectory integrate(const SystemDef& sys, std::span<const double> x0,
                     const InputSignal& input, double t_final,
                     const IntegrateOptions& opts = {});

struct OmegaLimitResult {
    bool settled = false;
    std::vector<double> point;  // terminal state when settled
    double residual = 0.0;      // |f(point, u)| when settled
    std::string note;
};

/// Integrates under the constant input and inspects the tail: settled means
/// the state over the final 10% of the window stays within settle_tol of the
/// terminal value and |f(terminal, u)| < settle_tol.
OmegaLimitResult omega_limit_estimate(const SystemDef& sys, std::span<const double> x0,
                                      double u_const, double t_final, double settle_tol,
                                      const IntegrateOptions& opts = {});

struct MonotoneCheckOptions {
    std::size_t sample_count = 40;
    double t_final = 8.0;
    std::uint64_t seed = 1;
    /// Sampling box for initial states; empty = state domain clipped to [-2, 6].
    std::vector<StateInterval> state_box;
    std::array<double, 2> input_box{0.0, 6.0};
    double tolerance = 1e-6;  // order-violation slack
    std::size_t checkpoints = 24;
    IntegrateOptions integrate;
};

struct MonotoneWitness {
    std::vector<double> p, q;
    std::string input_pair;
    double time = 0.0;
    std::string what;  // which comparison failed
};

struct MonotoneReport {
    bool pass = false;
    std::size_t samples = 0;
    std::optional<MonotoneWitness> witness;
};

/// Draws ordered state pairs p <= q and ordered input pairs u <= v (constant
/// and piecewise-constant), integrates both, and checks the state order at
/// every shared checkpoint plus the output order under the output cone.
MonotoneReport check_monotone_sampled(const SystemDef& sys, const MonotoneCheckOptions& opts);
MonotoneReport check_monotone_sampled(const SystemDef& sys, std::size_t sample_count,
                                      double t_final, std::uint64_t seed);

}  // namespace msgt
