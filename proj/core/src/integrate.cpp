#include "msgt/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "msgt/errors.hpp"

namespace msgt {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// 5th-order solution weights equal kA[6]; error weights are b5 - b4.
constexpr double kE[7] = {
    35.0 / 384 - 5179.0 / 57600, 0.0,          500.0 / 1113 - 7571.0 / 16695,
    125.0 / 192 - 393.0 / 640,   -2187.0 / 6784 + 92097.0 / 339200,
    11.0 / 84 - 187.0 / 2100,    -1.0 / 40,
};

std::string format_point(std::span<const double> v) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        out << v[i];
    }
    out << ")";
    return out.str();
}

/// Projects a state onto the domain; violations beyond `slack` are fatal.
void enforce_domain(std::vector<double>& y, const std::vector<StateInterval>& domain,
                    double slack, double t) {
    if (domain.empty()) return;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const StateInterval& iv = domain[i];
        if (y[i] < iv.lo) {
            if (iv.lo - y[i] > slack) {
                throw IntegrationError("state coordinate " + std::to_string(i + 1) +
                                           " left the domain (value " + std::to_string(y[i]) +
                                           " < " + std::to_string(iv.lo) + ")",
                                       t);
            }
            y[i] = iv.lo;
        } else if (y[i] > iv.hi) {
            if (y[i] - iv.hi > slack) {
                throw IntegrationError("state coordinate " + std::to_string(i + 1) +
                                           " left the domain (value " + std::to_string(y[i]) +
                                           " > " + std::to_string(iv.hi) + ")",
                                       t);
            }
            y[i] = iv.hi;
        }
    }
}

}  // namespace

RawTrajectory integrate_field(const OdeField& field, std::span<const double> x0,
                              double t_final, const IntegrateOptions& opts,
                              std::span<const double> breakpoints) {
    if (!(t_final > 0.0)) throw InputError("t_final must be positive");
    if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) {
        throw InputError("tolerances must be positive");
    }
    if (x0.size() != field.dim) throw InputError("initial state has wrong dimension");

    const std::size_t n = field.dim;
    const double max_step = opts.max_step > 0.0 ? opts.max_step : t_final / 100.0;
    const double domain_slack = std::max(opts.abs_tol, 1e-12);

    // Segment boundaries: breakpoints, checkpoints, and t_final, deduplicated.
    std::vector<double> stops;
    for (double b : breakpoints) {
        if (b > 0.0 && b < t_final) stops.push_back(b);
    }
    for (double c : opts.checkpoints) {
        if (c > 0.0 && c < t_final) stops.push_back(c);
    }
    stops.push_back(t_final);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-13; }),
                stops.end());

    RawTrajectory traj;
    std::vector<double> y(x0.begin(), x0.end());
    enforce_domain(y, field.domain, domain_slack, 0.0);
    double t = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(y);

    std::array<std::vector<double>, 7> k;
    for (auto& ki : k) ki.resize(n);
    std::vector<double> y_stage(n), y_new(n);

    std::size_t steps = 0;
    double h = opts.initial_step;

    for (double stop : stops) {
        // Restart at each segment: re-evaluate the step size and stage 0.
        if (h <= 0.0) {
            h = std::min({max_step, (stop - t), t_final / 100.0});
            h = std::max(h, 1e-10);
        }
        while (t < stop - 1e-13 * std::max(1.0, std::abs(stop))) {
            if (++steps > opts.max_steps) {
                throw IntegrationError("step budget exhausted", t);
            }
            h = std::min({h, max_step, stop - t});
            if (h < 1e-14 * std::max(1.0, std::abs(t))) {
                throw IntegrationError("step size underflow (stiffness or blow-up)", t);
            }

            // Overflow in a trial stage is a step rejection, not a failure;
            // persistent rejection ends in the step-size underflow error.
            bool finite = true;
            try {
                field.f(t, y, k[0]);
                for (std::size_t s = 1; s < 6 && finite; ++s) {
                    for (std::size_t i = 0; i < n; ++i) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < s; ++j) acc += kA[s][j] * k[j][i];
                        y_stage[i] = y[i] + h * acc;
                    }
                    field.f(t + kC[s] * h, y_stage, k[s]);
                    for (std::size_t i = 0; i < n; ++i) {
                        if (!std::isfinite(k[s][i])) finite = false;
                    }
                }
                if (finite) {
                    for (std::size_t i = 0; i < n; ++i) {
                        double acc = 0.0;
                        for (std::size_t j = 0; j < 6; ++j) acc += kA[6][j] * k[j][i];
                        y_new[i] = y[i] + h * acc;
                        if (!std::isfinite(y_new[i])) finite = false;
                    }
                }
                if (finite) field.f(t + h, y_new, k[6]);
            } catch (const EvalError&) {
                finite = false;
            } catch (const DomainError&) {
                finite = false;
            }
            if (!finite) {
                h *= 0.25;
                continue;
            }

            double err_sq = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double e = 0.0;
                for (std::size_t j = 0; j < 7; ++j) e += kE[j] * k[j][i];
                e *= h;
                const double scale =
                    opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
                err_sq += (e / scale) * (e / scale);
            }
            const double err = std::sqrt(err_sq / static_cast<double>(n));

            if (err <= 1.0) {
                t += h;
                y = y_new;
                enforce_domain(y, field.domain, domain_slack, t);
                traj.times.push_back(t);
                traj.states.push_back(y);
            }
            const double factor = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
        }
        // Snap to the exact stop time to keep checkpoints bit-stable.
        traj.times.back() = stop;
        t = stop;
    }
    return traj;
}

Trajectory integrate(const SystemDef& sys, std::span<const double> x0,
                     const InputSignal& input, double t_final,
                     const IntegrateOptions& opts) {
    if (x0.size() != sys.dim) throw InputError("initial state has wrong dimension");
    if (!sys.in_domain(x0)) {
        throw InputError("initial state " + format_point(x0) + " outside the state domain");
    }

    OdeField field;
    field.dim = sys.dim;
    field.domain = sys.state_domain;
    field.f = [&sys, &input](double t, std::span<const double> state, std::span<double> deriv) {
        sys.rhs_eval(state, input(t), deriv);
    };

    RawTrajectory raw = integrate_field(field, x0, t_final, opts, input.breakpoints());

    Trajectory traj;
    traj.times = std::move(raw.times);
    traj.states = std::move(raw.states);
    traj.inputs.reserve(traj.times.size());
    traj.outputs.reserve(traj.times.size());
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        traj.inputs.push_back(input(traj.times[i]));
        traj.outputs.push_back(sys.output_eval(traj.states[i]));
    }
    return traj;
}

OmegaLimitResult omega_limit_estimate(const SystemDef& sys, std::span<const double> x0,
                                      double u_const, double t_final, double settle_tol,
                                      const IntegrateOptions& opts) {
    if (!(settle_tol > 0.0)) throw InputError("settle_tol must be positive");
    Trajectory traj = integrate(sys, x0, InputSignal::constant(u_const), t_final, opts);

    OmegaLimitResult result;
    const std::vector<double>& terminal = traj.states.back();

    const double window_start = 0.9 * t_final;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.times[i] < window_start) continue;
        for (std::size_t c = 0; c < sys.dim; ++c) {
            if (std::abs(traj.states[i][c] - terminal[c]) > settle_tol) {
                result.note = "state still moving in the final window";
                return result;
            }
        }
    }

    std::vector<double> deriv(sys.dim);
    sys.rhs_eval(terminal, u_const, deriv);
    double residual = 0.0;
    for (double d : deriv) residual = std::max(residual, std::abs(d));
    if (residual >= settle_tol) {
        result.note = "terminal point is not an equilibrium (|f| = " + std::to_string(residual) + ")";
        return result;
    }

    result.settled = true;
    result.point = terminal;
    result.residual = residual;
    return result;
}

// ---------------------------------------------------------------------------
// Sampled monotonicity check
// ---------------------------------------------------------------------------

namespace {

std::vector<StateInterval> default_state_box(const SystemDef& sys) {
    std::vector<StateInterval> box(sys.dim);
    for (std::size_t i = 0; i < sys.dim; ++i) {
        const StateInterval& dom = sys.state_domain[i];
        box[i].lo = std::max(dom.lo, -2.0);
        box[i].hi = std::min(dom.hi, 6.0);
        if (!(box[i].lo < box[i].hi)) {
            box[i].lo = dom.lo;
            box[i].hi = std::isfinite(dom.hi) ? dom.hi : dom.lo + 4.0;
        }
    }
    return box;
}

}  // namespace

MonotoneReport check_monotone_sampled(const SystemDef& sys, const MonotoneCheckOptions& opts) {
    if (opts.sample_count < 1) throw InputError("sample_count must be >= 1");

    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<StateInterval> box = opts.state_box.empty() ? default_state_box(sys) : opts.state_box;
    if (box.size() != sys.dim) throw InputError("state box has wrong dimension");

    double in_lo = opts.input_box[0];
    double in_hi = opts.input_box[1];
    if (sys.input_transform) {
        in_lo = std::max(in_lo, sys.input_transform->x_min());
        in_hi = std::min(in_hi, sys.input_transform->x_max());
    }
    if (!(in_lo < in_hi)) throw InputError("empty input sampling box");

    IntegrateOptions iopts = opts.integrate;
    iopts.checkpoints.clear();
    std::vector<double> checks;
    for (std::size_t i = 1; i <= opts.checkpoints; ++i) {
        checks.push_back(opts.t_final * static_cast<double>(i) /
                         static_cast<double>(opts.checkpoints));
    }
    iopts.checkpoints = checks;

    MonotoneReport report;
    report.samples = opts.sample_count;

    auto state_at = [](const Trajectory& traj, double tc) -> const std::vector<double>* {
        auto it = std::lower_bound(traj.times.begin(), traj.times.end(), tc - 1e-10);
        if (it == traj.times.end() || std::abs(*it - tc) > 1e-9 * std::max(1.0, tc)) return nullptr;
        return &traj.states[static_cast<std::size_t>(it - traj.times.begin())];
    };

    for (std::size_t s = 0; s < opts.sample_count; ++s) {
        // Ordered state pair p <= q in the state cone.
        std::vector<double> p(sys.dim), q(sys.dim);
        for (std::size_t i = 0; i < sys.dim; ++i) {
            const double span = box[i].hi - box[i].lo;
            p[i] = box[i].lo + span * unit(rng);
            double delta = span / 3.0 * unit(rng);
            double qi = p[i] + sys.state_cone.sign(i) * delta;
            q[i] = std::clamp(qi, box[i].lo, box[i].hi);
            if (sys.state_cone.sign(i) * (q[i] - p[i]) < 0.0) std::swap(p[i], q[i]);
        }

        // Ordered input pair u <= v in the input cone; alternate constant and
        // piecewise-constant drives.
        InputSignal u = InputSignal::constant(0.0), v = u;
        const double in_span = in_hi - in_lo;
        const int cone_sign = sys.input_cone.sign(0);
        if (s % 2 == 0) {
            double base = in_lo + in_span * unit(rng);
            double delta = in_span / 3.0 * unit(rng);
            double other = std::clamp(base + cone_sign * delta, in_lo, in_hi);
            u = InputSignal::constant(base);
            v = InputSignal::constant(other);
        } else {
            std::size_t pieces = 2 + static_cast<std::size_t>(unit(rng) * 2.99);
            std::vector<double> times{0.0};
            for (std::size_t j = 1; j < pieces; ++j) {
                times.push_back(opts.t_final * unit(rng));
            }
            std::sort(times.begin(), times.end());
            times.erase(std::unique(times.begin(), times.end()), times.end());
            std::vector<double> uv, vv;
            for (std::size_t j = 0; j < times.size(); ++j) {
                double base = in_lo + in_span * unit(rng);
                double delta = in_span / 3.0 * unit(rng);
                uv.push_back(base);
                vv.push_back(std::clamp(base + cone_sign * delta, in_lo, in_hi));
            }
            u = InputSignal::piecewise_constant(times, uv);
            v = InputSignal::piecewise_constant(std::move(times), std::move(vv));
        }

        Trajectory tp = integrate(sys, p, u, opts.t_final, iopts);
        Trajectory tq = integrate(sys, q, v, opts.t_final, iopts);

        for (double tc : checks) {
            const std::vector<double>* sp = state_at(tp, tc);
            const std::vector<double>* sq = state_at(tq, tc);
            if (sp == nullptr || sq == nullptr) continue;

            for (std::size_t i = 0; i < sys.dim; ++i) {
                if (sys.state_cone.sign(i) * ((*sq)[i] - (*sp)[i]) < -opts.tolerance) {
                    report.witness = MonotoneWitness{
                        p, q, u.describe() + " / " + v.describe(), tc,
                        "state order violated in coordinate " + std::to_string(i + 1)};
                    return report;
                }
            }
            const double yp = sys.output_eval(*sp);
            const double yq = sys.output_eval(*sq);
            if (sys.output_cone.sign(0) * (yq - yp) < -opts.tolerance) {
                report.witness = MonotoneWitness{p, q, u.describe() + " / " + v.describe(), tc,
                                                 "output order violated"};
                return report;
            }
        }
    }

    report.pass = true;
    return report;
}

MonotoneReport check_monotone_sampled(const SystemDef& sys, std::size_t sample_count,
                                      double t_final, std::uint64_t seed) {
    MonotoneCheckOptions opts;
    opts.sample_count = sample_count;
    opts.t_final = t_final;
    opts.seed = seed;
    return check_monotone_sampled(sys, opts);
}

}  // namespace msgt
