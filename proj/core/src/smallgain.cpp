#include "msgt/smallgain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msgt/errors.hpp"
#include "msgt/parallel.hpp"

namespace msgt {

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

Interval to_interval(const std::array<double, 2>& r) { return Interval{r[0], r[1]}; }

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        out.push_back(0.5 * (lo + hi));
        return out;
    }
    for (int i = 0; i < n; ++i) {
        out.push_back(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Interconnection
// ---------------------------------------------------------------------------

void Interconnection::validate() const {
    sys_x.validate();
    sys_z.validate();
    if (sys_x.input_cone.dimension() != 1 || sys_z.output_cone.dimension() != 1) {
        throw InputError("interconnection channels must be scalar");
    }
    if (!(x_box[0] < x_box[1]) || !(z_box[0] < z_box[1])) {
        throw InputError("interconnection sweep boxes must be non-empty");
    }
    if (!(w_range[0] < w_range[1]) || !(y_range[0] < y_range[1])) {
        throw InputError("interconnection channel ranges must be non-empty");
    }
}

bool Interconnection::negative_feedback_oriented(std::string* why) const {
    const int x_out = sys_x.output_cone.sign(0);
    const int z_in = sys_z.input_cone.sign(0);
    const int x_in = sys_x.input_cone.sign(0);
    const int z_out = sys_z.output_cone.sign(0);
    if (x_out != +1 || z_in != +1) {
        if (why) *why = "the y-channel must carry the standard order on both ends";
        return false;
    }
    if (x_in * z_out != -1) {
        if (why) {
            *why = "the w-channel must carry opposite orders on its two ends "
                   "(got x input '" + sys_x.input_cone.to_string() + "', z output '" +
                   sys_z.output_cone.to_string() + "')";
        }
        return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Characteristics and the closed loop
// ---------------------------------------------------------------------------

MultiMapPtr characteristic_kx(const Interconnection& ic, CharacteristicOptions opts) {
    return std::make_shared<CharacteristicMap>(ic.sys_x, false, to_interval(ic.w_range), opts);
}

MultiMapPtr characteristic_ky(const Interconnection& ic, CharacteristicOptions opts) {
    return std::make_shared<CharacteristicMap>(ic.sys_x, true, to_interval(ic.w_range), opts);
}

MultiMapPtr characteristic_kz(const Interconnection& ic, CharacteristicOptions opts) {
    return std::make_shared<CharacteristicMap>(ic.sys_z, false, to_interval(ic.y_range), opts);
}

MultiMapPtr characteristic_kw(const Interconnection& ic, CharacteristicOptions opts) {
    return std::make_shared<CharacteristicMap>(ic.sys_z, true, to_interval(ic.y_range), opts);
}

OdeField loop_field(const Interconnection& ic) {
    const std::size_t nx = ic.sys_x.dim;
    const std::size_t nz = ic.sys_z.dim;
    OdeField field;
    field.dim = nx + nz;
    field.domain = ic.sys_x.state_domain;
    field.domain.insert(field.domain.end(), ic.sys_z.state_domain.begin(),
                        ic.sys_z.state_domain.end());
    field.f = [&ic, nx, nz](double, std::span<const double> state, std::span<double> deriv) {
        const std::span<const double> x = state.subspan(0, nx);
        const std::span<const double> z = state.subspan(nx, nz);
        const double y = ic.sys_x.output_eval(x);
        const double w = ic.sys_z.output_eval(z);
        ic.sys_x.rhs_eval(x, w, deriv.subspan(0, nx));
        ic.sys_z.rhs_eval(z, y, deriv.subspan(nx, nz));
    };
    return field;
}

LoopTrajectory integrate_loop(const Interconnection& ic, std::span<const double> start,
                              double t_final, const IntegrateOptions& opts) {
    if (start.size() != ic.dim()) throw InputError("closed-loop start has wrong dimension");
    const OdeField field = loop_field(ic);
    RawTrajectory raw = integrate_field(field, start, t_final, opts);

    LoopTrajectory traj;
    traj.times = std::move(raw.times);
    traj.states = std::move(raw.states);
    const std::size_t nx = ic.sys_x.dim;
    traj.y.reserve(traj.times.size());
    traj.w.reserve(traj.times.size());
    for (const auto& s : traj.states) {
        const std::span<const double> sx(s.data(), nx);
        const std::span<const double> sz(s.data() + nx, ic.sys_z.dim);
        traj.y.push_back(ic.sys_x.output_eval(sx));
        traj.w.push_back(ic.sys_z.output_eval(sz));
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Hypothesis verification
// ---------------------------------------------------------------------------

namespace {

MonotoneConditionReport run_monotone_condition(const SystemDef& sys, bool orientation_ok,
                                               std::string orientation_note,
                                               const std::array<double, 2>& state_box,
                                               const std::array<double, 2>& input_box,
                                               const VerificationBudget& budget) {
    MonotoneConditionReport report;
    report.orientation_ok = orientation_ok;
    report.orientation_note = std::move(orientation_note);

    MonotoneCheckOptions opts;
    opts.sample_count = budget.monotone_samples;
    opts.t_final = budget.monotone_t_final;
    opts.seed = budget.seed;
    opts.integrate = budget.integrate;
    opts.state_box.assign(sys.dim, StateInterval{state_box[0], state_box[1]});
    for (std::size_t i = 0; i < sys.dim; ++i) {
        opts.state_box[i].lo = std::max(opts.state_box[i].lo, sys.state_domain[i].lo);
        opts.state_box[i].hi = std::min(opts.state_box[i].hi, sys.state_domain[i].hi);
    }
    opts.input_box = input_box;
    report.monotone = check_monotone_sampled(sys, opts);
    report.pass = orientation_ok && report.monotone.pass;
    return report;
}

/// Image-convergence test for one enumerated w-path: the k_y-images must be
/// eventually constant. k_y is singleton-valued here (condition 3).
bool image_sequence_converges(const MultiMap& ky, const InclusionPath& path, double tol,
                              std::string* witness) {
    if (path.escaped) {
        if (witness) *witness = "w-path escaped: " + path.note;
        return false;
    }
    std::vector<double> images;
    images.reserve(path.values.size());
    for (double w : path.values) {
        const std::vector<double> vals = ky.values(w);
        if (vals.size() != 1) {
            if (witness) *witness = "k_y not singleton-valued at w=" + fmt(w);
            return false;
        }
        images.push_back(vals[0]);
    }
    if (images.size() < 2) return true;

    const double last = images.back();
    switch (path.kind) {
        case PathKind::converged:
            return std::abs(images[images.size() - 1] - images[images.size() - 2]) <= 10.0 * tol;
        case PathKind::periodic: {
            // Images over one full period must agree, otherwise the image
            // sequence oscillates forever.
            for (int i = 0; i < path.period; ++i) {
                const double v = images[images.size() - 1 - static_cast<std::size_t>(i)];
                if (std::abs(v - last) > tol) {
                    if (witness) {
                        *witness = "periodic w-path has non-constant k_y-images (spread " +
                                   fmt(std::abs(v - last)) + ")";
                    }
                    return false;
                }
            }
            return true;
        }
        case PathKind::undetermined: {
            // The tail after a short transient must sit on the final image.
            const std::size_t k0 = std::min<std::size_t>(4, images.size() - 1);
            for (std::size_t j = k0; j < images.size(); ++j) {
                if (std::abs(images[j] - last) > tol) {
                    if (witness) {
                        *witness = "undetermined w-path has unsettled k_y-images at step " +
                                   std::to_string(j);
                    }
                    return false;
                }
            }
            return true;
        }
    }
    return false;
}

}  // namespace

VerificationReport verify_hypotheses(const Interconnection& ic, const VerificationBudget& budget) {
    ic.validate();
    if (ic.sys_x.dim != 1 || ic.sys_z.dim != 1) {
        throw InputError("verify_hypotheses supports scalar subsystems");
    }

    VerificationReport report;
    report.budgets = budget;

    // Conditions 1-2: monotonicity in the declared cones plus the
    // negative-feedback orientation split across the two channels.
    const bool y_channel_ok =
        ic.sys_x.output_cone.sign(0) == +1 && ic.sys_z.input_cone.sign(0) == +1;
    const bool w_channel_ok = ic.sys_x.input_cone.sign(0) * ic.sys_z.output_cone.sign(0) == -1;

    report.condition1 = run_monotone_condition(
        ic.sys_x, y_channel_ok,
        y_channel_ok ? "" : "the y-channel must carry the standard order on both ends",
        ic.x_box, ic.w_range, budget);
    report.condition2 = run_monotone_condition(
        ic.sys_z, w_channel_ok,
        w_channel_ok ? "" : "the w-channel must carry opposite orders on its two ends",
        ic.z_box, ic.y_range, budget);

    // Condition 3: k_x singleton-valued, k_z locally bounded.
    MultiMapPtr kx = characteristic_kx(ic);
    MultiMapPtr ky = characteristic_ky(ic);
    MultiMapPtr kz = characteristic_kz(ic);
    MultiMapPtr kw = characteristic_kw(ic);
    {
        CharConditionReport c3;
        c3.kx_singleton = true;
        for (double w : linspace(ic.w_range[0], ic.w_range[1], budget.char_grid)) {
            const std::size_t n = kx->values(w).size();
            if (n != 1) {
                c3.kx_singleton = false;
                c3.kx_witness = "k_x has " + std::to_string(n) + " values at w=" + fmt(w);
                break;
            }
        }
        auto grid_sup = [&](int n) {
            double sup = 0.0;
            for (double y : linspace(ic.y_range[0], ic.y_range[1], n)) {
                for (double v : kz->values(y)) sup = std::max(sup, std::abs(v));
            }
            return sup;
        };
        c3.kz_sup_coarse = grid_sup(budget.char_grid);
        c3.kz_sup_fine = grid_sup(2 * budget.char_grid + 1);
        c3.kz_locally_bounded =
            std::isfinite(c3.kz_sup_fine) &&
            std::abs(c3.kz_sup_fine - c3.kz_sup_coarse) <= 0.01 * (1.0 + c3.kz_sup_coarse);
        c3.pass = c3.kx_singleton && c3.kz_locally_bounded;
        report.condition3 = c3;
    }

    // Condition 4a: closed-loop boundedness sweep.
    {
        BoundednessReport bounded;
        bounded.pass = true;
        const auto xs = linspace(ic.x_box[0], ic.x_box[1], budget.loop_grid_w);
        const auto zs = linspace(ic.z_box[0], ic.z_box[1], budget.loop_grid_h);
        std::vector<std::vector<double>> starts;
        for (double x0 : xs) {
            for (double z0 : zs) starts.push_back({x0, z0});
        }
        std::vector<double> sups(starts.size(), 0.0);
        std::vector<std::string> notes(starts.size());
        parallel_for(starts.size(), [&](std::size_t i) {
            try {
                LoopTrajectory traj = integrate_loop(ic, starts[i], budget.t_final, budget.integrate);
                double sup = 0.0;
                for (const auto& s : traj.states) {
                    for (double c : s) sup = std::max(sup, std::abs(c));
                }
                sups[i] = sup;
            } catch (const Error& e) {
                notes[i] = e.what();
                sups[i] = std::numeric_limits<double>::infinity();
            }
        });
        for (std::size_t i = 0; i < starts.size(); ++i) {
            bounded.sup_norm = std::max(bounded.sup_norm, sups[i]);
            if (sups[i] > budget.escape_radius && bounded.witness.empty()) {
                bounded.pass = false;
                bounded.witness = "trajectory from (" + fmt(starts[i][0]) + ", " + fmt(starts[i][1]) +
                                  ") " + (notes[i].empty() ? "exceeded the escape radius" : notes[i]);
            }
        }
        report.condition4.bounded = bounded;
    }

    // Condition 4b: the discrete inclusion, via route 4 and route 4'.
    {
        InclusionRouteReport inc;
        MultiMapPtr v_loop = compose_maps(ky, kw);  // v+ in (k_y o k_w)(v)
        MultiMapPtr w_loop = compose_maps(kw, ky);  // w+ in (k_w o k_y)(w)

        IterateOptions iopts;
        iopts.tol = budget.conv_tol;
        iopts.escape_radius = budget.escape_radius;

        const auto v_starts = linspace(ic.y_range[0], ic.y_range[1], budget.inclusion_starts);
        const auto w_starts = linspace(ic.w_range[0], ic.w_range[1], budget.inclusion_starts);

        GridClassification v_cls = classify_grid(*v_loop, v_starts, budget.depth, budget.conv_tol,
                                                 budget.branch_cap, iopts);
        GridClassification w_cls = classify_grid(*w_loop, w_starts, budget.depth, budget.conv_tol,
                                                 budget.branch_cap, iopts);
        inc.v_verdict = v_cls.verdict;
        inc.w_verdict = w_cls.verdict;

        inc.images_converge = true;
        CachedMap ky_cached(ky);
        for (const auto& start : w_cls.starts) {
            for (const InclusionPath& path : start.paths) {
                std::string witness;
                if (!image_sequence_converges(ky_cached, path, budget.conv_tol, &witness)) {
                    inc.images_converge = false;
                    if (inc.witness.empty()) {
                        inc.witness = "w0=" + fmt(start.start) + ": " + witness;
                    }
                    break;
                }
            }
            if (!inc.images_converge) break;
        }

        if (inc.v_verdict == GridVerdict::all_converge &&
            inc.w_verdict == GridVerdict::all_converge) {
            inc.route = "4";
            inc.pass = true;
        } else if (inc.images_converge) {
            // Raw w-sequences include non-convergent selections but their
            // k_y-images settle: the equivalent route decides.
            inc.route = "4'";
            inc.pass = true;
        }
        report.condition4.inclusion = inc;
        report.condition4.pass = report.condition4.bounded.pass && inc.pass;
    }

    // Loop equilibria and the attractive set.
    report.loop_equilibria =
        loop_equilibria(ic, ic.w_range[0], ic.w_range[1], budget.fix_tol, budget.fix_grid);
    if (report.condition3.kx_singleton) {
        report.attractive_set = attractive_set(ic, report.loop_equilibria);
    }

    // Verdict assembly: a named blocking item, never a silent pass.
    const bool all_pass = report.condition1.pass && report.condition2.pass &&
                          report.condition3.pass && report.condition4.pass;
    if (all_pass) {
        report.verdict = "pass";
    } else {
        const bool hard_fail =
            (!report.condition1.pass) || (!report.condition2.pass) || (!report.condition3.pass) ||
            (!report.condition4.bounded.pass) || !report.condition4.inclusion.witness.empty();
        if (!report.condition1.pass) {
            report.blocking = "condition1";
        } else if (!report.condition2.pass) {
            report.blocking = "condition2";
        } else if (!report.condition3.pass) {
            report.blocking = "condition3";
        } else {
            report.blocking = "condition4";
        }
        report.verdict = hard_fail ? "fail" : "inconclusive";
    }
    return report;
}

// ---------------------------------------------------------------------------
// Loop equilibria and the attractive set
// ---------------------------------------------------------------------------

std::vector<double> loop_equilibria(const Interconnection& ic, double lo, double hi, double tol,
                                    int grid) {
    MultiMapPtr loop = compose_maps(characteristic_kw(ic), characteristic_ky(ic));
    return find_fixed_points(*loop, lo, hi, grid, tol);
}

std::vector<AttractivePoint> attractive_set(const Interconnection& ic,
                                            std::span<const double> equilibria) {
    MultiMapPtr kx = characteristic_kx(ic);
    MultiMapPtr ky = characteristic_ky(ic);
    MultiMapPtr kz = characteristic_kz(ic);

    std::vector<AttractivePoint> out;
    out.reserve(equilibria.size());
    for (double w : equilibria) {
        const std::vector<double> xs = kx->values(w);
        if (xs.size() != 1) {
            throw Error("hypothesis violation: k_x(" + fmt(w) + ") has " +
                        std::to_string(xs.size()) + " values; the theorem needs a singleton");
        }
        AttractivePoint point;
        point.w_eq = w;
        point.x_point = xs[0];
        const std::vector<double> ys = ky->values(w);
        for (double y : ys) {
            for (double z : kz->values(y)) point.z_set.push_back(z);
        }
        point.z_set = dedup_sorted(std::move(point.z_set), kz->dedup_tol());
        out.push_back(std::move(point));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Closed-loop validation
// ---------------------------------------------------------------------------

ConvergenceReport validate_convergence(const Interconnection& ic,
                                       std::span<const std::vector<double>> starts,
                                       double t_final, double dist_tol,
                                       std::span<const AttractivePoint> attractive,
                                       const IntegrateOptions& opts, double escape_radius) {
    if (starts.empty()) throw InputError("validate_convergence needs at least one start");
    if (attractive.empty()) throw InputError("validate_convergence needs the attractive set");
    if (ic.sys_x.dim != 1 || ic.sys_z.dim != 1) {
        throw InputError("validate_convergence supports scalar subsystems");
    }

    ConvergenceReport report;
    report.dist_tol = dist_tol;
    report.entries.resize(starts.size());

    parallel_for(starts.size(), [&](std::size_t i) {
        ConvergenceReport::Entry entry;
        entry.start = starts[i];
        try {
            LoopTrajectory traj = integrate_loop(ic, starts[i], t_final, opts);
            double sup = 0.0;
            double max_x = 0.0;
            for (const auto& s : traj.states) {
                for (double c : s) sup = std::max(sup, std::abs(c));
                max_x = std::max(max_x, std::abs(s[0]));
            }
            entry.max_abs_x = max_x;
            entry.bounded = sup < escape_radius;

            const double xt = traj.states.back()[0];
            const double zt = traj.states.back()[1];
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t p = 0; p < attractive.size(); ++p) {
                for (double zbar : attractive[p].z_set) {
                    const double d = std::hypot(xt - attractive[p].x_point, zt - zbar);
                    if (d < best) {
                        best = d;
                        entry.selected_pair = static_cast<int>(p);
                        entry.selected_z = zbar;
                    }
                }
            }
            entry.terminal_distance = best;
            entry.pass = entry.bounded && best < dist_tol;
            if (!entry.bounded) entry.note = "trajectory escaped";
            if (ic.state_bound_offset) {
                const double bound = std::abs(starts[i][0]) + *ic.state_bound_offset + 1e-6;
                if (max_x > bound) {
                    entry.pass = false;
                    entry.note = "a-priori state bound violated: max |x| = " + fmt(max_x) +
                                 " > " + fmt(bound);
                }
            }
        } catch (const Error& e) {
            entry.pass = false;
            entry.bounded = false;
            entry.note = e.what();
        }
        report.entries[i] = std::move(entry);
    });

    report.pass = std::all_of(report.entries.begin(), report.entries.end(),
                              [](const ConvergenceReport::Entry& e) { return e.pass; });
    return report;
}

}  // namespace msgt
