#include "msgt/charmap.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "msgt/errors.hpp"

namespace msgt {

namespace {

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(12);
    out << v;
    return out.str();
}

std::string fmt_point(std::span<const double> v) {
    std::ostringstream out;
    out << "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        out << fmt(v[i]);
    }
    out << ")";
    return out.str();
}

using ScalarFn = std::function<double(double)>;

/// Plain bisection on a bracketed sign change; returns the midpoint of the
/// final bracket.
double bisect_root(const ScalarFn& g, double a, double b, double ga, double gb) {
    if (ga == 0.0) return a;
    if (gb == 0.0) return b;
    for (int iter = 0; iter < 200; ++iter) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double gm = g(m);
        if (gm == 0.0) return m;
        if ((ga < 0.0) == (gm < 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
        if (b - a < 1e-15 * (1.0 + std::abs(a) + std::abs(b))) break;
    }
    return 0.5 * (a + b);
}

/// Central finite difference; the step is scale-aware.
double fd_derivative(const ScalarFn& g, double x) {
    const double h = 1e-6 * (1.0 + std::abs(x));
    return (g(x + h) - g(x - h)) / (2.0 * h);
}

/// Bisection on the finite-difference derivative: locates a critical point of
/// g inside [a, b] given a derivative sign change (the caller checked the
/// endpoint signs). Used to pin tangential (double) roots that produce no
/// sign change in g itself.
double bisect_critical(const ScalarFn& g, double a, double b, double da) {
    for (int iter = 0; iter < 100; ++iter) {
        const double m = 0.5 * (a + b);
        if (m == a || m == b) break;
        const double dm = fd_derivative(g, m);
        if (dm == 0.0) return m;
        if ((da < 0.0) == (dm < 0.0)) {
            a = m;
            da = dm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

/// Scans [a, b] for roots of g: sign changes are bisected; when none appear,
/// a derivative sign change with a small residual marks a tangential root.
/// Recurses once around the minimum to sharpen the search window.
void scan_cell(const ScalarFn& g, double a, double b, double residual_tol, int depth,
               std::vector<double>& roots) {
    constexpr int kSub = 64;
    std::vector<double> xs(kSub + 1), gs(kSub + 1);
    for (int i = 0; i <= kSub; ++i) {
        xs[i] = a + (b - a) * static_cast<double>(i) / kSub;
        gs[i] = g(xs[i]);
    }
    bool found_sign_change = false;
    for (int i = 1; i <= kSub; ++i) {
        if (gs[i - 1] == 0.0) {
            roots.push_back(xs[i - 1]);
            found_sign_change = true;
        } else if ((gs[i - 1] < 0.0) != (gs[i] < 0.0)) {
            roots.push_back(bisect_root(g, xs[i - 1], xs[i], gs[i - 1], gs[i]));
            found_sign_change = true;
        }
    }
    if (gs[kSub] == 0.0) {
        roots.push_back(xs[kSub]);
        found_sign_change = true;
    }
    if (found_sign_change) return;

    int min_i = 0;
    for (int i = 1; i <= kSub; ++i) {
        if (std::abs(gs[i]) < std::abs(gs[min_i])) min_i = i;
    }
    const double lo = xs[std::max(0, min_i - 1)];
    const double hi = xs[std::min(kSub, min_i + 1)];
    if (depth < 1) {
        scan_cell(g, lo, hi, residual_tol, depth + 1, roots);
        return;
    }

    // Deepest round: try the critical-point route.
    const double dlo = fd_derivative(g, lo);
    const double dhi = fd_derivative(g, hi);
    if (dlo == 0.0 || dhi == 0.0 || (dlo < 0.0) != (dhi < 0.0)) {
        const double zc = bisect_critical(g, lo, hi, dlo);
        if (std::abs(g(zc)) <= residual_tol) roots.push_back(zc);
    }
}

}  // namespace

std::string to_string(Stability s) {
    switch (s) {
        case Stability::attracting: return "attracting";
        case Stability::repelling: return "repelling";
        case Stability::semi_stable_above: return "semi-stable (attracts from above)";
        case Stability::semi_stable_below: return "semi-stable (attracts from below)";
    }
    return "unknown";
}

std::vector<EquilibriumPair> equilibria_at_input(const SystemDef& sys, double u,
                                                 const CharacteristicOptions& opts) {
    if (sys.dim != 1) {
        throw InputError("equilibria_at_input supports scalar-state systems only (dimension " +
                         std::to_string(sys.dim) +
                         "); use verify_characteristic's simulation path instead");
    }
    const double ue = sys.effective_input(u);
    const Expression& f = sys.rhs[0];
    ScalarFn g = [&f, ue](double x) { return f.eval(std::span<const double>(&x, 1), ue); };

    const StateInterval dom = sys.state_domain[0];
    const double lo = std::max(dom.lo, opts.box_lo);
    const double hi = std::min(dom.hi, opts.box_hi);
    if (!(lo < hi)) {
        throw InputError("empty root search box for system '" + sys.name + "'");
    }

    const int n = std::max(opts.grid_cells, 8);
    std::vector<double> xs(static_cast<std::size_t>(n) + 1), gs(static_cast<std::size_t>(n) + 1);
    std::size_t near_zero = 0;
    for (int i = 0; i <= n; ++i) {
        xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / n;
        gs[static_cast<std::size_t>(i)] = g(xs[static_cast<std::size_t>(i)]);
        if (std::abs(gs[static_cast<std::size_t>(i)]) < opts.residual_tol) ++near_zero;
    }
    if (near_zero > static_cast<std::size_t>(n) * 3 / 10) {
        throw Error("degenerate characteristic: f(., u) vanishes on a subinterval of system '" +
                    sys.name + "' at u = " + fmt(u));
    }

    std::vector<double> roots;

    // Exact node hits and bracketed sign changes.
    for (int i = 0; i <= n; ++i) {
        if (gs[static_cast<std::size_t>(i)] == 0.0) roots.push_back(xs[static_cast<std::size_t>(i)]);
    }
    for (int i = 1; i <= n; ++i) {
        const double ga = gs[static_cast<std::size_t>(i - 1)];
        const double gb = gs[static_cast<std::size_t>(i)];
        if (ga == 0.0 || gb == 0.0) continue;
        if ((ga < 0.0) != (gb < 0.0)) {
            roots.push_back(
                bisect_root(g, xs[static_cast<std::size_t>(i - 1)], xs[static_cast<std::size_t>(i)], ga, gb));
        }
    }

    // Refine around sign-change-free local minima of |g| (fold candidates).
    struct Minimum {
        double mag;
        int index;
    };
    std::vector<Minimum> minima;
    for (int i = 1; i < n; ++i) {
        const double m0 = std::abs(gs[static_cast<std::size_t>(i - 1)]);
        const double m1 = std::abs(gs[static_cast<std::size_t>(i)]);
        const double m2 = std::abs(gs[static_cast<std::size_t>(i + 1)]);
        if (m1 > m0 || m1 > m2 || m1 == 0.0) continue;
        const bool sign_change =
            (gs[static_cast<std::size_t>(i - 1)] < 0.0) != (gs[static_cast<std::size_t>(i)] < 0.0) ||
            (gs[static_cast<std::size_t>(i)] < 0.0) != (gs[static_cast<std::size_t>(i + 1)] < 0.0);
        if (!sign_change) minima.push_back({m1, i});
    }
    std::sort(minima.begin(), minima.end(),
              [](const Minimum& a, const Minimum& b) { return a.mag < b.mag; });
    if (minima.size() > 8) minima.resize(8);
    for (const Minimum& m : minima) {
        scan_cell(g, xs[static_cast<std::size_t>(m.index - 1)],
                  xs[static_cast<std::size_t>(m.index + 1)], opts.residual_tol, 0, roots);
    }

    roots = dedup_sorted(std::move(roots), opts.dedup_tol);

    std::vector<EquilibriumPair> out;
    out.reserve(roots.size());
    for (std::size_t r = 0; r < roots.size(); ++r) {
        const double root = roots[r];

        // Side-sample offset: clear of arithmetic noise, inside the gap to the
        // nearest other root.
        double delta = std::max(1e-5 * (1.0 + std::abs(root)), 3.0 * opts.dedup_tol);
        if (r > 0) delta = std::min(delta, 0.3 * (root - roots[r - 1]));
        if (r + 1 < roots.size()) delta = std::min(delta, 0.3 * (roots[r + 1] - root));

        const bool below_ok = root - delta >= dom.lo;
        const bool above_ok = root + delta <= dom.hi;
        const double g_below = below_ok ? g(root - delta) : 0.0;
        const double g_above = above_ok ? g(root + delta) : 0.0;

        Stability st;
        std::string note;
        if (below_ok && above_ok) {
            if (g_below > 0.0 && g_above < 0.0) st = Stability::attracting;
            else if (g_below < 0.0 && g_above > 0.0) st = Stability::repelling;
            else if (g_below < 0.0 && g_above < 0.0) st = Stability::semi_stable_above;
            else st = Stability::semi_stable_below;
        } else if (above_ok) {
            st = g_above < 0.0 ? Stability::attracting : Stability::repelling;
            note = "domain boundary: classified from above only";
        } else {
            st = g_below > 0.0 ? Stability::attracting : Stability::repelling;
            note = "domain boundary: classified from below only";
        }

        EquilibriumPair pair;
        pair.input = u;
        pair.state = {root};
        pair.stability = st;
        pair.basin_note = note.empty() ? to_string(st) : to_string(st) + "; " + note;
        pair.residual = std::abs(g(root));
        out.push_back(std::move(pair));
    }
    return out;
}

// ---------------------------------------------------------------------------
// cardinality_profile
// ---------------------------------------------------------------------------

CardinalityProfile cardinality_profile(const MultiMap& map, double u_lo, double u_hi,
                                       int grid, double fold_tol) {
    if (grid < 2) throw InputError("cardinality profile needs grid >= 2");
    if (!(u_lo < u_hi)) throw InputError("cardinality profile needs u_lo < u_hi");
    const Interval dom = map.domain();
    if (!dom.contains(u_lo, 1e-12) || !dom.contains(u_hi, 1e-12)) {
        throw InputError("[u_lo, u_hi] not contained in the map domain");
    }

    std::vector<double> xs(static_cast<std::size_t>(grid));
    std::vector<int> counts(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        xs[static_cast<std::size_t>(i)] =
            u_lo + (u_hi - u_lo) * static_cast<double>(i) / (grid - 1);
        counts[static_cast<std::size_t>(i)] =
            static_cast<int>(map.values(xs[static_cast<std::size_t>(i)]).size());
    }

    struct Run {
        int begin, end, count;  // node index range [begin, end]
    };
    std::vector<Run> runs;
    for (int i = 0; i < grid; ++i) {
        if (!runs.empty() && runs.back().count == counts[static_cast<std::size_t>(i)]) {
            runs.back().end = i;
        } else {
            runs.push_back({i, i, counts[static_cast<std::size_t>(i)]});
        }
    }

    // Localize every jump between adjacent runs by bisection on the count.
    auto count_at = [&](double u) { return static_cast<int>(map.values(u).size()); };
    std::vector<double> folds;
    for (std::size_t r = 1; r < runs.size(); ++r) {
        double a = xs[static_cast<std::size_t>(runs[r - 1].end)];
        double b = xs[static_cast<std::size_t>(runs[r].begin)];
        const int left_count = runs[r - 1].count;
        while (b - a > fold_tol) {
            const double m = 0.5 * (a + b);
            if (count_at(m) == left_count) {
                a = m;
            } else {
                b = m;
            }
        }
        folds.push_back(0.5 * (a + b));
    }
    folds = dedup_sorted(std::move(folds), std::max(10.0 * fold_tol, 1e-9));

    // Isolated single-node runs are fold hits, not intervals.
    CardinalityProfile profile;
    profile.grid = grid;
    profile.folds = folds;

    std::vector<Run> significant;
    for (const Run& run : runs) {
        if (run.end > run.begin || runs.size() == 1) significant.push_back(run);
    }
    if (significant.empty() && !runs.empty()) significant.push_back(runs.front());

    for (std::size_t r = 0; r < significant.size(); ++r) {
        CardinalityProfile::Run out;
        out.count = significant[r].count;
        if (r == 0) {
            out.lo = u_lo;
        } else {
            // Boundary = nearest localized fold between the two runs.
            const double left_edge = xs[static_cast<std::size_t>(significant[r - 1].end)];
            const double right_edge = xs[static_cast<std::size_t>(significant[r].begin)];
            out.lo = 0.5 * (left_edge + right_edge);
            for (double f : folds) {
                if (f >= left_edge - 1e-12 && f <= right_edge + 1e-12) out.lo = f;
            }
        }
        out.hi = u_hi;
        if (r + 1 < significant.size()) {
            const double left_edge = xs[static_cast<std::size_t>(significant[r].end)];
            const double right_edge = xs[static_cast<std::size_t>(significant[r + 1].begin)];
            out.hi = 0.5 * (left_edge + right_edge);
            for (double f : folds) {
                if (f >= left_edge - 1e-12 && f <= right_edge + 1e-12) out.hi = f;
            }
        }
        profile.intervals.push_back(out);
    }
    return profile;
}

// ---------------------------------------------------------------------------
// Order-theoretic checks
// ---------------------------------------------------------------------------

namespace {

double out_least(const std::vector<double>& sorted_values, const OrderCone& cone) {
    return cone.sign(0) > 0 ? sorted_values.front() : sorted_values.back();
}

double out_greatest(const std::vector<double>& sorted_values, const OrderCone& cone) {
    return cone.sign(0) > 0 ? sorted_values.back() : sorted_values.front();
}

}  // namespace

PairwiseCheckReport check_weakly_nondecreasing(const MultiMap& map,
                                               std::span<const double> grid_points,
                                               const OrderCone& cone_in,
                                               const OrderCone& cone_out, double tol) {
    if (cone_in.dimension() != 1 || cone_out.dimension() != 1) {
        throw InputError("weak non-decreasingness check needs scalar cones");
    }
    PairwiseCheckReport report;
    std::vector<std::vector<double>> images;
    images.reserve(grid_points.size());
    for (double p : grid_points) images.push_back(map.values(p));

    const double s_out = cone_out.sign(0);
    for (std::size_t i = 0; i < grid_points.size(); ++i) {
        for (std::size_t j = 0; j < grid_points.size(); ++j) {
            if (i == j) continue;
            const double p = grid_points[i];
            const double q = grid_points[j];
            if (!cone_in.leq(p, q) || p == q) continue;
            ++report.pairs_checked;

            // r_p <= k_q for every k_q reduces to least(F(p)) <= least(F(q));
            // k_p <= r_q for every k_p reduces to greatest(F(p)) <= greatest(F(q)).
            const double lp = out_least(images[i], cone_out);
            const double lq = out_least(images[j], cone_out);
            if (s_out * (lq - lp) < -tol) {
                report.witness = "p=" + fmt(p) + ", q=" + fmt(q) + ": no r_p in F(p) with r_p <= k_q=" +
                                 fmt(lq) + " (best r_p=" + fmt(lp) + ")";
                return report;
            }
            const double gp = out_greatest(images[i], cone_out);
            const double gq = out_greatest(images[j], cone_out);
            if (s_out * (gq - gp) < -tol) {
                report.witness = "p=" + fmt(p) + ", q=" + fmt(q) + ": no r_q in F(q) with k_p=" +
                                 fmt(gp) + " <= r_q (best r_q=" + fmt(gq) + ")";
                return report;
            }
        }
    }
    report.pass = true;
    return report;
}

PairwiseCheckReport check_antimonotone(const MultiMap& map, std::span<const double> grid_points,
                                       double tol) {
    PairwiseCheckReport report;
    std::vector<std::vector<double>> images;
    images.reserve(grid_points.size());
    for (double p : grid_points) images.push_back(map.values(p));

    for (std::size_t i = 0; i < grid_points.size(); ++i) {
        for (std::size_t j = 0; j < grid_points.size(); ++j) {
            if (i == j) continue;
            const double p = grid_points[i];
            const double q = grid_points[j];
            if (p == q) continue;
            ++report.pairs_checked;
            const double tol_eff = tol * (1.0 + std::abs(p - q));
            for (double kp : images[i]) {
                double best = std::numeric_limits<double>::infinity();
                for (double kq : images[j]) {
                    best = std::min(best, (kp - kq) * (p - q));
                }
                if (best > tol_eff) {
                    report.witness = "p=" + fmt(p) + ", q=" + fmt(q) + ", k_p=" + fmt(kp) +
                                     ": min product " + fmt(best) + " > 0";
                    return report;
                }
            }
        }
    }
    report.pass = true;
    return report;
}

CycleVerdict check_no_cycles_by_order(std::span<const std::vector<double>> equilibria,
                                      const OrderCone& cone) {
    return is_totally_ordered(cone, equilibria) ? CycleVerdict::no_cycles_certified
                                                : CycleVerdict::inconclusive;
}

// ---------------------------------------------------------------------------
// verify_characteristic
// ---------------------------------------------------------------------------

namespace {

double inf_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

}  // namespace

CharacteristicReport verify_characteristic(const SystemDef& sys,
                                           std::span<const double> u_grid,
                                           std::span<const std::vector<double>> x0_grid,
                                           const VerifyCharacteristicOptions& opts) {
    if (u_grid.empty() || x0_grid.empty()) {
        throw InputError("verify_characteristic needs non-empty grids");
    }
    CharacteristicReport report;
    report.coverage.pass = true;
    report.lyapunov.pass = true;
    report.isolation.pass = true;
    report.no_cycles.pass = true;

    const double settle_tol = opts.tol / 10.0;

    for (double u : u_grid) {
        // Settle every start; collect terminal points.
        std::vector<std::vector<double>> settled;
        for (const std::vector<double>& x0 : x0_grid) {
            try {
                OmegaLimitResult res = omega_limit_estimate(sys, x0, u, opts.t_final,
                                                            settle_tol, opts.integrate);
                if (res.settled) {
                    settled.push_back(res.point);
                } else {
                    report.coverage.pass = false;
                    report.coverage.witnesses.push_back("u=" + fmt(u) + ", x0=" + fmt_point(x0) +
                                                        ": " + res.note);
                    settled.emplace_back();  // placeholder keeps indices aligned
                }
            } catch (const IntegrationError& e) {
                report.coverage.pass = false;
                report.coverage.witnesses.push_back("u=" + fmt(u) + ", x0=" + fmt_point(x0) +
                                                    ": integration failed: " + e.what());
                settled.emplace_back();
            }
        }

        // Equilibria: roots for scalar systems, clusters of settled points otherwise.
        std::vector<EquilibriumPair> equilibria;
        if (sys.dim == 1) {
            equilibria = equilibria_at_input(sys, u, opts.roots);
        } else {
            for (const auto& pt : settled) {
                if (pt.empty()) continue;
                bool merged = false;
                for (auto& e : equilibria) {
                    if (inf_distance(e.state, pt) <= 10.0 * opts.tol) {
                        merged = true;
                        break;
                    }
                }
                if (!merged) {
                    EquilibriumPair e;
                    e.input = u;
                    e.state = pt;
                    e.basin_note = "clustered from simulation";
                    equilibria.push_back(std::move(e));
                }
            }
        }

        // Coverage: every settled terminal point must match some equilibrium.
        for (std::size_t s = 0; s < settled.size(); ++s) {
            if (settled[s].empty()) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& e : equilibria) best = std::min(best, inf_distance(e.state, settled[s]));
            if (best > opts.tol) {
                report.coverage.pass = false;
                report.coverage.witnesses.push_back(
                    "u=" + fmt(u) + ", x0=" + fmt_point(x0_grid[s]) + ": settled at " +
                    fmt_point(settled[s]) + ", distance " + fmt(best) + " from every equilibrium");
            }
        }

        // Isolation: pairwise separation above 10 tol.
        for (std::size_t a = 0; a < equilibria.size(); ++a) {
            for (std::size_t b = a + 1; b < equilibria.size(); ++b) {
                const double d = inf_distance(equilibria[a].state, equilibria[b].state);
                if (d <= 10.0 * opts.tol) {
                    report.isolation.pass = false;
                    report.isolation.witnesses.push_back(
                        "u=" + fmt(u) + ": equilibria " + fmt_point(equilibria[a].state) + " and " +
                        fmt_point(equilibria[b].state) + " only " + fmt(d) + " apart");
                }
            }
        }

        // Sampled static Lyapunov stability with the declared epsilon schedule
        // and an empirically searched delta.
        for (const auto& eq : equilibria) {
            for (double eps : opts.lyapunov_epsilons) {
                bool found_delta = false;
                for (double delta = eps; delta >= eps / 8.0 - 1e-300; delta /= 2.0) {
                    bool ok = true;
                    for (std::size_t c = 0; c < sys.dim && ok; ++c) {
                        for (double offset : {delta, -delta, delta / 2.0, -delta / 2.0}) {
                            std::vector<double> start = eq.state;
                            start[c] += offset;
                            if (!sys.in_domain(start)) continue;
                            Trajectory traj;
                            try {
                                traj = integrate(sys, start, InputSignal::constant(u),
                                                 opts.t_final, opts.integrate);
                            } catch (const IntegrationError&) {
                                continue;  // divergence: not a basin member
                            }
                            // Empirical basin membership: the trajectory must
                            // come back to this equilibrium.
                            if (inf_distance(traj.states.back(), eq.state) > opts.tol) continue;
                            double excursion = 0.0;
                            for (const auto& st : traj.states) {
                                excursion = std::max(excursion, inf_distance(st, eq.state));
                            }
                            if (excursion > eps + opts.tol) {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if (ok) {
                        found_delta = true;
                        break;
                    }
                }
                if (!found_delta) {
                    report.lyapunov.pass = false;
                    report.lyapunov.witnesses.push_back("u=" + fmt(u) + ", equilibrium " +
                                                        fmt_point(eq.state) + ": no delta works for eps=" +
                                                        fmt(eps));
                }
            }
        }

        // No-cycles certificate.
        std::vector<std::vector<double>> points;
        points.reserve(equilibria.size());
        for (const auto& e : equilibria) points.push_back(e.state);
        const CycleVerdict verdict = check_no_cycles_by_order(points, sys.state_cone);
        if (sys.dim == 1) {
            report.no_cycles.detail = "scalar: no cycles";
        } else if (verdict == CycleVerdict::no_cycles_certified) {
            report.no_cycles.detail = "certified: equilibria totally ordered in the strict cone order";
        } else {
            report.no_cycles.pass = false;
            report.no_cycles.witnesses.push_back("u=" + fmt(u) +
                                                 ": equilibria not totally ordered; inconclusive");
        }

        report.equilibria_by_input.emplace_back(u, std::move(equilibria));
    }

    report.lyapunov.detail = "sampled evidence (epsilon schedule, empirically searched delta)";
    report.pass = report.coverage.pass && report.lyapunov.pass && report.isolation.pass &&
                  report.no_cycles.pass;
    return report;
}

}  // namespace msgt
