#include "msgt/inclusion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "msgt/errors.hpp"

namespace msgt {

namespace {

/// Per-operation memoization of map evaluations on exact input bits. Inclusion
/// trees revisit the same values constantly; the cache keeps enumeration cheap
/// without memoizing anything across operations.
class EvalCache {
public:
    explicit EvalCache(const MultiMap& map) : map_(map) {}

    const std::vector<double>& values(double w) {
        const std::uint64_t key = std::bit_cast<std::uint64_t>(w);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        return cache_.emplace(key, map_.values(w)).first->second;
    }

private:
    const MultiMap& map_;
    std::unordered_map<std::uint64_t, std::vector<double>> cache_;
};

double membership_residual(EvalCache& cache, double w) {
    double best = std::numeric_limits<double>::infinity();
    for (double v : cache.values(w)) best = std::min(best, std::abs(v - w));
    return best;
}

/// Window test for period p over the trailing 2p values.
bool window_matches(const std::vector<double>& values, int p, double tol) {
    const int len = static_cast<int>(values.size());
    if (len < 2 * p) return false;
    const int last = len - 1;
    for (int i = 0; i < p; ++i) {
        if (std::abs(values[static_cast<std::size_t>(last - i)] -
                     values[static_cast<std::size_t>(last - p - i)]) >= tol) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::string to_string(PathKind k) {
    switch (k) {
        case PathKind::converged: return "converged";
        case PathKind::periodic: return "periodic";
        case PathKind::undetermined: return "undetermined";
    }
    return "unknown";
}

std::string to_string(GridVerdict v) {
    switch (v) {
        case GridVerdict::all_converge: return "all-converge";
        case GridVerdict::periodic_found: return "periodic-found";
        case GridVerdict::divergent_found: return "divergent-found";
        case GridVerdict::truncated: return "truncated";
    }
    return "unknown";
}

std::vector<double> successors(const MultiMap& map, double w, double tol) {
    return dedup_sorted(map.values(w), tol);
}

double replay_residual(const MultiMap& map, const InclusionPath& path) {
    double worst = 0.0;
    for (std::size_t k = 0; k + 1 < path.values.size(); ++k) {
        double best = std::numeric_limits<double>::infinity();
        for (double v : map.values(path.values[k])) {
            best = std::min(best, std::abs(v - path.values[k + 1]));
        }
        worst = std::max(worst, best);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// iterate_paths
// ---------------------------------------------------------------------------

namespace {

struct Enumerator {
    EvalCache cache;
    const IterateOptions& opts;
    int depth;
    int branch_cap;
    PathSet out;
    std::vector<double> values;
    std::vector<int> branches;

    Enumerator(const MultiMap& map, const IterateOptions& o, int d, int cap)
        : cache(map), opts(o), depth(d), branch_cap(cap) {}

    bool capped() const { return static_cast<int>(out.paths.size()) >= branch_cap; }

    void emit(PathKind kind, double limit, int period, std::string note, bool escaped) {
        InclusionPath path;
        path.values = values;
        path.branches = branches;
        path.kind = kind;
        path.limit = limit;
        path.period = period;
        if (period > 0) {
            path.orbit.assign(values.end() - period, values.end());
        }
        path.note = std::move(note);
        path.escaped = escaped;
        out.paths.push_back(std::move(path));
    }

    /// Classifies the current prefix; emits and returns true when the path is
    /// finished (classified or out of budget).
    bool classify_or_emit() {
        const double w = values.back();
        if (std::abs(w) > opts.escape_radius) {
            emit(PathKind::undetermined, 0.0, 0,
                 "escaped the radius " + std::to_string(opts.escape_radius), true);
            return true;
        }

        const int len = static_cast<int>(values.size());
        if (len >= opts.converge_window + 1) {
            bool small = true;
            for (int i = 0; i < opts.converge_window && small; ++i) {
                small = std::abs(values[static_cast<std::size_t>(len - 1 - i)] -
                                 values[static_cast<std::size_t>(len - 2 - i)]) < opts.tol;
            }
            if (small && membership_residual(cache, w) < 10.0 * opts.tol) {
                emit(PathKind::converged, w, 0, "", false);
                return true;
            }
        }

        // Period 1 is constancy and belongs to the convergence rule above;
        // scanning upward makes the detected period minimal.
        for (int p = 2; p <= opts.max_period; ++p) {
            if (!window_matches(values, p, opts.tol)) continue;
            bool smaller = false;
            for (int q = 1; q < p && !smaller; ++q) smaller = window_matches(values, q, opts.tol);
            if (smaller) continue;
            emit(PathKind::periodic, 0.0, p, "", false);
            return true;
        }

        if (len >= depth + 1) {
            emit(PathKind::undetermined, 0.0, 0, "depth reached", false);
            return true;
        }
        return false;
    }

    // The truncated flag is raised only when the cap blocks work that is
    // still pending, never on an enumeration that finishes exactly at it.
    void extend() {
        if (capped()) {
            out.truncated = true;
            return;
        }
        if (classify_or_emit()) return;

        std::vector<double> succ;
        try {
            succ = cache.values(values.back());
        } catch (const DomainError& e) {
            emit(PathKind::undetermined, 0.0, 0, std::string("domain escape: ") + e.what(), true);
            return;
        }
        for (std::size_t b = 0; b < succ.size(); ++b) {
            if (capped()) {
                out.truncated = true;
                return;
            }
            values.push_back(succ[b]);
            branches.push_back(static_cast<int>(b));
            extend();
            values.pop_back();
            branches.pop_back();
        }
    }
};

}  // namespace

PathSet iterate_paths(const MultiMap& map, double w0, int depth, int branch_cap,
                      const IterateOptions& opts) {
    if (depth < 1) throw InputError("iterate_paths needs depth >= 1");
    if (branch_cap < 1) throw InputError("iterate_paths needs branch_cap >= 1");
    const Interval dom = map.domain();
    if (!dom.contains(w0, 1e-12 * (1.0 + std::abs(w0)))) {
        throw DomainError("start value " + std::to_string(w0) + " outside the map domain");
    }

    Enumerator e(map, opts, depth, branch_cap);
    e.values.push_back(w0);
    e.extend();

    // Deterministic report order: DFS already yields lexicographic traces;
    // keep it stable regardless of future changes.
    std::sort(e.out.paths.begin(), e.out.paths.end(),
              [](const InclusionPath& a, const InclusionPath& b) {
                  return a.branches < b.branches;
              });
    return std::move(e.out);
}

// ---------------------------------------------------------------------------
// find_fixed_points
// ---------------------------------------------------------------------------

namespace {

struct FixedPointSearch {
    EvalCache cache;
    double tol;
    std::vector<double> found;
    bool rescan_warning = false;

    FixedPointSearch(const MultiMap& map, double t) : cache(map), tol(t) {}

    void consider(double w) {
        if (membership_residual(cache, w) <= tol) found.push_back(w);
    }

    /// Bisection on the residual of one branch (index into the sorted value
    /// set); bails out if the branch count changes inside the bracket.
    void bisect_branch(double a, double b, std::size_t branch, std::size_t count) {
        double ra = cache.values(a)[branch] - a;
        double rb = cache.values(b)[branch] - b;
        if (ra == 0.0) {
            found.push_back(a);
            return;
        }
        if (rb == 0.0) {
            found.push_back(b);
            return;
        }
        if ((ra < 0.0) == (rb < 0.0)) return;
        for (int iter = 0; iter < 200; ++iter) {
            const double m = 0.5 * (a + b);
            if (m == a || m == b) break;
            const std::vector<double>& vm = cache.values(m);
            if (vm.size() != count) {
                // Fold crossing inside the bracket: re-scan finer.
                rescan_warning = true;
                scan(a, b, 10, 2);
                return;
            }
            const double rm = vm[branch] - m;
            if (rm == 0.0) {
                found.push_back(m);
                return;
            }
            if ((ra < 0.0) == (rm < 0.0)) {
                a = m;
                ra = rm;
            } else {
                b = m;
                rb = rm;
            }
            if (b - a < 1e-15 * (1.0 + std::abs(a) + std::abs(b))) break;
        }
        found.push_back(0.5 * (a + b));
    }

    void scan(double lo, double hi, int cells, int depth_left) {
        std::vector<double> xs(static_cast<std::size_t>(cells) + 1);
        for (int i = 0; i <= cells; ++i) {
            xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / cells;
        }
        for (double x : xs) consider(x);
        for (int i = 1; i <= cells; ++i) {
            const double a = xs[static_cast<std::size_t>(i - 1)];
            const double b = xs[static_cast<std::size_t>(i)];
            const std::size_t ca = cache.values(a).size();
            const std::size_t cb = cache.values(b).size();
            if (ca == cb) {
                for (std::size_t j = 0; j < ca; ++j) bisect_branch(a, b, j, ca);
            } else if (depth_left > 0) {
                // Branch structure changes inside the cell: re-scan at 10x.
                rescan_warning = true;
                scan(a, b, 10, depth_left - 1);
            }
            // At the deepest level the one-sided endpoint checks above
            // (consider) cover fold-point fixed points.
        }
    }
};

}  // namespace

FixedPointResult find_fixed_points_detailed(const MultiMap& map, double lo, double hi,
                                            int grid, double tol) {
    if (grid < 2) throw InputError("find_fixed_points needs grid >= 2");
    if (!(lo < hi)) throw InputError("find_fixed_points needs lo < hi");
    const Interval dom = map.domain();
    if (!dom.contains(lo, 1e-12 * (1.0 + std::abs(lo))) ||
        !dom.contains(hi, 1e-12 * (1.0 + std::abs(hi)))) {
        throw InputError("[lo, hi] not contained in the map domain");
    }

    FixedPointSearch search(map, tol);
    search.scan(lo, hi, grid, 2);

    FixedPointResult result;
    result.rescan_warning = search.rescan_warning;
    std::vector<double> points = dedup_sorted(std::move(search.found), std::max(tol, kDedupTol));
    for (double w : points) {
        if (search.cache.values(w).empty()) continue;
        double best = std::numeric_limits<double>::infinity();
        for (double v : search.cache.values(w)) best = std::min(best, std::abs(v - w));
        if (best <= tol) result.points.push_back(w);
    }
    return result;
}

std::vector<double> find_fixed_points(const MultiMap& map, double lo, double hi, int grid,
                                      double tol) {
    return find_fixed_points_detailed(map, lo, hi, grid, tol).points;
}

// ---------------------------------------------------------------------------
// classify_grid
// ---------------------------------------------------------------------------

GridClassification classify_grid(const MultiMap& map, std::span<const double> starts,
                                 int depth, double tol, int branch_cap,
                                 const IterateOptions& base_opts) {
    if (starts.empty()) throw InputError("classify_grid needs at least one start");
    IterateOptions opts = base_opts;
    opts.tol = tol;

    GridClassification result;
    bool any_periodic = false;
    bool any_escaped = false;
    bool any_open = false;  // truncated or undetermined

    for (double w0 : starts) {
        PathSet set = iterate_paths(map, w0, depth, branch_cap, opts);
        GridClassification::StartSummary summary;
        summary.start = w0;
        summary.truncated = set.truncated;
        for (const InclusionPath& p : set.paths) {
            if (p.escaped) {
                ++summary.escaped;
            } else if (p.kind == PathKind::converged) {
                ++summary.converged;
            } else if (p.kind == PathKind::periodic) {
                ++summary.periodic;
            } else {
                ++summary.undetermined;
            }
        }
        any_periodic = any_periodic || summary.periodic > 0;
        any_escaped = any_escaped || summary.escaped > 0;
        any_open = any_open || summary.truncated || summary.undetermined > 0;
        summary.paths = std::move(set.paths);
        result.starts.push_back(std::move(summary));
    }

    if (any_escaped) {
        result.verdict = GridVerdict::divergent_found;
    } else if (any_periodic) {
        result.verdict = GridVerdict::periodic_found;
    } else if (any_open) {
        result.verdict = GridVerdict::truncated;
    } else {
        result.verdict = GridVerdict::all_converge;
    }
    return result;
}

}  // namespace msgt
