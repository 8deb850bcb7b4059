#pragma once

#include <span>
#include <string>
#include <vector>

#include "msgt/multimap.hpp"

namespace msgt {

// ---------------------------------------------------------------------------
// Solution sequences of the inclusion w_{k+1} in F(w_k)
// ---------------------------------------------------------------------------

enum class PathKind { converged, periodic, undetermined };

struct InclusionPath {
    std::vector<double> values;  // w_0 .. w_K
    std::vector<int> branches;   // per-step index into the sorted successor set
    PathKind kind = PathKind::undetermined;
    double limit = 0.0;          // converged only
    int period = 0;              // periodic only
    std::vector<double> orbit;   // periodic only: the last `period` values
    std::string note;            // escape or truncation detail
    bool escaped = false;        // left the escape radius or the map domain
};

struct PathSet {
    std::vector<InclusionPath> paths;
    bool truncated = false;  // branch cap hit; enumeration incomplete
};

struct IterateOptions {
    /// Convergence: the last `converge_window` increments all below tol and the
    /// final value is a fixed point within 10 tol.
    double tol = 1e-9;
    int converge_window = 5;
    /// Period detection scans p = 1..max_period over the trailing 2p values.
    int max_period = 8;
    /// |w| beyond this radius classifies the path as escaped (reported
    /// undetermined with an escape note; divergence is claimed only here).
    double escape_radius = 1e6;
};

/// All values of F(w), deduplicated within tol, ascending.
std::vector<double> successors(const MultiMap& map, double w, double tol);

/// Depth-first enumeration of every selection sequence from w0, pruning each
/// branch as soon as it classifies (converged or periodic). Enumeration stops
/// with `truncated` set once the number of emitted paths reaches branch_cap.
PathSet iterate_paths(const MultiMap& map, double w0, int depth, int branch_cap,
                      const IterateOptions& opts = {});

/// Replays a stored path against the map: max over steps of the distance from
/// w_{k+1} to the nearest element of F(w_k).
double replay_residual(const MultiMap& map, const InclusionPath& path);

// ---------------------------------------------------------------------------
// Fixed points: w in F(w)
// ---------------------------------------------------------------------------

struct FixedPointResult {
    std::vector<double> points;
    bool rescan_warning = false;  // branch structure changed inside a bracket
};

FixedPointResult find_fixed_points_detailed(const MultiMap& map, double lo, double hi,
                                            int grid, double tol);
std::vector<double> find_fixed_points(const MultiMap& map, double lo, double hi, int grid,
                                      double tol);

// ---------------------------------------------------------------------------
// Grid classification
// ---------------------------------------------------------------------------

enum class GridVerdict { all_converge, periodic_found, divergent_found, truncated };

std::string to_string(GridVerdict v);
std::string to_string(PathKind k);

struct GridClassification {
    struct StartSummary {
        double start = 0.0;
        std::size_t converged = 0;
        std::size_t periodic = 0;
        std::size_t undetermined = 0;
        std::size_t escaped = 0;
        bool truncated = false;
        std::vector<InclusionPath> paths;
    };
    std::vector<StartSummary> starts;
    GridVerdict verdict = GridVerdict::all_converge;
};

/// Runs iterate_paths from every start. Verdict: divergent_found if any path
/// escaped; else periodic_found if any path is periodic; else truncated when
/// enumeration was capped or paths remained undetermined; else all_converge.
GridClassification classify_grid(const MultiMap& map, std::span<const double> starts,
                                 int depth, double tol, int branch_cap = 10'000,
                                 const IterateOptions& base_opts = {});

}  // namespace msgt
