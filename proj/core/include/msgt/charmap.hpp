#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msgt/integrate.hpp"
#include "msgt/multimap.hpp"
#include "msgt/order.hpp"
#include "msgt/system.hpp"

namespace msgt {

// ---------------------------------------------------------------------------
// Equilibria of a scalar-state system
// ---------------------------------------------------------------------------

enum class Stability {
    attracting,         // f > 0 below, f < 0 above
    repelling,          // f < 0 below, f > 0 above
    semi_stable_above,  // f < 0 on both sides: attracts from above only
    semi_stable_below,  // f > 0 on both sides: attracts from below only
};

std::string to_string(Stability s);

struct EquilibriumPair {
    double input = 0.0;
    std::vector<double> state;
    Stability stability = Stability::attracting;
    std::string basin_note;
    double residual = 0.0;  // |f(state, input)|
};

/// All real roots of f(x, u) = 0 inside the state domain (intersected with the
/// search box), found by sign-change bracketing on a refined grid plus
/// critical-point analysis for tangential (fold) roots, polished by bisection.
/// Scalar-state systems only; throws InputError for dim > 1 and Error for a
/// root continuum (f identically zero on a subinterval).
std::vector<EquilibriumPair> equilibria_at_input(const SystemDef& sys, double u,
                                                 const CharacteristicOptions& opts = {});

// ---------------------------------------------------------------------------
// Branch-count profile
// ---------------------------------------------------------------------------

struct CardinalityProfile {
    struct Run {
        double lo = 0.0;
        double hi = 0.0;
        int count = 0;
    };
    std::vector<Run> intervals;  // maximal constant-cardinality intervals
    std::vector<double> folds;   // localized cardinality jump points
    int grid = 0;
};

/// Evaluates the map on a uniform grid, merges maximal constant-cardinality
/// runs, and localizes the jump points by bisection. Grid points whose count
/// differs from both neighbours (exact fold hits) are reported as folds, not
/// intervals.
CardinalityProfile cardinality_profile(const MultiMap& map, double u_lo, double u_hi,
                                       int grid, double fold_tol = 1e-9);

// ---------------------------------------------------------------------------
// Order-theoretic property checks
// ---------------------------------------------------------------------------

struct PairwiseCheckReport {
    bool pass = false;
    long pairs_checked = 0;
    std::string witness;  // empty on pass
};

/// Weak non-decreasingness: for every grid pair p <= q (cone_in) and every
/// k_p in F(p), k_q in F(q), some r_p in F(p) satisfies r_p <= k_q and some
/// r_q in F(q) satisfies k_p <= r_q (orders in cone_out).
PairwiseCheckReport check_weakly_nondecreasing(const MultiMap& map,
                                               std::span<const double> grid_points,
                                               const OrderCone& cone_in,
                                               const OrderCone& cone_out,
                                               double tol = 1e-9);

/// Anti-monotonicity: for every grid pair p != q and every k_p in F(p), some
/// k_q in F(q) satisfies (k_p - k_q)(p - q) <= 0 (tolerance-widened).
PairwiseCheckReport check_antimonotone(const MultiMap& map,
                                       std::span<const double> grid_points,
                                       double tol = 1e-9);

// ---------------------------------------------------------------------------
// No-cycles-by-order verdict
// ---------------------------------------------------------------------------

enum class CycleVerdict { no_cycles_certified, inconclusive };

/// Certifies absence of cycles among the equilibria of a monotone system when
/// they are totally ordered in the strict cone order; otherwise inconclusive
/// (absence of cycles is NOT decided).
CycleVerdict check_no_cycles_by_order(std::span<const std::vector<double>> equilibria,
                                      const OrderCone& cone);

// ---------------------------------------------------------------------------
// Characteristic verification (Definition conditions 1-4, sampled)
// ---------------------------------------------------------------------------

struct VerifyCharacteristicOptions {
    // Near a fold the approach to the tangential equilibrium is algebraic, so
    // the horizon is long and the matching tolerance is loose by default.
    double t_final = 200.0;
    double tol = 1e-2;  // equilibrium matching; settling uses tol/10
    std::vector<double> lyapunov_epsilons{0.1, 0.05, 0.01};
    IntegrateOptions integrate;
    CharacteristicOptions roots;
};

struct CharacteristicReport {
    struct Condition {
        bool pass = false;
        std::string detail;
        std::vector<std::string> witnesses;
    };
    Condition coverage;   // every start settles onto some equilibrium
    Condition lyapunov;   // sampled static Lyapunov stability
    Condition isolation;  // pairwise equilibrium separation > 10 tol
    Condition no_cycles;  // order-based certificate (scalar systems: automatic)
    bool pass = false;
    std::vector<std::pair<double, std::vector<EquilibriumPair>>> equilibria_by_input;
};

/// Samples the four defining conditions of a static input-state
/// characteristic over the given input and initial-state grids. For scalar
/// systems the equilibria come from root finding; for higher dimensions they
/// are estimated by clustering settled trajectories.
CharacteristicReport verify_characteristic(const SystemDef& sys,
                                           std::span<const double> u_grid,
                                           std::span<const std::vector<double>> x0_grid,
                                           const VerifyCharacteristicOptions& opts = {});

}  // namespace msgt
