#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "msgt/charmap.hpp"
#include "msgt/inclusion.hpp"
#include "msgt/integrate.hpp"
#include "msgt/multimap.hpp"
#include "msgt/system.hpp"

namespace msgt {

// ---------------------------------------------------------------------------
// Negative-feedback interconnection of two SISO subsystems
// ---------------------------------------------------------------------------

/// dx/dt = f_x(x, w), y = h_x(x);  dz/dt = f_z(z, y), w = h_z(z).
/// The y-channel carries the standard order on both ends; the w-channel
/// carries opposite orders on its two ends (that is the negative feedback).
struct Interconnection {
    std::string name;
    SystemDef sys_x;  // input w, output y
    SystemDef sys_z;  // input y, output w

    // Analysis metadata.
    std::array<double, 2> x_box{0.0, 10.0};  // initial-condition sweep box
    std::array<double, 2> z_box{0.0, 5.0};
    std::array<double, 2> w_range{0.0, 8.0};  // loop-variable ranges for grids
    std::array<double, 2> y_range{0.0, 8.0};
    /// A-priori bound metadata: max_t |x(t)| <= |x(0)| + offset along closed-loop
    /// trajectories, when known.
    std::optional<double> state_bound_offset;

    std::size_t dim() const noexcept { return sys_x.dim + sys_z.dim; }
    void validate() const;
    /// True when the y-channel cones match and the w-channel cones are opposite.
    bool negative_feedback_oriented(std::string* why = nullptr) const;
};

/// Characteristic builders with domains taken from the interconnection ranges.
MultiMapPtr characteristic_kx(const Interconnection& ic, CharacteristicOptions opts = {});
MultiMapPtr characteristic_ky(const Interconnection& ic, CharacteristicOptions opts = {});
MultiMapPtr characteristic_kz(const Interconnection& ic, CharacteristicOptions opts = {});
MultiMapPtr characteristic_kw(const Interconnection& ic, CharacteristicOptions opts = {});

struct LoopTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // stacked (x..., z...)
    std::vector<double> y;
    std::vector<double> w;
};

OdeField loop_field(const Interconnection& ic);
LoopTrajectory integrate_loop(const Interconnection& ic, std::span<const double> start,
                              double t_final, const IntegrateOptions& opts = {});

// ---------------------------------------------------------------------------
// Hypothesis verification
// ---------------------------------------------------------------------------

struct VerificationBudget {
    std::size_t monotone_samples = 32;
    double monotone_t_final = 8.0;
    std::uint64_t seed = 2024;

    int char_grid = 41;      // k_x singleton / k_z boundedness grid
    int loop_grid_w = 5;     // initial-condition sweep
    int loop_grid_h = 5;
    double t_final = 60.0;   // closed-loop horizon
    double escape_radius = 1e6;

    int inclusion_starts = 9;
    int depth = 80;
    int branch_cap = 10'000;
    double conv_tol = 1e-9;

    double fix_tol = 1e-9;
    int fix_grid = 2001;
    double dist_tol = 1e-3;

    IntegrateOptions integrate;
};

struct MonotoneConditionReport {
    bool pass = false;
    bool orientation_ok = false;
    std::string orientation_note;
    MonotoneReport monotone;
};

struct CharConditionReport {
    bool pass = false;
    bool kx_singleton = false;
    std::string kx_witness;
    bool kz_locally_bounded = false;
    double kz_sup_coarse = 0.0;
    double kz_sup_fine = 0.0;
};

struct BoundednessReport {
    bool pass = false;
    double sup_norm = 0.0;
    std::string witness;
};

/// Condition 4 runs two routes. Route "4": every solution sequence of the
/// v-inclusion v+ in (k_y o k_w)(v) converges. Route "4'": the k_y-images of
/// every enumerated solution sequence of the w-inclusion w+ in (k_w o k_y)(w)
/// converge, which is equivalent; it is the route that decides when raw
/// w-sequences have non-convergent selections.
struct InclusionRouteReport {
    GridVerdict v_verdict = GridVerdict::truncated;
    GridVerdict w_verdict = GridVerdict::truncated;
    bool images_converge = false;
    std::string route;  // "4", "4'", or "" when neither route passed
    std::string witness;
    bool pass = false;
};

struct Condition4Report {
    BoundednessReport bounded;
    InclusionRouteReport inclusion;
    bool pass = false;
};

struct AttractivePoint {
    double w_eq = 0.0;          // loop equilibrium in E(k_w o k_y)
    double x_point = 0.0;       // the single element of k_x(w_eq)
    std::vector<double> z_set;  // (k_z o k_y)(w_eq)
};

struct VerificationReport {
    MonotoneConditionReport condition1;
    MonotoneConditionReport condition2;
    CharConditionReport condition3;
    Condition4Report condition4;
    std::vector<double> loop_equilibria;
    std::vector<AttractivePoint> attractive_set;
    std::string verdict;   // "pass" | "fail" | "inconclusive"
    std::string blocking;  // the item that blocked a pass
    VerificationBudget budgets;
};

VerificationReport verify_hypotheses(const Interconnection& ic,
                                     const VerificationBudget& budget = {});

/// Fixed points of k_w o k_y on [lo, hi].
std::vector<double> loop_equilibria(const Interconnection& ic, double lo, double hi,
                                    double tol, int grid = 2001);

/// For each loop equilibrium: the pair ({k_x(w)}, (k_z o k_y)(w)). Throws when
/// k_x is not singleton-valued there (hypothesis violation).
std::vector<AttractivePoint> attractive_set(const Interconnection& ic,
                                            std::span<const double> equilibria);

// ---------------------------------------------------------------------------
// Closed-loop validation
// ---------------------------------------------------------------------------

struct ConvergenceReport {
    struct Entry {
        std::vector<double> start;
        double terminal_distance = 0.0;
        int selected_pair = -1;    // attractive-set index nearest at the end
        double selected_z = 0.0;   // z-set member nearest at the end
        double max_abs_x = 0.0;    // for a-priori bound checks
        bool bounded = false;
        bool pass = false;
        std::string note;
    };
    std::vector<Entry> entries;
    bool pass = false;
    double dist_tol = 0.0;
};

/// Integrates the closed loop from every start and measures the terminal
/// Euclidean distance to the attractive set (minimum over pairs and over the
/// z-set members of each pair).
ConvergenceReport validate_convergence(const Interconnection& ic,
                                       std::span<const std::vector<double>> starts,
                                       double t_final, double dist_tol,
                                       std::span<const AttractivePoint> attractive,
                                       const IntegrateOptions& opts = {},
                                       double escape_radius = 1e6);

}  // namespace msgt
