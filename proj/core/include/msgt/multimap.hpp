#pragma once

#include <array>
#include <limits>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "msgt/system.hpp"

namespace msgt {

struct Interval {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x, double slack = 0.0) const noexcept {
        return x >= lo - slack && x <= hi + slack;
    }
};

/// Set-value deduplication tolerance: well below the branch separation of the
/// maps handled here, above integrator and root-polish noise.
inline constexpr double kDedupTol = 1e-7;

/// Evaluable set-valued map from a scalar input to a finite set of values.
class MultiMap {
public:
    virtual ~MultiMap() = default;

    /// All values of F(input), ascending and deduplicated within dedup_tol().
    /// Never empty; throws DomainError outside domain().
    virtual std::vector<double> values(double input) const = 0;
    virtual Interval domain() const = 0;
    virtual double dedup_tol() const { return kDedupTol; }
    virtual std::string describe() const = 0;
};

using MultiMapPtr = std::shared_ptr<const MultiMap>;

/// Sorts and merges values within tol.
std::vector<double> dedup_sorted(std::vector<double> values, double tol);

// ---------------------------------------------------------------------------
// Piecewise-linear multimap
// ---------------------------------------------------------------------------

/// Connected polyline graph; consecutive segments may fold back in the input,
/// making the map multi-valued on the overlap. Evaluation at p returns every
/// intersection of the vertical line at p with the polyline.
class PiecewiseLinearMap final : public MultiMap {
public:
    explicit PiecewiseLinearMap(std::vector<std::array<double, 2>> vertices,
                                std::string name = "pwl");

    std::vector<double> values(double input) const override;
    Interval domain() const override;
    std::string describe() const override { return name_; }

    const std::vector<std::array<double, 2>>& vertices() const noexcept { return vertices_; }
    std::size_t segment_count() const noexcept { return vertices_.size() - 1; }
    double segment_slope(std::size_t i) const;

private:
    std::vector<std::array<double, 2>> vertices_;
    std::string name_;
};

/// The inverted-Zorro multimap. epsilon = 0 gives vertices
/// (0,0), (1/2,1/4), (1/4,1/2), (1,1); epsilon > 0 moves the third vertex to
/// ((1+2e)/(4+4e), 1/2), steepening the middle slope to -(1+e) and destroying
/// the period-2 orbits.
std::shared_ptr<const PiecewiseLinearMap> make_zorro(double epsilon);

// ---------------------------------------------------------------------------
// Characteristic of a scalar-state system
// ---------------------------------------------------------------------------

struct CharacteristicOptions {
    double residual_tol = 1e-10;  // |f(root, u)| bound for reported roots
    double dedup_tol = kDedupTol;
    int grid_cells = 256;  // bracketing grid over the search box
    /// Root search box, intersected with the state domain.
    double box_lo = -50.0;
    double box_hi = 50.0;
};

/// Input-state characteristic of a scalar-state system: values at u are the
/// equilibria of f(., u) inside the state domain. With through_output set the
/// values are pushed through h (input-output characteristic).
class CharacteristicMap final : public MultiMap {
public:
    CharacteristicMap(SystemDef sys, bool through_output, Interval input_domain,
                      CharacteristicOptions opts = {});

    std::vector<double> values(double input) const override;
    Interval domain() const override { return input_domain_; }
    double dedup_tol() const override { return opts_.dedup_tol; }
    std::string describe() const override;

    const SystemDef& system() const noexcept { return sys_; }
    bool through_output() const noexcept { return through_output_; }
    const CharacteristicOptions& options() const noexcept { return opts_; }

private:
    SystemDef sys_;
    bool through_output_;
    Interval input_domain_;
    CharacteristicOptions opts_;
};

// ---------------------------------------------------------------------------
// Closed-form singleton map
// ---------------------------------------------------------------------------

/// Singleton-valued map given by a closed-form expression in u.
class ClosedFormMap final : public MultiMap {
public:
    ClosedFormMap(Expression formula, Interval domain, std::string name = "");

    std::vector<double> values(double input) const override;
    Interval domain() const override { return domain_; }
    std::string describe() const override;

private:
    Expression formula_;
    Interval domain_;
    std::string name_;
};

// ---------------------------------------------------------------------------
// Composition
// ---------------------------------------------------------------------------

/// (outer o inner)(p) = union of outer(v) over v in inner(p), deduplicated.
/// Inner values outside the outer domain raise DomainError naming the value.
class CompositionMap final : public MultiMap {
public:
    CompositionMap(MultiMapPtr outer, MultiMapPtr inner);

    std::vector<double> values(double input) const override;
    Interval domain() const override { return inner_->domain(); }
    double dedup_tol() const override;
    std::string describe() const override;

private:
    MultiMapPtr outer_;
    MultiMapPtr inner_;
};

MultiMapPtr compose_maps(MultiMapPtr outer, MultiMapPtr inner);

// ---------------------------------------------------------------------------
// Per-operation evaluation cache
// ---------------------------------------------------------------------------

/// Memoizes values() on the exact input bits. Lifetime is one enclosing
/// operation; not safe for concurrent use of a single instance.
class CachedMap final : public MultiMap {
public:
    explicit CachedMap(MultiMapPtr inner) : inner_(std::move(inner)) {}

    std::vector<double> values(double input) const override;
    Interval domain() const override { return inner_->domain(); }
    double dedup_tol() const override { return inner_->dedup_tol(); }
    std::string describe() const override { return inner_->describe(); }

private:
    MultiMapPtr inner_;
    mutable std::unordered_map<std::uint64_t, std::vector<double>> cache_;
};

}  // namespace msgt
