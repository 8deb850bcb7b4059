#pragma once

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "msgt/expr.hpp"
#include "msgt/order.hpp"

namespace msgt {

struct StateInterval {
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

/// Single-valued piecewise-linear function given by polyline vertices with
/// non-decreasing abscissae. Used as an input pre-map for systems whose drive
/// enters through a tabulated nonlinearity rather than a rational expression.
class PiecewiseLinearFn {
public:
    explicit PiecewiseLinearFn(std::vector<std::array<double, 2>> vertices);

    double operator()(double x) const;
    double x_min() const noexcept { return vertices_.front()[0]; }
    double x_max() const noexcept { return vertices_.back()[0]; }
    const std::vector<std::array<double, 2>>& vertices() const noexcept { return vertices_; }

private:
    std::vector<std::array<double, 2>> vertices_;
};

/// A SISO system dx/dt = f(x, u), y = h(x) with orthant order cones on state,
/// input, and output, and a per-coordinate closed state domain.
struct SystemDef {
    std::string name;
    std::size_t dim = 0;
    std::vector<Expression> rhs;
    Expression output;
    OrderCone state_cone{std::vector<int>{+1}};
    OrderCone input_cone{std::vector<int>{+1}};
    OrderCone output_cone{std::vector<int>{+1}};
    std::vector<StateInterval> state_domain;
    /// Optional pre-map applied to the raw input before it reaches rhs.
    std::optional<PiecewiseLinearFn> input_transform;

    double effective_input(double u) const;
    void rhs_eval(std::span<const double> state, double input, std::span<double> deriv) const;
    double output_eval(std::span<const double> state) const;
    bool in_domain(std::span<const double> state) const;

    /// Cross-field invariants; throws InputError on violation.
    void validate() const;
};

/// Parses the line-oriented system configuration grammar:
///
///   system <name>
///   dim <n>
///   state_domain <lo_1>..<hi_1> ...   ("inf" allowed; optional, default 0..inf)
///   rhs<i> = <expression>             (one line per i = 1..n)
///   output = <expression>
///   state_cone <signstring>  input_cone <+|->  output_cone <+|->
///
/// '#' starts a comment. Cone directives may share a line or appear alone.
SystemDef parse_system(std::string_view text);
SystemDef parse_system_file(const std::string& path);

/// Realizable input signals: constant, piecewise-constant, or sampled with
/// linear interpolation.
class InputSignal {
public:
    static InputSignal constant(double value);
    /// value[i] applies on [times[i], times[i+1]); times must be strictly increasing.
    static InputSignal piecewise_constant(std::vector<double> times, std::vector<double> values);
    /// Linear interpolation through (times[i], values[i]); clamped outside.
    static InputSignal sampled(std::vector<double> times, std::vector<double> values);

    double operator()(double t) const;
    /// Interior kink times, in increasing order; integration restarts here.
    const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
    std::string describe() const;

private:
    enum class Kind { constant, piecewise_constant, sampled };
    Kind kind_ = Kind::constant;
    std::vector<double> times_;
    std::vector<double> values_;
    std::vector<double> breakpoints_;
};

struct Trajectory {
    std::vector<double> times;                 // strictly increasing, starts at 0
    std::vector<std::vector<double>> states;   // one n-vector per time
    std::vector<double> inputs;                // raw input signal values
    std::vector<double> outputs;               // h(state)
    std::size_t size() const noexcept { return times.size(); }
};

}  // namespace msgt
