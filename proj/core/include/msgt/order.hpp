#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace msgt {

/// Orthant-type ordering cone described by one sign per coordinate.
///
/// The induced cone is K = { v : sign_i * v_i >= 0 for all i }, so a <= b in
/// the cone order exactly when every coordinate of b - a has the cone's sign.
/// sign = +1 keeps the usual order on that coordinate, -1 reverses it.
/// Comparisons use exact floating-point inequality; callers that need slack
/// widen their own inputs.
class OrderCone {
public:
    explicit OrderCone(std::vector<int> signs);

    static OrderCone standard(std::size_t dimension);
    static OrderCone opposite(std::size_t dimension);
    /// Builds a cone from a sign string such as "+", "-", "++-".
    static OrderCone parse(std::string_view sign_string);

    std::size_t dimension() const noexcept { return signs_.size(); }
    int sign(std::size_t i) const { return signs_[i]; }
    const std::vector<int>& signs() const noexcept { return signs_; }
    std::string to_string() const;

    bool operator==(const OrderCone& other) const noexcept = default;

    /// a <= b in the cone order (b - a lies in the cone).
    bool leq(std::span<const double> a, std::span<const double> b) const;
    /// a << b: b - a lies in the interior of the cone (strict on every coordinate).
    bool ll(std::span<const double> a, std::span<const double> b) const;

    /// Scalar convenience forms; the cone must be one-dimensional.
    bool leq(double a, double b) const;
    bool ll(double a, double b) const;

private:
    std::vector<int> signs_;
    void require_dimension(std::size_t n) const;
};

/// True when every distinct pair of points is strictly comparable (one << the
/// other). Vacuously true for fewer than two points.
bool is_totally_ordered(const OrderCone& cone,
                        std::span<const std::vector<double>> points);

}  // namespace msgt
