#include "msgt/order.hpp"

#include "msgt/errors.hpp"

namespace msgt {

OrderCone::OrderCone(std::vector<int> signs) : signs_(std::move(signs)) {
    if (signs_.empty()) {
        throw InputError("ordering cone needs at least one coordinate");
    }
    for (int s : signs_) {
        if (s != 1 && s != -1) {
            throw InputError("ordering cone signs must be +1 or -1");
        }
    }
}

OrderCone OrderCone::standard(std::size_t dimension) {
    return OrderCone(std::vector<int>(dimension, +1));
}

OrderCone OrderCone::opposite(std::size_t dimension) {
    return OrderCone(std::vector<int>(dimension, -1));
}

OrderCone OrderCone::parse(std::string_view sign_string) {
    std::vector<int> signs;
    signs.reserve(sign_string.size());
    for (char c : sign_string) {
        if (c == '+') {
            signs.push_back(+1);
        } else if (c == '-') {
            signs.push_back(-1);
        } else {
            throw InputError("malformed cone string '" + std::string(sign_string) +
                             "': expected only '+' and '-'");
        }
    }
    return OrderCone(std::move(signs));
}

std::string OrderCone::to_string() const {
    std::string out;
    out.reserve(signs_.size());
    for (int s : signs_) out.push_back(s > 0 ? '+' : '-');
    return out;
}

void OrderCone::require_dimension(std::size_t n) const {
    if (n != signs_.size()) {
        throw InputError("dimension mismatch: cone has dimension " +
                         std::to_string(signs_.size()) + ", vector has " +
                         std::to_string(n));
    }
}

bool OrderCone::leq(std::span<const double> a, std::span<const double> b) const {
    require_dimension(a.size());
    require_dimension(b.size());
    for (std::size_t i = 0; i < signs_.size(); ++i) {
        if (signs_[i] * (b[i] - a[i]) < 0.0) return false;
    }
    return true;
}

bool OrderCone::ll(std::span<const double> a, std::span<const double> b) const {
    require_dimension(a.size());
    require_dimension(b.size());
    for (std::size_t i = 0; i < signs_.size(); ++i) {
        if (signs_[i] * (b[i] - a[i]) <= 0.0) return false;
    }
    return true;
}

bool OrderCone::leq(double a, double b) const {
    require_dimension(1);
    return signs_[0] * (b - a) >= 0.0;
}

bool OrderCone::ll(double a, double b) const {
    require_dimension(1);
    return signs_[0] * (b - a) > 0.0;
}

bool is_totally_ordered(const OrderCone& cone,
                        std::span<const std::vector<double>> points) {
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (!cone.ll(points[i], points[j]) && !cone.ll(points[j], points[i])) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace msgt
