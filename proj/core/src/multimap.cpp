#include "msgt/multimap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "msgt/charmap.hpp"
#include "msgt/errors.hpp"

namespace msgt {

std::vector<double> dedup_sorted(std::vector<double> values, double tol) {
    std::sort(values.begin(), values.end());
    std::vector<double> out;
    for (double v : values) {
        if (out.empty() || v - out.back() > tol) out.push_back(v);
    }
    return out;
}

// ---------------------------------------------------------------------------
// PiecewiseLinearMap
// ---------------------------------------------------------------------------

PiecewiseLinearMap::PiecewiseLinearMap(std::vector<std::array<double, 2>> vertices,
                                       std::string name)
    : vertices_(std::move(vertices)), name_(std::move(name)) {
    if (vertices_.size() < 2) {
        throw InputError("piecewise-linear map needs at least two vertices");
    }
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        if (vertices_[i] == vertices_[i - 1]) {
            throw InputError("piecewise-linear map has repeated consecutive vertices");
        }
    }
}

Interval PiecewiseLinearMap::domain() const {
    double lo = vertices_.front()[0];
    double hi = lo;
    for (const auto& v : vertices_) {
        lo = std::min(lo, v[0]);
        hi = std::max(hi, v[0]);
    }
    return Interval{lo, hi};
}

double PiecewiseLinearMap::segment_slope(std::size_t i) const {
    const auto& a = vertices_[i];
    const auto& b = vertices_[i + 1];
    if (b[0] == a[0]) {
        throw InputError("vertical segment has no slope");
    }
    return (b[1] - a[1]) / (b[0] - a[0]);
}

std::vector<double> PiecewiseLinearMap::values(double input) const {
    const Interval dom = domain();
    const double slack = 1e-12 * (1.0 + std::abs(dom.hi - dom.lo));
    if (!dom.contains(input, slack)) {
        throw DomainError(describe() + ": input " + std::to_string(input) +
                          " outside domain [" + std::to_string(dom.lo) + ", " +
                          std::to_string(dom.hi) + "]");
    }

    std::vector<double> hits;
    for (std::size_t i = 0; i + 1 < vertices_.size(); ++i) {
        const auto& a = vertices_[i];
        const auto& b = vertices_[i + 1];
        const double xlo = std::min(a[0], b[0]);
        const double xhi = std::max(a[0], b[0]);
        if (input < xlo - slack || input > xhi + slack) continue;
        if (xhi == xlo) {
            // Vertical segment: report both endpoint values.
            hits.push_back(a[1]);
            hits.push_back(b[1]);
            continue;
        }
        const double t = std::clamp((input - a[0]) / (b[0] - a[0]), 0.0, 1.0);
        hits.push_back(a[1] + t * (b[1] - a[1]));
    }
    hits = dedup_sorted(std::move(hits), dedup_tol());
    if (hits.empty()) {
        throw DomainError(describe() + ": no value at " + std::to_string(input));
    }
    return hits;
}

std::shared_ptr<const PiecewiseLinearMap> make_zorro(double epsilon) {
    if (epsilon < 0.0) throw InputError("zorro perturbation must be >= 0");
    const double mid_x = epsilon == 0.0 ? 0.25 : (1.0 + 2.0 * epsilon) / (4.0 + 4.0 * epsilon);
    std::vector<std::array<double, 2>> vertices{
        {0.0, 0.0}, {0.5, 0.25}, {mid_x, 0.5}, {1.0, 1.0}};
    std::string name = epsilon == 0.0 ? "zorro" : "zorro-eps(" + std::to_string(epsilon) + ")";
    return std::make_shared<PiecewiseLinearMap>(std::move(vertices), std::move(name));
}

// ---------------------------------------------------------------------------
// CharacteristicMap
// ---------------------------------------------------------------------------

CharacteristicMap::CharacteristicMap(SystemDef sys, bool through_output, Interval input_domain,
                                     CharacteristicOptions opts)
    : sys_(std::move(sys)), through_output_(through_output), input_domain_(input_domain),
      opts_(opts) {
    sys_.validate();
    if (sys_.dim != 1) {
        throw InputError("characteristic map needs a scalar-state system; got dimension " +
                         std::to_string(sys_.dim));
    }
    if (sys_.input_transform) {
        input_domain_.lo = std::max(input_domain_.lo, sys_.input_transform->x_min());
        input_domain_.hi = std::min(input_domain_.hi, sys_.input_transform->x_max());
    }
}

std::vector<double> CharacteristicMap::values(double input) const {
    if (!input_domain_.contains(input, 1e-12 * (1.0 + std::abs(input)))) {
        throw DomainError(describe() + ": input " + std::to_string(input) +
                          " outside domain [" + std::to_string(input_domain_.lo) + ", " +
                          std::to_string(input_domain_.hi) + "]");
    }
    std::vector<EquilibriumPair> eq = equilibria_at_input(sys_, input, opts_);
    std::vector<double> out;
    out.reserve(eq.size());
    for (const auto& e : eq) {
        out.push_back(through_output_ ? sys_.output_eval(e.state) : e.state[0]);
    }
    return dedup_sorted(std::move(out), opts_.dedup_tol);
}

std::string CharacteristicMap::describe() const {
    return std::string(through_output_ ? "i/o characteristic of " : "i/s characteristic of ") +
           sys_.name;
}

// ---------------------------------------------------------------------------
// ClosedFormMap
// ---------------------------------------------------------------------------

ClosedFormMap::ClosedFormMap(Expression formula, Interval domain, std::string name)
    : formula_(std::move(formula)), domain_(domain), name_(std::move(name)) {}

std::vector<double> ClosedFormMap::values(double input) const {
    if (!domain_.contains(input, 1e-12 * (1.0 + std::abs(input)))) {
        throw DomainError(describe() + ": input " + std::to_string(input) + " outside domain");
    }
    return {formula_.eval({}, input)};
}

std::string ClosedFormMap::describe() const {
    return name_.empty() ? "{" + formula_.text() + "}" : name_;
}

// ---------------------------------------------------------------------------
// CompositionMap
// ---------------------------------------------------------------------------

CompositionMap::CompositionMap(MultiMapPtr outer, MultiMapPtr inner)
    : outer_(std::move(outer)), inner_(std::move(inner)) {
    if (!outer_ || !inner_) throw InputError("composition of null maps");
}

double CompositionMap::dedup_tol() const {
    return std::max(outer_->dedup_tol(), inner_->dedup_tol());
}

std::vector<double> CompositionMap::values(double input) const {
    const std::vector<double> mids = inner_->values(input);
    const Interval outer_dom = outer_->domain();
    std::vector<double> out;
    for (double v : mids) {
        if (!outer_dom.contains(v, 1e-12 * (1.0 + std::abs(v)))) {
            throw DomainError("composition: inner value " + std::to_string(v) +
                              " outside the domain of " + outer_->describe());
        }
        for (double w : outer_->values(v)) out.push_back(w);
    }
    return dedup_sorted(std::move(out), dedup_tol());
}

std::string CompositionMap::describe() const {
    return outer_->describe() + " o " + inner_->describe();
}

MultiMapPtr compose_maps(MultiMapPtr outer, MultiMapPtr inner) {
    return std::make_shared<CompositionMap>(std::move(outer), std::move(inner));
}

// ---------------------------------------------------------------------------
// CachedMap
// ---------------------------------------------------------------------------

std::vector<double> CachedMap::values(double input) const {
    const std::uint64_t key = std::bit_cast<std::uint64_t>(input);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    std::vector<double> v = inner_->values(input);
    cache_.emplace(key, v);
    return v;
}

}  // namespace msgt
