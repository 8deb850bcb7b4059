#include "msgt/registry.hpp"

#include <cmath>
#include <sstream>

#include "msgt/errors.hpp"

namespace msgt {

namespace {

// The running example: x drives through w with a gain that saturates, z is a
// cubic relaxation with two folds. P(z) = z(2z^2 - 9z + 12).

SystemDef sec5_x_subsystem() {
    SystemDef sys;
    sys.name = "sec5-x";
    sys.dim = 1;
    sys.rhs = {Expression::parse("-x1 + 5 + u", 1)};
    sys.output = Expression::parse("x1", 1);
    sys.state_cone = OrderCone::standard(1);
    sys.input_cone = OrderCone::standard(1);
    sys.output_cone = OrderCone::standard(1);
    sys.state_domain = {StateInterval{0.0, std::numeric_limits<double>::infinity()}};
    return sys;
}

SystemDef sec5_z_subsystem(bool identity_output) {
    SystemDef sys;
    sys.name = identity_output ? "sec5p-z" : "sec5-z";
    sys.dim = 1;
    sys.rhs = {Expression::parse("-(x1*(2*x1^2 - 9*x1 + 12)) + u", 1)};
    sys.output = identity_output ? Expression::parse("x1", 1)
                                 : Expression::parse("1/(1+x1^2)", 1);
    sys.state_cone = OrderCone::standard(1);
    sys.input_cone = OrderCone::standard(1);
    sys.output_cone = identity_output ? OrderCone::standard(1) : OrderCone::opposite(1);
    sys.state_domain = {StateInterval{0.0, std::numeric_limits<double>::infinity()}};
    return sys;
}

SystemDef sec5p_x_subsystem() {
    SystemDef sys;
    sys.name = "sec5p-x";
    sys.dim = 1;
    sys.rhs = {Expression::parse("-x1 + 5 + 1/(1+u^2)", 1)};
    sys.output = Expression::parse("x1", 1);
    sys.state_cone = OrderCone::standard(1);
    // The saturating drive decreases in the raw input, so monotonicity holds
    // with the opposite order on the input channel.
    sys.input_cone = OrderCone::opposite(1);
    sys.output_cone = OrderCone::standard(1);
    sys.state_domain = {StateInterval{0.0, std::numeric_limits<double>::infinity()}};
    return sys;
}

SystemDef multiequil_x_subsystem() {
    SystemDef sys;
    sys.name = "multiequil-x";
    sys.dim = 1;
    sys.rhs = {Expression::parse("-x1 + u", 1)};
    sys.output = Expression::parse("x1", 1);
    sys.state_cone = OrderCone::standard(1);
    // The drive enters through the decreasing polyline R, so the subsystem is
    // monotone with the opposite order on its input.
    sys.input_cone = OrderCone::opposite(1);
    sys.output_cone = OrderCone::standard(1);
    sys.state_domain = {StateInterval{0.0, std::numeric_limits<double>::infinity()}};
    sys.input_transform = PiecewiseLinearFn({{0.0, 5.0}, {0.5, 4.5}, {2.5, 4.5}, {3.5, 3.0}});
    return sys;
}

Interconnection make_sec5_original() {
    Interconnection ic;
    ic.name = "sec5-original";
    ic.sys_x = sec5_x_subsystem();
    ic.sys_z = sec5_z_subsystem(/*identity_output=*/false);
    ic.x_box = {0.0, 10.0};
    ic.z_box = {0.0, 5.0};
    ic.w_range = {0.0, 1.5};  // h_z maps into (0, 1]
    ic.y_range = {4.0, 7.0};  // k_y = 5 + w stays in (5, 6.5]
    ic.state_bound_offset = 6.0;
    return ic;
}

Interconnection make_sec5_positive_form() {
    Interconnection ic;
    ic.name = "sec5-positive-form";
    ic.sys_x = sec5p_x_subsystem();
    ic.sys_z = sec5_z_subsystem(/*identity_output=*/true);
    ic.x_box = {0.0, 10.0};
    ic.z_box = {0.0, 5.0};
    ic.w_range = {0.0, 8.0};
    ic.y_range = {0.0, 8.0};
    ic.state_bound_offset = 6.0;
    return ic;
}

Interconnection make_multiequil() {
    Interconnection ic;
    ic.name = "multiequil";
    ic.sys_x = multiequil_x_subsystem();
    ic.sys_z = sec5_z_subsystem(/*identity_output=*/true);
    ic.x_box = {0.0, 8.0};
    ic.z_box = {0.0, 3.4};
    ic.w_range = {0.0, 3.5};  // domain of R
    ic.y_range = {3.0, 5.0};  // range of R
    return ic;
}

std::optional<double> parse_zorro_eps(std::string_view name) {
    constexpr std::string_view prefix = "zorro-eps(";
    if (name.substr(0, prefix.size()) != prefix || name.back() != ')') return std::nullopt;
    const std::string inner(name.substr(prefix.size(), name.size() - prefix.size() - 1));
    try {
        std::size_t used = 0;
        const double eps = std::stod(inner, &used);
        if (used != inner.size() || !(eps >= 0.0)) return std::nullopt;
        return eps;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"sec5-original", "sec5-positive-form", "multiequil",
            "zorro",         "zorro-eps(E)",       "sec5-x",
            "sec5-z",        "sec5p-x",            "sec5p-z",
            "multiequil-x",  "multiequil-z"};
}

std::optional<Interconnection> builtin_interconnection(std::string_view name) {
    if (name == "sec5-original") return make_sec5_original();
    if (name == "sec5-positive-form") return make_sec5_positive_form();
    if (name == "multiequil") return make_multiequil();
    return std::nullopt;
}

std::optional<SystemDef> builtin_system(std::string_view name) {
    if (name == "sec5-x") return sec5_x_subsystem();
    if (name == "sec5-z") return sec5_z_subsystem(false);
    if (name == "sec5p-x") return sec5p_x_subsystem();
    if (name == "sec5p-z") return sec5_z_subsystem(true);
    if (name == "multiequil-x") return multiequil_x_subsystem();
    if (name == "multiequil-z") return sec5_z_subsystem(true);
    return std::nullopt;
}

MultiMapPtr builtin_multimap(std::string_view name) {
    if (name == "zorro") return make_zorro(0.0);
    if (auto eps = parse_zorro_eps(name)) return make_zorro(*eps);
    if (auto ic = builtin_interconnection(name)) {
        return compose_maps(characteristic_kw(*ic), characteristic_ky(*ic));
    }
    if (auto sys = builtin_system(name)) {
        // Input-state characteristic over a generous default window.
        return std::make_shared<CharacteristicMap>(*sys, false, Interval{0.0, 50.0});
    }
    return nullptr;
}

namespace {

[[noreturn]] void unknown_name(std::string_view name) {
    std::ostringstream out;
    out << "unknown example '" << name << "'; available:";
    for (const std::string& n : builtin_names()) out << " " << n;
    throw InputError(out.str());
}

}  // namespace

Interconnection require_interconnection(std::string_view name) {
    if (auto ic = builtin_interconnection(name)) return *ic;
    unknown_name(name);
}

MultiMapPtr require_multimap(std::string_view name) {
    if (MultiMapPtr map = builtin_multimap(name)) return map;
    unknown_name(name);
}

SystemDef require_system(std::string_view name) {
    if (auto sys = builtin_system(name)) return *sys;
    unknown_name(name);
}

std::string registry_listing() {
    std::ostringstream out;
    out << "sec5-original       negative-feedback interconnection: dx=-x+5+w, y=x; "
           "dz=-P(z)+y, w=1/(1+z^2)\n"
        << "sec5-positive-form  same loop rewritten with w=z and the saturating gain "
           "moved into the x-drive\n"
        << "multiequil          x-subsystem driven through the polyline R(w); three "
           "loop equilibria\n"
        << "zorro               inverted-Zorro multimap (period-2 orbits on [1/4, 1/2])\n"
        << "zorro-eps(E)        perturbed Zorro map, middle slope -(1+E), e.g. zorro-eps(1.5)\n"
        << "sec5-x, sec5-z, sec5p-x, sec5p-z, multiequil-x, multiequil-z\n"
        << "                    subsystems of the above, usable wherever a system is "
           "expected\n";
    return out.str();
}

}  // namespace msgt
