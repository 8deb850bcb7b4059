#include "msgt/system.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "msgt/errors.hpp"

namespace msgt {

// ---------------------------------------------------------------------------
// PiecewiseLinearFn
// ---------------------------------------------------------------------------

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<std::array<double, 2>> vertices)
    : vertices_(std::move(vertices)) {
    if (vertices_.size() < 2) {
        throw InputError("piecewise-linear function needs at least two vertices");
    }
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        if (!(vertices_[i][0] >= vertices_[i - 1][0])) {
            throw InputError("piecewise-linear function vertices must have non-decreasing x");
        }
    }
    if (!(x_max() > x_min())) {
        throw InputError("piecewise-linear function has empty x-extent");
    }
}

double PiecewiseLinearFn::operator()(double x) const {
    const double span = x_max() - x_min();
    const double slack = 1e-9 * (1.0 + span);
    if (x < x_min() - slack || x > x_max() + slack) {
        throw DomainError("input " + std::to_string(x) + " outside piecewise-linear domain [" +
                          std::to_string(x_min()) + ", " + std::to_string(x_max()) + "]");
    }
    const double xc = std::clamp(x, x_min(), x_max());
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        const auto& a = vertices_[i - 1];
        const auto& b = vertices_[i];
        if (xc <= b[0] || i + 1 == vertices_.size()) {
            if (b[0] == a[0]) return b[1];
            const double t = (xc - a[0]) / (b[0] - a[0]);
            return a[1] + t * (b[1] - a[1]);
        }
    }
    return vertices_.back()[1];
}

// ---------------------------------------------------------------------------
// SystemDef
// ---------------------------------------------------------------------------

double SystemDef::effective_input(double u) const {
    return input_transform ? (*input_transform)(u) : u;
}

void SystemDef::rhs_eval(std::span<const double> state, double input,
                         std::span<double> deriv) const {
    const double ue = effective_input(input);
    for (std::size_t i = 0; i < dim; ++i) {
        deriv[i] = rhs[i].eval(state, ue);
    }
}

double SystemDef::output_eval(std::span<const double> state) const {
    return output.eval(state, 0.0);
}

bool SystemDef::in_domain(std::span<const double> state) const {
    for (std::size_t i = 0; i < dim; ++i) {
        if (!state_domain[i].contains(state[i])) return false;
    }
    return true;
}

void SystemDef::validate() const {
    if (dim < 1) throw InputError("system dimension must be >= 1");
    if (rhs.size() != dim) {
        throw InputError("system '" + name + "': expected " + std::to_string(dim) +
                         " rhs expressions, got " + std::to_string(rhs.size()));
    }
    if (output.empty()) throw InputError("system '" + name + "': missing output expression");
    if (output.references_input()) {
        throw InputError("system '" + name + "': output must depend on the state only");
    }
    if (state_cone.dimension() != dim) {
        throw InputError("system '" + name + "': state cone dimension mismatch");
    }
    if (input_cone.dimension() != 1 || output_cone.dimension() != 1) {
        throw InputError("system '" + name + "': input and output cones must be scalar");
    }
    if (state_domain.size() != dim) {
        throw InputError("system '" + name + "': state domain dimension mismatch");
    }
    for (const auto& iv : state_domain) {
        if (!(iv.lo < iv.hi)) {
            throw InputError("system '" + name + "': empty state-domain interval");
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration parsing
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) tokens.push_back(tok);
    return tokens;
}

double parse_bound(const std::string& text, std::size_t line_no) {
    if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
    if (text == "-inf") return -std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("malformed bound '" + text + "'", line_no, 1);
    }
}

StateInterval parse_interval(const std::string& token, std::size_t line_no) {
    const auto sep = token.find("..");
    if (sep == std::string::npos) {
        throw ParseError("malformed state-domain interval '" + token + "' (expected lo..hi)",
                         line_no, 1);
    }
    StateInterval iv;
    iv.lo = parse_bound(token.substr(0, sep), line_no);
    iv.hi = parse_bound(token.substr(sep + 2), line_no);
    if (!(iv.lo < iv.hi)) {
        throw ParseError("empty state-domain interval '" + token + "'", line_no, 1);
    }
    return iv;
}

}  // namespace

SystemDef parse_system(std::string_view text) {
    SystemDef sys;
    bool have_dim = false;
    bool have_domain = false;
    bool have_state_cone = false;
    std::vector<bool> have_rhs;

    std::istringstream stream{std::string(text)};
    std::string raw_line;
    std::size_t line_no = 0;

    while (std::getline(stream, raw_line)) {
        ++line_no;
        if (auto hash = raw_line.find('#'); hash != std::string::npos) {
            raw_line.erase(hash);
        }

        // "rhs<i> =" and "output =" take the remainder of the line verbatim.
        auto tokens = tokenize(raw_line);
        if (tokens.empty()) continue;
        const std::string& key = tokens[0];

        auto expression_tail = [&](const std::string& keyword) -> std::string {
            auto pos = raw_line.find('=');
            if (pos == std::string::npos) {
                throw ParseError("expected '=' after '" + keyword + "'", line_no, 1);
            }
            return raw_line.substr(pos + 1);
        };

        if (key == "system") {
            if (tokens.size() != 2) throw ParseError("expected 'system <name>'", line_no, 1);
            sys.name = tokens[1];
        } else if (key == "dim") {
            if (tokens.size() != 2) throw ParseError("expected 'dim <n>'", line_no, 1);
            int n = std::atoi(tokens[1].c_str());
            if (n < 1) throw ParseError("dimension must be a positive integer", line_no, 1);
            sys.dim = static_cast<std::size_t>(n);
            have_dim = true;
            have_rhs.assign(sys.dim, false);
            sys.rhs.resize(sys.dim);
        } else if (key.rfind("rhs", 0) == 0) {
            if (!have_dim) throw ParseError("'dim' must precede rhs lines", line_no, 1);
            int idx = std::atoi(key.c_str() + 3);
            if (idx < 1 || static_cast<std::size_t>(idx) > sys.dim) {
                throw ParseError("rhs index out of range in '" + key + "'", line_no, 1);
            }
            try {
                sys.rhs[static_cast<std::size_t>(idx - 1)] =
                    Expression::parse(expression_tail(key), sys.dim);
            } catch (const ParseError& e) {
                throw ParseError(e.message(), line_no, e.column());
            }
            have_rhs[static_cast<std::size_t>(idx - 1)] = true;
        } else if (key == "output") {
            if (!have_dim) throw ParseError("'dim' must precede the output line", line_no, 1);
            try {
                sys.output = Expression::parse(expression_tail(key), sys.dim);
            } catch (const ParseError& e) {
                throw ParseError(e.message(), line_no, e.column());
            }
            if (sys.output.references_input()) {
                throw ParseError("output must depend on the state only", line_no, 1);
            }
        } else if (key == "state_domain") {
            if (!have_dim) throw ParseError("'dim' must precede state_domain", line_no, 1);
            if (tokens.size() != sys.dim + 1) {
                throw ParseError("state_domain needs one lo..hi interval per coordinate",
                                 line_no, 1);
            }
            sys.state_domain.clear();
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                sys.state_domain.push_back(parse_interval(tokens[i], line_no));
            }
            have_domain = true;
        } else if (key == "state_cone" || key == "input_cone" || key == "output_cone") {
            // Cone directives may share one line: state_cone ++ input_cone + output_cone -
            std::size_t i = 0;
            while (i < tokens.size()) {
                const std::string& k = tokens[i];
                if (k != "state_cone" && k != "input_cone" && k != "output_cone") {
                    throw ParseError("unexpected token '" + k + "' in cone line", line_no, 1);
                }
                if (i + 1 >= tokens.size()) {
                    throw ParseError("missing sign string after '" + k + "'", line_no, 1);
                }
                OrderCone cone = [&] {
                    try {
                        return OrderCone::parse(tokens[i + 1]);
                    } catch (const InputError& e) {
                        throw ParseError(e.what(), line_no, 1);
                    }
                }();
                if (k == "state_cone") {
                    if (have_dim && cone.dimension() != sys.dim) {
                        throw ParseError("state cone has wrong dimension", line_no, 1);
                    }
                    sys.state_cone = cone;
                    have_state_cone = true;
                } else if (k == "input_cone") {
                    if (cone.dimension() != 1) {
                        throw ParseError("input cone must be scalar", line_no, 1);
                    }
                    sys.input_cone = cone;
                } else {
                    if (cone.dimension() != 1) {
                        throw ParseError("output cone must be scalar", line_no, 1);
                    }
                    sys.output_cone = cone;
                }
                i += 2;
            }
        } else {
            throw ParseError("unknown directive '" + key + "'", line_no, 1);
        }
    }

    if (!have_dim) throw ParseError("missing 'dim' directive", line_no, 1);
    for (std::size_t i = 0; i < sys.dim; ++i) {
        if (!have_rhs[i]) {
            throw ParseError("missing rhs" + std::to_string(i + 1) + " line", line_no, 1);
        }
    }
    if (sys.output.empty()) throw ParseError("missing 'output' line", line_no, 1);
    if (!have_domain) {
        sys.state_domain.assign(sys.dim, StateInterval{});  // default [0, inf) per coordinate
    }
    if (!have_state_cone) sys.state_cone = OrderCone::standard(sys.dim);
    if (sys.name.empty()) sys.name = "unnamed";

    sys.validate();
    return sys;
}

SystemDef parse_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open system file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_system(buffer.str());
}

// ---------------------------------------------------------------------------
// InputSignal
// ---------------------------------------------------------------------------

InputSignal InputSignal::constant(double value) {
    if (!std::isfinite(value)) throw InputError("input signal value must be finite");
    InputSignal s;
    s.kind_ = Kind::constant;
    s.values_ = {value};
    return s;
}

InputSignal InputSignal::piecewise_constant(std::vector<double> times,
                                            std::vector<double> values) {
    if (times.empty() || times.size() != values.size()) {
        throw InputError("piecewise-constant signal needs matching times and values");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
            throw InputError("input signal entries must be finite");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw InputError("input signal breakpoints must be strictly increasing");
        }
    }
    InputSignal s;
    s.kind_ = Kind::piecewise_constant;
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    s.breakpoints_.assign(s.times_.begin(), s.times_.end());
    return s;
}

InputSignal InputSignal::sampled(std::vector<double> times, std::vector<double> values) {
    if (times.size() < 2 || times.size() != values.size()) {
        throw InputError("sampled signal needs at least two matching samples");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
            throw InputError("input signal entries must be finite");
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            throw InputError("sample times must be strictly increasing");
        }
    }
    InputSignal s;
    s.kind_ = Kind::sampled;
    s.times_ = std::move(times);
    s.values_ = std::move(values);
    s.breakpoints_.assign(s.times_.begin(), s.times_.end());
    return s;
}

double InputSignal::operator()(double t) const {
    switch (kind_) {
        case Kind::constant:
            return values_[0];
        case Kind::piecewise_constant: {
            auto it = std::upper_bound(times_.begin(), times_.end(), t);
            if (it == times_.begin()) return values_.front();
            return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
        }
        case Kind::sampled: {
            if (t <= times_.front()) return values_.front();
            if (t >= times_.back()) return values_.back();
            auto it = std::upper_bound(times_.begin(), times_.end(), t);
            std::size_t j = static_cast<std::size_t>(it - times_.begin());
            double t0 = times_[j - 1], t1 = times_[j];
            double v0 = values_[j - 1], v1 = values_[j];
            return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
        }
    }
    return values_[0];
}

std::string InputSignal::describe() const {
    switch (kind_) {
        case Kind::constant:
            return "const:" + std::to_string(values_[0]);
        case Kind::piecewise_constant:
            return "pwc[" + std::to_string(values_.size()) + " pieces]";
        case Kind::sampled:
            return "sampled[" + std::to_string(values_.size()) + " points]";
    }
    return "signal";
}

}  // namespace msgt
