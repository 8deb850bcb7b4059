#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace msgt {

/// Rational arithmetic expression over state variables x1..xn and the scalar
/// input u.
///
/// Grammar:
///   expr   := term (("+" | "-") term)*
///   term   := factor (("*" | "/") factor)*
///   factor := atom ("^" integer)?
///   atom   := number | "x"integer | "u" | "(" expr ")" | "-" atom
///
/// Integer powers are computed by repeated multiplication. Division by zero
/// raises EvalError carrying the offending subexpression text.
class Expression {
public:
    Expression() = default;

    /// Parses `text`; referenced state indices must not exceed `dimension`.
    static Expression parse(std::string_view text, std::size_t dimension);

    double eval(std::span<const double> state, double input) const;

    bool references_input() const noexcept { return uses_input_; }
    /// Highest state index referenced (1-based); 0 when no state variable appears.
    std::size_t max_state_index() const noexcept { return max_state_index_; }
    const std::string& text() const noexcept { return text_; }
    bool empty() const noexcept { return nodes_.empty(); }

private:
    enum class Op : std::uint8_t { number, state_var, input_var, add, sub, mul, div, neg, pow };

    struct Node {
        Op op;
        double value = 0.0;  // number literal
        int index = 0;       // 1-based state index, or integer exponent for pow
        int src_begin = 0;   // slice of text_ covered by this subexpression
        int src_end = 0;
    };

    // Nodes are stored in evaluation (postfix) order: operands precede operators.
    std::vector<Node> nodes_;
    std::string text_;
    bool uses_input_ = false;
    std::size_t max_state_index_ = 0;

    std::string node_text(const Node& n) const;

    friend class ExprParser;
};

}  // namespace msgt
