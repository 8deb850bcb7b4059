#include "msgt/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

#include "msgt/errors.hpp"

namespace msgt {

namespace {

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

/// Recursive-descent parser producing postfix node order.
class ExprParser {
public:
    ExprParser(std::string_view text, std::size_t dimension, Expression& out)
        : text_(text), dim_(dimension), out_(out) {}

    void run() {
        out_.text_ = std::string(text_);
        skip_ws();
        if (at_end()) fail("empty expression");
        parse_expr();
        skip_ws();
        if (!at_end()) fail("unexpected trailing input");
    }

private:
    std::string_view text_;
    std::size_t dim_;
    Expression& out_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError(message, 1, pos_ + 1);
    }

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    void skip_ws() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        skip_ws();
        if (!at_end() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void push(Expression::Op op, double value, int index, int begin, int end) {
        Expression::Node n;
        n.op = op;
        n.value = value;
        n.index = index;
        n.src_begin = begin;
        n.src_end = end;
        out_.nodes_.push_back(n);
    }

    // Each parse_* returns the source offset where its subexpression began, so
    // parent nodes can record their full source slice.
    int parse_expr() {
        int begin = parse_term();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '+' || c == '-') {
                ++pos_;
                parse_term();
                push(c == '+' ? Expression::Op::add : Expression::Op::sub, 0.0, 0,
                     begin, static_cast<int>(pos_));
            } else {
                break;
            }
        }
        return begin;
    }

    int parse_term() {
        int begin = parse_factor();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c == '*' || c == '/') {
                ++pos_;
                parse_factor();
                push(c == '*' ? Expression::Op::mul : Expression::Op::div, 0.0, 0,
                     begin, static_cast<int>(pos_));
            } else {
                break;
            }
        }
        return begin;
    }

    int parse_factor() {
        int begin = parse_atom();
        skip_ws();
        if (peek() == '^') {
            ++pos_;
            int exponent = parse_integer();
            push(Expression::Op::pow, 0.0, exponent, begin, static_cast<int>(pos_));
        }
        return begin;
    }

    int parse_integer() {
        skip_ws();
        std::size_t start = pos_;
        if (peek() == '-') ++pos_;
        if (at_end() || std::isdigit(static_cast<unsigned char>(text_[pos_])) == 0) {
            fail("expected integer exponent after '^'");
        }
        while (!at_end() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return std::atoi(std::string(text_.substr(start, pos_ - start)).c_str());
    }

    int parse_atom() {
        skip_ws();
        int begin = static_cast<int>(pos_);
        if (at_end()) fail("unexpected end of expression");
        char c = peek();

        if (c == '(') {
            ++pos_;
            parse_expr();
            if (!consume(')')) fail("expected ')'");
            return begin;
        }
        if (c == '-') {
            ++pos_;
            parse_atom();
            push(Expression::Op::neg, 0.0, 0, begin, static_cast<int>(pos_));
            return begin;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t start = pos_;
            while (!at_end() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.'))
                ++pos_;
            if (!at_end() && (peek() == 'e' || peek() == 'E')) {
                std::size_t mark = pos_;
                ++pos_;
                if (!at_end() && (peek() == '+' || peek() == '-')) ++pos_;
                if (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) {
                    while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
                } else {
                    pos_ = mark;  // 'e' did not start an exponent
                }
            }
            char* parse_end = nullptr;
            std::string token(text_.substr(start, pos_ - start));
            double value = std::strtod(token.c_str(), &parse_end);
            if (parse_end == token.c_str() || *parse_end != '\0') {
                fail("malformed number '" + token + "'");
            }
            push(Expression::Op::number, value, 0, begin, static_cast<int>(pos_));
            return begin;
        }
        if (c == 'u') {
            std::size_t next = pos_ + 1;
            if (next < text_.size() && is_ident_char(text_[next])) {
                fail("unknown identifier");
            }
            ++pos_;
            out_.uses_input_ = true;
            push(Expression::Op::input_var, 0.0, 0, begin, static_cast<int>(pos_));
            return begin;
        }
        if (c == 'x') {
            std::size_t start = pos_ + 1;
            std::size_t end = start;
            while (end < text_.size() && std::isdigit(static_cast<unsigned char>(text_[end]))) ++end;
            if (end == start) fail("expected index after 'x'");
            if (end < text_.size() && is_ident_char(text_[end])) fail("unknown identifier");
            int index = std::atoi(std::string(text_.substr(start, end - start)).c_str());
            if (index < 1 || static_cast<std::size_t>(index) > dim_) {
                fail("unknown variable x" + std::to_string(index) + ": system dimension is " +
                     std::to_string(dim_));
            }
            pos_ = end;
            out_.max_state_index_ = std::max(out_.max_state_index_, static_cast<std::size_t>(index));
            push(Expression::Op::state_var, 0.0, index, begin, static_cast<int>(pos_));
            return begin;
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

Expression Expression::parse(std::string_view text, std::size_t dimension) {
    Expression e;
    ExprParser parser(text, dimension, e);
    parser.run();
    return e;
}

std::string Expression::node_text(const Node& n) const {
    if (n.src_begin < 0 || n.src_end <= n.src_begin ||
        static_cast<std::size_t>(n.src_end) > text_.size()) {
        return text_;
    }
    return text_.substr(static_cast<std::size_t>(n.src_begin),
                        static_cast<std::size_t>(n.src_end - n.src_begin));
}

double Expression::eval(std::span<const double> state, double input) const {
    if (nodes_.empty()) throw EvalError("evaluating empty expression");
    if (max_state_index_ > state.size()) {
        throw InputError("expression references x" + std::to_string(max_state_index_) +
                         " but state has " + std::to_string(state.size()) + " coordinates");
    }

    thread_local std::vector<double> stack;
    stack.clear();

    for (const Node& n : nodes_) {
        switch (n.op) {
            case Op::number:
                stack.push_back(n.value);
                break;
            case Op::state_var:
                stack.push_back(state[static_cast<std::size_t>(n.index - 1)]);
                break;
            case Op::input_var:
                stack.push_back(input);
                break;
            case Op::neg:
                stack.back() = -stack.back();
                break;
            case Op::pow: {
                double base = stack.back();
                int exponent = n.index;
                bool invert = exponent < 0;
                if (invert && base == 0.0) {
                    throw EvalError("division by zero in '" + node_text(n) + "'");
                }
                int k = invert ? -exponent : exponent;
                double r = 1.0;
                for (int i = 0; i < k; ++i) r *= base;
                stack.back() = invert ? 1.0 / r : r;
                break;
            }
            default: {
                double rhs = stack.back();
                stack.pop_back();
                double& lhs = stack.back();
                switch (n.op) {
                    case Op::add: lhs += rhs; break;
                    case Op::sub: lhs -= rhs; break;
                    case Op::mul: lhs *= rhs; break;
                    case Op::div:
                        if (rhs == 0.0) {
                            throw EvalError("division by zero in '" + node_text(n) + "'");
                        }
                        lhs /= rhs;
                        break;
                    default: break;
                }
                break;
            }
        }
    }
    double result = stack.back();
    if (!std::isfinite(result)) {
        throw EvalError("non-finite value from '" + text_ + "'");
    }
    return result;
}

}  // namespace msgt
