#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace fide {

/// Parse failure; carries the byte offset into the source text.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " (at position " + std::to_string(position) + ")"),
          position_(position) {}

    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Evaluation failure: a missing variable binding, or a subexpression that
/// produced a non-finite value.
class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arithmetic expression over a declared set of variables.
///
/// Grammar (whitespace insignificant, no implicit multiplication):
///
///   expr  := term (("+"|"-") term)*
///   term  := unary (("*"|"/") unary)*
///   unary := "-" unary | power
///   power := atom ("^" unary)?
///   atom  := number | name | name "(" expr ")" | "(" expr ")"
///
/// so "^" is right-associative and binds tighter than unary minus, which
/// binds tighter than "*" and "/". Functions: sin cos exp sqrt abs log
/// (all unary). Named constants: pi, e.
///
/// "^" with an integral exponent of magnitude <= 64 is computed by repeated
/// multiplication; other exponents go through std::pow.
///
/// Immutable after parsing; eval is pure.
class Expr {
public:
    /// Parse source against a declared variable list. Every identifier in
    /// the source must be a declared variable, a named constant, or a
    /// function applied to an argument.
    static Expr parse(std::string_view source, const std::vector<std::string>& allowed_vars) {
        Expr e;
        e.vars_ = allowed_vars;
        for (std::size_t i = 0; i < allowed_vars.size(); ++i) {
            const std::string& v = allowed_vars[i];
            if (v.empty()) throw std::invalid_argument("Expr::parse: empty variable name");
            if (function_id(v) >= 0 || v == "pi" || v == "e")
                throw std::invalid_argument("Expr::parse: variable name '" + v +
                                            "' collides with a built-in name");
            for (std::size_t j = 0; j < i; ++j)
                if (allowed_vars[j] == v)
                    throw std::invalid_argument("Expr::parse: duplicate variable name '" + v + "'");
        }
        Parser p{source, e, 0};
        p.skip_ws();
        if (p.at_end()) throw ParseError("empty expression", 0);
        e.root_ = p.parse_expr();
        p.skip_ws();
        if (!p.at_end())
            throw ParseError("unexpected trailing input '" + std::string(1, p.peek()) + "'",
                             p.pos);
        return e;
    }

    /// Evaluate with values aligned to the declared variable list.
    double eval(std::span<const double> values) const {
        if (values.size() != vars_.size())
            throw EvalError("eval: expected " + std::to_string(vars_.size()) +
                            " variable values, got " + std::to_string(values.size()));
        return eval_node(root_, values);
    }

    /// Evaluate with named bindings; every declared variable used by the
    /// expression must be bound.
    double eval(const std::map<std::string, double>& bindings) const {
        std::vector<double> values(vars_.size(), 0.0);
        std::vector<bool> bound(vars_.size(), false);
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            auto it = bindings.find(vars_[i]);
            if (it != bindings.end()) {
                values[i] = it->second;
                bound[i] = true;
            }
        }
        for (const Node& nd : nodes_)
            if (nd.kind == NodeKind::variable && !bound[static_cast<std::size_t>(nd.index)])
                throw EvalError("missing binding for variable '" +
                                vars_[static_cast<std::size_t>(nd.index)] + "'");
        return eval_node(root_, values);
    }

    /// Render back to source form with minimal parentheses. Reparsing the
    /// result reconstructs the same tree.
    std::string to_string() const { return print_node(root_, 0); }

    const std::vector<std::string>& variables() const { return vars_; }

private:
    enum class NodeKind : unsigned char {
        number,
        constant,  // pi or e
        variable,
        negate,
        add,
        sub,
        mul,
        div,
        pow,
        call
    };

    struct Node {
        NodeKind kind;
        int func = -1;   // call: index into function table
        int index = -1;  // variable slot or constant id (0 = pi, 1 = e)
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

    static constexpr const char* function_names[6] = {"sin", "cos", "exp", "sqrt", "abs", "log"};

    static int function_id(std::string_view name) {
        for (int i = 0; i < 6; ++i)
            if (name == function_names[i]) return i;
        return -1;
    }

    int add_node(Node nd) {
        nodes_.push_back(nd);
        return static_cast<int>(nodes_.size()) - 1;
    }

    // --- parsing ------------------------------------------------------

    struct Parser {
        std::string_view src;
        Expr& e;
        std::size_t pos;

        bool at_end() const { return pos >= src.size(); }
        char peek() const { return src[pos]; }

        void skip_ws() {
            while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos;
        }

        bool consume(char c) {
            skip_ws();
            if (!at_end() && peek() == c) {
                ++pos;
                return true;
            }
            return false;
        }

        int parse_expr() {
            int lhs = parse_term();
            for (;;) {
                skip_ws();
                if (consume('+'))
                    lhs = e.add_node({NodeKind::add, -1, -1, 0.0, lhs, parse_term()});
                else if (consume('-'))
                    lhs = e.add_node({NodeKind::sub, -1, -1, 0.0, lhs, parse_term()});
                else
                    return lhs;
            }
        }

        int parse_term() {
            int lhs = parse_unary();
            for (;;) {
                skip_ws();
                if (consume('*'))
                    lhs = e.add_node({NodeKind::mul, -1, -1, 0.0, lhs, parse_unary()});
                else if (consume('/'))
                    lhs = e.add_node({NodeKind::div, -1, -1, 0.0, lhs, parse_unary()});
                else
                    return lhs;
            }
        }

        int parse_unary() {
            if (consume('-')) return e.add_node({NodeKind::negate, -1, -1, 0.0, parse_unary(), -1});
            return parse_power();
        }

        int parse_power() {
            int base = parse_atom();
            skip_ws();
            if (consume('^'))
                return e.add_node({NodeKind::pow, -1, -1, 0.0, base, parse_unary()});
            return base;
        }

        int parse_atom() {
            skip_ws();
            if (at_end()) throw ParseError("unexpected end of input", pos);
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
            if (consume('(')) {
                int inner = parse_expr();
                if (!consume(')')) throw ParseError("expected ')'", pos);
                return inner;
            }
            throw ParseError(std::string("expected a number, name, or '(', got '") + c + "'", pos);
        }

        int parse_number() {
            const std::size_t start = pos;
            // strtod on the zero-copy tail; reject leading signs (handled by
            // the unary rule) by construction since we arrive on digit/'.'.
            std::string tail(src.substr(pos));
            char* endp = nullptr;
            const double v = std::strtod(tail.c_str(), &endp);
            const std::size_t used = static_cast<std::size_t>(endp - tail.c_str());
            if (used == 0) throw ParseError("malformed number", start);
            pos += used;
            Node nd{NodeKind::number, -1, -1, v, -1, -1};
            return e.add_node(nd);
        }

        int parse_name() {
            const std::size_t start = pos;
            while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                ++pos;
            const std::string name(src.substr(start, pos - start));
            skip_ws();
            if (!at_end() && peek() == '(') {
                const int fid = function_id(name);
                if (fid < 0) throw ParseError("unknown function '" + name + "'", start);
                ++pos;  // '('
                int arg = parse_expr();
                skip_ws();
                if (!at_end() && peek() == ',')
                    throw ParseError("function '" + name + "' takes exactly one argument", pos);
                if (!consume(')')) throw ParseError("expected ')'", pos);
                return e.add_node({NodeKind::call, fid, -1, 0.0, arg, -1});
            }
            if (name == "pi")
                return e.add_node({NodeKind::constant, -1, 0, 3.14159265358979323846, -1, -1});
            if (name == "e")
                return e.add_node({NodeKind::constant, -1, 1, 2.71828182845904523536, -1, -1});
            for (std::size_t i = 0; i < e.vars_.size(); ++i)
                if (e.vars_[i] == name)
                    return e.add_node(
                        {NodeKind::variable, -1, static_cast<int>(i), 0.0, -1, -1});
            if (function_id(name) >= 0)
                throw ParseError("function '" + name + "' used without an argument list", start);
            throw ParseError("unknown identifier '" + name + "'", start);
        }
    };

    // --- evaluation ---------------------------------------------------

    static double integer_pow(double base, long long n) {
        double r = 1.0;
        for (long long k = 0; k < n; ++k) r *= base;
        return r;
    }

    static double pow_value(double base, double exponent) {
        if (exponent == std::floor(exponent) && std::abs(exponent) <= 64.0) {
            const long long n = static_cast<long long>(exponent);
            const double p = integer_pow(base, n < 0 ? -n : n);
            return n < 0 ? 1.0 / p : p;
        }
        return std::pow(base, exponent);
    }

    double finite_or_throw(double v, int idx) const {
        if (!std::isfinite(v))
            throw EvalError("non-finite value in '" + print_node(idx, 0) + "'");
        return v;
    }

    double eval_node(int idx, std::span<const double> values) const {
        const Node& nd = nodes_[static_cast<std::size_t>(idx)];
        switch (nd.kind) {
            case NodeKind::number:
            case NodeKind::constant:
                return nd.value;
            case NodeKind::variable:
                return values[static_cast<std::size_t>(nd.index)];
            case NodeKind::negate:
                return -eval_node(nd.lhs, values);
            case NodeKind::add:
                return finite_or_throw(eval_node(nd.lhs, values) + eval_node(nd.rhs, values), idx);
            case NodeKind::sub:
                return finite_or_throw(eval_node(nd.lhs, values) - eval_node(nd.rhs, values), idx);
            case NodeKind::mul:
                return finite_or_throw(eval_node(nd.lhs, values) * eval_node(nd.rhs, values), idx);
            case NodeKind::div:
                return finite_or_throw(eval_node(nd.lhs, values) / eval_node(nd.rhs, values), idx);
            case NodeKind::pow:
                return finite_or_throw(
                    pow_value(eval_node(nd.lhs, values), eval_node(nd.rhs, values)), idx);
            case NodeKind::call: {
                const double a = eval_node(nd.lhs, values);
                double v = 0.0;
                switch (nd.func) {
                    case 0: v = std::sin(a); break;
                    case 1: v = std::cos(a); break;
                    case 2: v = std::exp(a); break;
                    case 3: v = std::sqrt(a); break;
                    case 4: v = std::abs(a); break;
                    case 5: v = std::log(a); break;
                }
                return finite_or_throw(v, idx);
            }
        }
        throw EvalError("corrupt expression tree");
    }

    // --- printing -----------------------------------------------------

    static std::string format_double(double v) {
        char buf[40];
        for (int prec = 15; prec <= 17; ++prec) {
            std::snprintf(buf, sizeof buf, "%.*g", prec, v);
            if (std::strtod(buf, nullptr) == v) break;
        }
        return buf;
    }

    // Binding strength for printing: add/sub 1, mul/div 2, negate 3, pow 4,
    // atoms 5. A child is parenthesized when its own level is below what the
    // parent position requires, which reconstructs the tree exactly.
    std::string print_node(int idx, int required) const {
        const Node& nd = nodes_[static_cast<std::size_t>(idx)];
        std::string out;
        int level = 5;
        switch (nd.kind) {
            case NodeKind::number: out = format_double(nd.value); break;
            case NodeKind::constant: out = nd.index == 0 ? "pi" : "e"; break;
            case NodeKind::variable: out = vars_[static_cast<std::size_t>(nd.index)]; break;
            case NodeKind::negate:
                out = "-" + print_node(nd.lhs, 4);
                level = 3;
                break;
            case NodeKind::add:
                out = print_node(nd.lhs, 1) + " + " + print_node(nd.rhs, 2);
                level = 1;
                break;
            case NodeKind::sub:
                out = print_node(nd.lhs, 1) + " - " + print_node(nd.rhs, 2);
                level = 1;
                break;
            case NodeKind::mul:
                out = print_node(nd.lhs, 2) + "*" + print_node(nd.rhs, 3);
                level = 2;
                break;
            case NodeKind::div:
                out = print_node(nd.lhs, 2) + "/" + print_node(nd.rhs, 3);
                level = 2;
                break;
            case NodeKind::pow:
                out = print_node(nd.lhs, 5) + "^" + print_node(nd.rhs, 3);
                level = 4;
                break;
            case NodeKind::call:
                out = std::string(function_names[nd.func]) + "(" + print_node(nd.lhs, 0) + ")";
                break;
        }
        if (level < required) return "(" + out + ")";
        return out;
    }

    std::vector<Node> nodes_;
    int root_ = -1;
    std::vector<std::string> vars_;
};

/// Free-function forms.
inline Expr parse(std::string_view source, const std::vector<std::string>& allowed_vars) {
    return Expr::parse(source, allowed_vars);
}

inline double eval(const Expr& e, const std::map<std::string, double>& bindings) {
    return e.eval(bindings);
}

}  // namespace fide
