#pragma once

// Test-side reference for the expression module: a tiny independent AST
// with its own recursive evaluator (std::pow for every '^'), plus a random
// generator that renders trees to fully parenthesized source text.

#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace expr_ref {

struct RefNode {
    enum Kind { number, variable, negate, add, sub, mul, div, pow, call } kind;
    double value = 0.0;        // number
    int var = 0;               // variable index
    int func = 0;              // 0 sin, 1 cos, 2 exp, 3 sqrt, 4 abs, 5 log
    std::unique_ptr<RefNode> a, b;
};

inline const char* func_name(int f) {
    static const char* names[6] = {"sin", "cos", "exp", "sqrt", "abs", "log"};
    return names[f];
}

inline double eval(const RefNode& nd, const std::vector<double>& vars) {
    switch (nd.kind) {
        case RefNode::number: return nd.value;
        case RefNode::variable: return vars[static_cast<std::size_t>(nd.var)];
        case RefNode::negate: return -eval(*nd.a, vars);
        case RefNode::add: return eval(*nd.a, vars) + eval(*nd.b, vars);
        case RefNode::sub: return eval(*nd.a, vars) - eval(*nd.b, vars);
        case RefNode::mul: return eval(*nd.a, vars) * eval(*nd.b, vars);
        case RefNode::div: return eval(*nd.a, vars) / eval(*nd.b, vars);
        case RefNode::pow: return std::pow(eval(*nd.a, vars), eval(*nd.b, vars));
        case RefNode::call: {
            const double x = eval(*nd.a, vars);
            switch (nd.func) {
                case 0: return std::sin(x);
                case 1: return std::cos(x);
                case 2: return std::exp(x);
                case 3: return std::sqrt(x);
                case 4: return std::abs(x);
                default: return std::log(x);
            }
        }
    }
    return 0.0;
}

inline std::string render(const RefNode& nd, const std::vector<std::string>& var_names) {
    switch (nd.kind) {
        case RefNode::number: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", nd.value);
            return buf;
        }
        case RefNode::variable: return var_names[static_cast<std::size_t>(nd.var)];
        case RefNode::negate: return "(-" + render(*nd.a, var_names) + ")";
        case RefNode::add:
            return "(" + render(*nd.a, var_names) + "+" + render(*nd.b, var_names) + ")";
        case RefNode::sub:
            return "(" + render(*nd.a, var_names) + "-" + render(*nd.b, var_names) + ")";
        case RefNode::mul:
            return "(" + render(*nd.a, var_names) + "*" + render(*nd.b, var_names) + ")";
        case RefNode::div:
            return "(" + render(*nd.a, var_names) + "/" + render(*nd.b, var_names) + ")";
        case RefNode::pow:
            return "(" + render(*nd.a, var_names) + "^" + render(*nd.b, var_names) + ")";
        case RefNode::call:
            return std::string(func_name(nd.func)) + "(" + render(*nd.a, var_names) + ")";
    }
    return "";
}

/// Random tree over the given number of variables. Exponents are small
/// integer literals so the reference stays finite most of the time.
inline std::unique_ptr<RefNode> generate(std::mt19937& rng, int n_vars, int depth) {
    std::uniform_int_distribution<int> pick(0, 99);
    std::uniform_real_distribution<double> num(0.0, 10.0);
    auto node = std::make_unique<RefNode>();
    const int roll = pick(rng);
    if (depth <= 0 || roll < 30) {
        if (roll % 2 == 0 && n_vars > 0) {
            node->kind = RefNode::variable;
            node->var = pick(rng) % n_vars;
        } else {
            node->kind = RefNode::number;
            node->value = num(rng);
        }
        return node;
    }
    if (roll < 40) {
        node->kind = RefNode::negate;
        node->a = generate(rng, n_vars, depth - 1);
        return node;
    }
    if (roll < 50) {
        node->kind = RefNode::call;
        node->func = pick(rng) % 6;
        node->a = generate(rng, n_vars, depth - 1);
        return node;
    }
    if (roll < 60) {
        node->kind = RefNode::pow;
        node->a = generate(rng, n_vars, depth - 1);
        auto exponent = std::make_unique<RefNode>();
        exponent->kind = RefNode::number;
        exponent->value = static_cast<double>(pick(rng) % 5);  // 0..4
        node->b = std::move(exponent);
        return node;
    }
    node->kind = static_cast<RefNode::Kind>(RefNode::add + pick(rng) % 4);
    node->a = generate(rng, n_vars, depth - 1);
    node->b = generate(rng, n_vars, depth - 1);
    return node;
}

}  // namespace expr_ref
