#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fide/expression.hpp"
#include "fide/green.hpp"

namespace fide {

/// Ill-formed problem definition (bad config document, unknown builtin,
/// expression that fails to parse, deviation map leaving [0,1], ...).
class ProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The data of one boundary value problem
///
///   u''''(x) = f(x, u(x), u(phi(x)), (K0 u)(x), (K1 u)(x)),
///   u(0) = c1, u(1) = c2, u''(0) = c3, u''(1) = c4,
///
/// where (K0 u)(x) = \int_0^1 k0(x,t) u(t) dt and
/// (K1 u)(x) = \int_0^1 k1(x,t) u(phi(t)) dt.
struct ProblemSpec {
    std::string name;
    std::function<double(double, double, double, double, double)> f;  // f(x, u, y, v, z)
    std::function<double(double, double)> k0;                         // k0(x, t)
    std::function<double(double, double)> k1;                         // k1(x, t)
    std::function<double(double)> phi;                                // maps [0,1] into [0,1]
    BoundaryValues bv;
    std::function<double(double)> exact;  // empty when no closed form is known
    bool singular_at_zero = false;        // right-hand side blows up at x = 0

    bool has_exact() const { return static_cast<bool>(exact); }
};

/// Textual problem definition: expression sources plus boundary data.
/// Variable sets: f over {x,u,y,v,z}; k0, k1 over {x,t}; phi over {t};
/// exact over {x}.
struct ProblemConfig {
    std::string f;
    std::string k0;
    std::string k1;
    std::string phi;
    std::optional<std::string> exact;
    std::array<double, 4> bc{0.0, 0.0, 0.0, 0.0};
    bool singular_at_zero = false;
};

struct ValidationIssue {
    std::string check;    // which invariant failed
    std::string message;  // first offending point and value
};

struct ValidationReport {
    bool passed = true;
    std::vector<ValidationIssue> issues;
};

/// Sample-based sanity checks: phi maps [0,1] into [0,1]; f(x,0,0,0,0),
/// k0 and k1 evaluate finitely (x = 0 skipped for singular problems).
/// Failures are report entries, not exceptions.
inline ValidationReport validate(const ProblemSpec& spec, int samples = 1000) {
    if (samples < 100)
        throw std::invalid_argument("validate: need at least 100 samples, got " +
                                    std::to_string(samples));
    ValidationReport report;
    auto fail = [&report](const std::string& check, const std::string& message) {
        report.passed = false;
        report.issues.push_back({check, message});
    };

    constexpr double slack = 1e-12;
    for (int i = 0; i <= samples; ++i) {
        const double t = static_cast<double>(i) / samples;
        double pt = 0.0;
        try {
            pt = spec.phi(t);
        } catch (const EvalError& e) {
            fail("phi-range", "phi(" + std::to_string(t) + ") failed: " + e.what());
            break;
        }
        if (!std::isfinite(pt) || pt < -slack || pt > 1.0 + slack) {
            fail("phi-range",
                 "phi(" + std::to_string(t) + ") = " + std::to_string(pt) + " leaves [0,1]");
            break;
        }
    }

    for (int i = 0; i <= samples; ++i) {
        const double x = static_cast<double>(i) / samples;
        if (i == 0 && spec.singular_at_zero) continue;
        double v = 0.0;
        try {
            v = spec.f(x, 0.0, 0.0, 0.0, 0.0);
        } catch (const EvalError& e) {
            fail("f-finite", "f(" + std::to_string(x) + ",0,0,0,0) failed: " + e.what());
            break;
        }
        if (!std::isfinite(v)) {
            fail("f-finite", "f(" + std::to_string(x) + ",0,0,0,0) is not finite");
            break;
        }
    }

    int lattice = 1;
    while (lattice * lattice < samples) ++lattice;
    auto check_kernel = [&](const char* label,
                            const std::function<double(double, double)>& k) {
        for (int i = 0; i <= lattice; ++i) {
            for (int j = 0; j <= lattice; ++j) {
                const double x = static_cast<double>(i) / lattice;
                const double t = static_cast<double>(j) / lattice;
                double v = 0.0;
                try {
                    v = k(x, t);
                } catch (const EvalError& e) {
                    fail(label, std::string(label) + "(" + std::to_string(x) + "," +
                                    std::to_string(t) + ") failed: " + e.what());
                    return;
                }
                if (!std::isfinite(v)) {
                    fail(label, std::string(label) + "(" + std::to_string(x) + "," +
                                    std::to_string(t) + ") is not finite");
                    return;
                }
            }
        }
    };
    check_kernel("k0-finite", spec.k0);
    check_kernel("k1-finite", spec.k1);
    return report;
}

namespace detail {

inline Expr parse_field(const std::string& source, const std::string& field,
                        const std::vector<std::string>& vars) {
    try {
        return Expr::parse(source, vars);
    } catch (const ParseError& e) {
        throw ProblemError("field '" + field + "': " + e.what());
    }
}

}  // namespace detail

/// Build a ProblemSpec whose functions evaluate the config's expressions.
/// Parse failures carry the field name; a phi that leaves [0,1] or a
/// non-finite f/kernel sample is rejected.
inline ProblemSpec from_config(const ProblemConfig& cfg, const std::string& name = "config") {
    auto fe = std::make_shared<const Expr>(
        detail::parse_field(cfg.f, "f", {"x", "u", "y", "v", "z"}));
    auto k0e = std::make_shared<const Expr>(detail::parse_field(cfg.k0, "k0", {"x", "t"}));
    auto k1e = std::make_shared<const Expr>(detail::parse_field(cfg.k1, "k1", {"x", "t"}));
    auto phie = std::make_shared<const Expr>(detail::parse_field(cfg.phi, "phi", {"t"}));

    ProblemSpec spec;
    spec.name = name;
    spec.f = [fe](double x, double u, double y, double v, double z) {
        const std::array<double, 5> vals{x, u, y, v, z};
        return fe->eval(vals);
    };
    spec.k0 = [k0e](double x, double t) {
        const std::array<double, 2> vals{x, t};
        return k0e->eval(vals);
    };
    spec.k1 = [k1e](double x, double t) {
        const std::array<double, 2> vals{x, t};
        return k1e->eval(vals);
    };
    spec.phi = [phie](double t) {
        const std::array<double, 1> vals{t};
        return phie->eval(vals);
    };
    spec.bv = BoundaryValues{cfg.bc[0], cfg.bc[1], cfg.bc[2], cfg.bc[3]};
    spec.singular_at_zero = cfg.singular_at_zero;
    if (cfg.exact) {
        auto ee = std::make_shared<const Expr>(detail::parse_field(*cfg.exact, "exact", {"x"}));
        spec.exact = [ee](double x) {
            const std::array<double, 1> vals{x};
            return ee->eval(vals);
        };
    }

    const ValidationReport report = validate(spec, 1000);
    if (!report.passed) {
        std::string msg = "invalid problem definition:";
        for (const auto& issue : report.issues) msg += "\n  [" + issue.check + "] " + issue.message;
        throw ProblemError(msg);
    }
    return spec;
}

// --- config file I/O ----------------------------------------------------

inline ProblemConfig config_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ProblemError("problem config must be a JSON object");
    static const std::vector<std::string> known = {"f",  "k0", "k1",
                                                   "phi", "exact", "bc", "singular_at_zero"};
    for (const auto& item : doc.items()) {
        bool ok = false;
        for (const auto& k : known) ok = ok || k == item.key();
        if (!ok) throw ProblemError("unknown field '" + item.key() + "' in problem config");
    }
    auto require_string = [&doc](const char* key) -> std::string {
        if (!doc.contains(key) || !doc[key].is_string())
            throw ProblemError(std::string("problem config needs a string field '") + key + "'");
        return doc[key].get<std::string>();
    };
    ProblemConfig cfg;
    cfg.f = require_string("f");
    cfg.k0 = require_string("k0");
    cfg.k1 = require_string("k1");
    cfg.phi = require_string("phi");
    if (doc.contains("exact")) {
        if (!doc["exact"].is_string()) throw ProblemError("field 'exact' must be a string");
        cfg.exact = doc["exact"].get<std::string>();
    }
    if (!doc.contains("bc") || !doc["bc"].is_array() || doc["bc"].size() != 4)
        throw ProblemError("field 'bc' must be an array of 4 numbers");
    for (std::size_t i = 0; i < 4; ++i) {
        if (!doc["bc"][i].is_number()) throw ProblemError("field 'bc' must contain numbers only");
        cfg.bc[i] = doc["bc"][i].get<double>();
    }
    if (doc.contains("singular_at_zero")) {
        if (!doc["singular_at_zero"].is_boolean())
            throw ProblemError("field 'singular_at_zero' must be a boolean");
        cfg.singular_at_zero = doc["singular_at_zero"].get<bool>();
    }
    return cfg;
}

inline nlohmann::json config_to_json(const ProblemConfig& cfg) {
    nlohmann::json doc;
    doc["f"] = cfg.f;
    doc["k0"] = cfg.k0;
    doc["k1"] = cfg.k1;
    doc["phi"] = cfg.phi;
    if (cfg.exact) doc["exact"] = *cfg.exact;
    doc["bc"] = cfg.bc;
    if (cfg.singular_at_zero) doc["singular_at_zero"] = true;
    return doc;
}

/// File I/O failure distinct from a malformed document.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open problem config '" + path.string() + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::parse_error& e) {
        throw ProblemError("malformed JSON in '" + path.string() + "': " + e.what());
    }
    return config_from_json(doc);
}

// --- built-in problems ----------------------------------------------------

inline std::vector<std::string> builtin_names() {
    return {"example1", "example2", "example3", "example4"};
}

/// Canonical expression-level definition of a built-in problem; feeding it
/// through from_config reproduces the native builtin.
inline ProblemConfig builtin_config(const std::string& name) {
    ProblemConfig cfg;
    if (name == "example1") {
        cfg.f = "pi^4*sin(pi*x) - 0.5*sin(pi*x)^2 - 0.5*sin(pi*x/2)^2 + 0.5*u^2 + 0.5*y^2 "
                "- 8/(3*pi)*v + z";
        cfg.k0 = "exp(x)*sin(pi*t)";
        cfg.k1 = "exp(x)*sin(pi*t)";
        cfg.phi = "t/2";
        cfg.exact = "sin(pi*x)";
        cfg.bc = {0.0, 0.0, 0.0, 0.0};
    } else if (name == "example2") {
        cfg.f = "1 + pi^2*sin(pi*x) + 2*u^2 + 2*y^2 + exp(-(u^2)) + 3*v^2*z^2";
        cfg.k0 = "exp(x)*sin(pi*t)";
        cfg.k1 = "exp(x)*sin(pi*t*x/2)";
        cfg.phi = "t/2";
        cfg.bc = {0.0, 0.0, 0.0, 0.0};
    } else if (name == "example3") {
        cfg.f = "24 - x^4*(1-x)^4 - (x/3)^4*(1-x/3)^4 - exp(x)/60 "
                "- 4*(pi^4-3*pi^2+12)/(81*pi^5)*x^2*(1-x)^2*sin(pi*x) + u^2 + y^2 + v + u*z";
        cfg.k0 = "exp(x)*t";
        cfg.k1 = "sin(pi*x)*sin(pi*t)";
        cfg.phi = "t/3";
        cfg.exact = "x^2*(1-x)^2";
        cfg.bc = {0.0, 0.0, 2.0, 2.0};
    } else if (name == "example4") {
        cfg.f = "(1 + pi^2*sin(pi*x) + 2*u^2 + 2*y^2 + exp(-(u^2)) + 3*v^2*z^2)/sqrt(x)";
        cfg.k0 = "exp(x)*sin(pi*t)";
        cfg.k1 = "exp(x)*sin(pi*t*x/2)";
        cfg.phi = "t/2";
        cfg.bc = {0.0, 0.0, 0.0, 0.0};
        cfg.singular_at_zero = true;
    } else {
        throw ProblemError("unknown builtin problem '" + name + "'");
    }
    return cfg;
}

inline std::string builtin_description(const std::string& name) {
    if (name == "example1")
        return "delay x/2 with exponential-sine kernels; exact solution sin(pi*x)";
    if (name == "example2") return "positive solution, mixed quadratic/exponential nonlinearity";
    if (name == "example3")
        return "non-homogeneous boundary data u''(0)=u''(1)=2; exact solution x^2(1-x)^2";
    if (name == "example4") return "example2 scaled by 1/sqrt(x): weak singularity at x=0";
    throw ProblemError("unknown builtin problem '" + name + "'");
}

/// Built-in problems with hand-coded (fast) function bodies. Each mirrors
/// the arithmetic of its builtin_config expression text.
inline ProblemSpec builtin(const std::string& name) {
    constexpr double pi = std::numbers::pi;
    const double pi2 = pi * pi;
    const double pi4 = pi * pi * pi * pi;
    const double pi5 = pi * pi * pi * pi * pi;

    ProblemSpec spec;
    spec.name = name;
    if (name == "example1") {
        spec.f = [pi, pi4](double x, double u, double y, double v, double z) {
            const double s1 = std::sin(pi * x);
            const double s2 = std::sin(pi * x / 2.0);
            return pi4 * s1 - 0.5 * (s1 * s1) - 0.5 * (s2 * s2) + 0.5 * (u * u) +
                   0.5 * (y * y) - 8.0 / (3.0 * pi) * v + z;
        };
        spec.k0 = [pi](double x, double t) { return std::exp(x) * std::sin(pi * t); };
        spec.k1 = spec.k0;
        spec.phi = [](double t) { return t / 2.0; };
        spec.exact = [pi](double x) { return std::sin(pi * x); };
    } else if (name == "example2" || name == "example4") {
        const bool singular = name == "example4";
        spec.f = [pi, pi2, singular](double x, double u, double y, double v, double z) {
            const double core = 1.0 + pi2 * std::sin(pi * x) + 2.0 * (u * u) + 2.0 * (y * y) +
                                std::exp(-(u * u)) + 3.0 * (v * v) * (z * z);
            return singular ? core / std::sqrt(x) : core;
        };
        spec.k0 = [pi](double x, double t) { return std::exp(x) * std::sin(pi * t); };
        spec.k1 = [pi](double x, double t) { return std::exp(x) * std::sin(pi * t * x / 2.0); };
        spec.phi = [](double t) { return t / 2.0; };
        spec.singular_at_zero = singular;
    } else if (name == "example3") {
        const double c = 4.0 * (pi4 - 3.0 * pi2 + 12.0) / (81.0 * pi5);
        spec.f = [pi, c](double x, double u, double y, double v, double z) {
            const double x4 = x * x * x * x;
            const double w = 1.0 - x;
            const double w4 = w * w * w * w;
            const double x3 = x / 3.0;
            const double x34 = x3 * x3 * x3 * x3;
            const double w3 = 1.0 - x / 3.0;
            const double w34 = w3 * w3 * w3 * w3;
            return 24.0 - x4 * w4 - x34 * w34 - std::exp(x) / 60.0 -
                   c * (x * x) * (w * w) * std::sin(pi * x) + u * u + y * y + v + u * z;
        };
        spec.k0 = [](double x, double t) { return std::exp(x) * t; };
        spec.k1 = [pi](double x, double t) { return std::sin(pi * x) * std::sin(pi * t); };
        spec.phi = [](double t) { return t / 3.0; };
        spec.exact = [](double x) { return (x * x) * ((1.0 - x) * (1.0 - x)); };
        spec.bv = BoundaryValues{0.0, 0.0, 2.0, 2.0};
    } else {
        throw ProblemError("unknown builtin problem '" + name + "'");
    }
    return spec;
}

}  // namespace fide
