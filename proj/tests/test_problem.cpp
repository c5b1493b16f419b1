#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fide/problem.hpp"
#include "fide/solver.hpp"

using namespace fide;

namespace {
constexpr double pi = std::numbers::pi;

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}
}  // namespace

TEST_CASE("builtin registry carries the documented data", "[problem]") {
    const ProblemSpec e1 = builtin("example1");
    CHECK(e1.phi(0.8) == Catch::Approx(0.4).margin(1e-15));
    CHECK(e1.bv.homogeneous());
    REQUIRE(e1.has_exact());
    CHECK(e1.exact(0.5) == Catch::Approx(1.0).margin(1e-15));

    const ProblemSpec e2 = builtin("example2");
    CHECK_FALSE(e2.has_exact());
    CHECK(e2.f(0.0, 0.0, 0.0, 0.0, 0.0) == 2.0);

    const ProblemSpec e3 = builtin("example3");
    CHECK(e3.bv.c1 == 0.0);
    CHECK(e3.bv.c2 == 0.0);
    CHECK(e3.bv.c3 == 2.0);
    CHECK(e3.bv.c4 == 2.0);
    REQUIRE(e3.has_exact());
    CHECK(e3.phi(0.9) == Catch::Approx(0.3).margin(1e-15));

    const ProblemSpec e4 = builtin("example4");
    CHECK(e4.singular_at_zero);
    CHECK_FALSE(e4.has_exact());

    CHECK_THROWS_AS(builtin("example9"), ProblemError);
}

TEST_CASE("builtin exact solutions satisfy their boundary data", "[problem]") {
    for (const char* name : {"example1", "example3"}) {
        const ProblemSpec spec = builtin(name);
        REQUIRE(spec.has_exact());
        CHECK(spec.exact(0.0) == Catch::Approx(spec.bv.c1).margin(1e-12));
        CHECK(spec.exact(1.0) == Catch::Approx(spec.bv.c2).margin(1e-12));
        // one-sided second differences, exact on cubics, O(h^2) in general
        const double h = 1e-3;
        auto second_diff = [&](double x0, double dir) {
            const double u0 = spec.exact(x0);
            const double u1 = spec.exact(x0 + dir * h);
            const double u2 = spec.exact(x0 + dir * 2.0 * h);
            const double u3 = spec.exact(x0 + dir * 3.0 * h);
            return (2.0 * u0 - 5.0 * u1 + 4.0 * u2 - u3) / (h * h);
        };
        CHECK(second_diff(0.0, 1.0) == Catch::Approx(spec.bv.c3).margin(1e-3));
        CHECK(second_diff(1.0, -1.0) == Catch::Approx(spec.bv.c4).margin(1e-3));
    }
}

TEST_CASE("example1's data is consistent with its exact solution", "[problem]") {
    // with u = sin(pi x): u(x/2) = sin(pi x/2),
    // v(x) = int e^x sin(pi t) u(t) dt = e^x / 2,
    // z(x) = int e^x sin(pi t) u(t/2) dt = 4 e^x / (3 pi),
    // and f at that state must return u'''' = pi^4 sin(pi x)
    const ProblemSpec spec = builtin("example1");
    for (double x : {0.0, 0.1, 0.25, 0.5, 0.77, 1.0}) {
        const double u = std::sin(pi * x);
        const double y = std::sin(pi * x / 2.0);
        const double v = std::exp(x) / 2.0;
        const double z = 4.0 * std::exp(x) / (3.0 * pi);
        const double rhs = spec.f(x, u, y, v, z);
        CHECK(rhs == Catch::Approx(pi * pi * pi * pi * std::sin(pi * x)).margin(1e-12));
        // the kernels themselves reproduce the analytic integrals
        CHECK(spec.k0(x, 0.5) == Catch::Approx(std::exp(x)).margin(1e-12));
    }
}

TEST_CASE("example3's data is consistent with its exact solution", "[problem]") {
    // with u = x^2 (1-x)^2: v(x) = int e^x t u(t) dt = e^x / 60 and
    // u(x) z(x) cancels the sine forcing term, leaving u'''' = 24
    const ProblemSpec spec = builtin("example3");
    const double I = 4.0 * (std::pow(pi, 4) - 3.0 * pi * pi + 12.0) / (81.0 * std::pow(pi, 5));
    for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) {
        const double u = x * x * (1.0 - x) * (1.0 - x);
        const double x3 = x / 3.0;
        const double y = x3 * x3 * (1.0 - x3) * (1.0 - x3);
        const double v = std::exp(x) / 60.0;
        const double z = std::sin(pi * x) * I;
        CHECK(spec.f(x, u, y, v, z) == Catch::Approx(24.0).margin(1e-10));
    }
}

TEST_CASE("from_config solves the constant-load problem", "[problem]") {
    ProblemConfig cfg;
    cfg.f = "1";
    cfg.k0 = "0";
    cfg.k1 = "0";
    cfg.phi = "t";
    const ProblemSpec spec = from_config(cfg);

    const Grid grid = make_grid(200);
    const SolveReport report = solve(spec, grid, StoppingRule::successive(1e-12));
    // u'''' = 1 with zero hinged data has u = (x^4 - 2x^3 + x)/24
    double worst = 0.0;
    for (int i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i);
        const double exact = (x * x * x * x - 2.0 * x * x * x + x) / 24.0;
        worst = std::max(worst, std::abs(report.u[static_cast<std::size_t>(i)] - exact));
    }
    CHECK(worst < 1e-6);
    CHECK(report.iterations == 1);  // constant f is a fixed point after one update
}

TEST_CASE("from_config rejects a deviation map leaving [0,1]", "[problem]") {
    ProblemConfig cfg;
    cfg.f = "1";
    cfg.k0 = "0";
    cfg.k1 = "0";
    cfg.phi = "2*t";
    CHECK_THROWS_AS(from_config(cfg), ProblemError);
}

TEST_CASE("from_config propagates parse errors with field names", "[problem]") {
    ProblemConfig cfg;
    cfg.f = "1 +";
    cfg.k0 = "0";
    cfg.k1 = "0";
    cfg.phi = "t";
    CHECK_THROWS_WITH(from_config(cfg), Catch::Matchers::ContainsSubstring("field 'f'"));

    cfg.f = "u + w";  // w is not a declared variable
    CHECK_THROWS_WITH(from_config(cfg), Catch::Matchers::ContainsSubstring("'w'"));
}

TEST_CASE("config path reproduces the builtin solver output node-for-node", "[problem]") {
    for (const char* name : {"example1", "example2", "example3", "example4"}) {
        const ProblemSpec native = builtin(name);
        const ProblemSpec parsed = from_config(builtin_config(name), name);
        const Grid grid = make_grid(50);
        const StoppingRule rule = StoppingRule::successive(1e-9);
        const SolveReport a = solve(native, grid, rule);
        const SolveReport b = solve(parsed, grid, rule);
        CHECK(a.iterations == b.iterations);
        CHECK(max_abs_diff(a.u, b.u) <= 1e-14);
    }
}

TEST_CASE("config JSON round-trips through serialization", "[problem]") {
    const ProblemConfig cfg = builtin_config("example3");
    const nlohmann::json doc = config_to_json(cfg);
    const ProblemConfig back = config_from_json(nlohmann::json::parse(doc.dump()));
    CHECK(back.f == cfg.f);
    CHECK(back.bc == cfg.bc);
    REQUIRE(back.exact.has_value());

    const Grid grid = make_grid(40);
    const StoppingRule rule = StoppingRule::successive(1e-9);
    const SolveReport a = solve(from_config(cfg), grid, rule);
    const SolveReport b = solve(from_config(back), grid, rule);
    CHECK(max_abs_diff(a.u, b.u) <= 1e-14);
}

TEST_CASE("config JSON rejects unknown fields and bad bc", "[problem]") {
    nlohmann::json doc = config_to_json(builtin_config("example1"));
    doc["frobnicate"] = 1;
    CHECK_THROWS_WITH(config_from_json(doc), Catch::Matchers::ContainsSubstring("frobnicate"));

    nlohmann::json short_bc = config_to_json(builtin_config("example1"));
    short_bc["bc"] = {0.0, 0.0};
    CHECK_THROWS_AS(config_from_json(short_bc), ProblemError);

    nlohmann::json no_f = config_to_json(builtin_config("example1"));
    no_f.erase("f");
    CHECK_THROWS_AS(config_from_json(no_f), ProblemError);
}

TEST_CASE("load_config distinguishes missing files from bad documents", "[problem]") {
    CHECK_THROWS_AS(load_config("/nonexistent/nowhere.json"), IoError);

    const auto path = std::filesystem::temp_directory_path() / "fide_bad_config.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_config(path), ProblemError);
    std::filesystem::remove(path);
}

TEST_CASE("validate reports phi range violations with the offending point", "[problem]") {
    ProblemSpec spec = builtin("example1");
    CHECK(validate(spec, 1000).passed);

    spec.phi = [](double t) { return 1.5 * t; };
    const ValidationReport report = validate(spec, 1000);
    CHECK_FALSE(report.passed);
    REQUIRE_FALSE(report.issues.empty());
    CHECK(report.issues.front().check == "phi-range");

    CHECK_THROWS_AS(validate(spec, 10), std::invalid_argument);
}

TEST_CASE("validate skips x=0 for singular problems", "[problem]") {
    CHECK(validate(builtin("example4"), 500).passed);

    // without the flag the 1/sqrt(x) factor trips the finiteness check
    ProblemSpec spec = builtin("example4");
    spec.singular_at_zero = false;
    const ValidationReport report = validate(spec, 500);
    CHECK_FALSE(report.passed);
}
