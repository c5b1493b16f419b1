#pragma once

#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fide/analysis.hpp"
#include "fide/problem.hpp"
#include "fide/report_io.hpp"
#include "fide/solver.hpp"

namespace fide::cli {

/// Exit codes, kept stable for scripting.
enum ExitCode {
    exit_ok = 0,
    exit_usage = 1,       // bad flags or flag combinations
    exit_problem = 2,     // ill-defined problem or incompatible stopping rule
    exit_divergence = 3,  // iteration left the safety ball
    exit_io = 4,          // unreadable config or unwritable output
};

/// Everything one invocation asks for.
struct RunConfig {
    std::string command;
    std::string example;
    std::string config_path;
    int n = 100;
    std::vector<int> n_list;
    std::string criterion = "successive";
    double tol = 1e-9;
    int max_iter = 100;
    double big_m = 0.0;
    std::vector<double> lipschitz;
    std::string format;
    std::string out_path;
    std::string solution_out;
};

namespace detail {

inline ProblemSpec resolve_problem(const RunConfig& rc) {
    const bool have_example = !rc.example.empty();
    const bool have_config = !rc.config_path.empty();
    if (have_example == have_config)
        throw CLI::ValidationError("problem source",
                                   "pass exactly one of --example or --config");
    if (have_example) return builtin(rc.example);
    return from_config(load_config(rc.config_path), rc.config_path);
}

inline StoppingRule resolve_rule(const RunConfig& rc) {
    if (rc.criterion == "successive") return StoppingRule::successive(rc.tol, rc.max_iter);
    if (rc.criterion == "exact-h2") return StoppingRule::exact_h2(rc.max_iter);
    throw CLI::ValidationError("--criterion",
                               "expected 'successive' or 'exact-h2', got '" + rc.criterion + "'");
}

template <typename Fn>
void with_sink(const std::string& path, std::ostream& fallback, Fn&& fn) {
    if (path.empty()) {
        fn(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) throw IoError("cannot open '" + path + "' for writing");
    fn(file);
    file.flush();
    if (!file) throw IoError("write to '" + path + "' failed");
}

inline int run_solve(const RunConfig& rc, std::ostream& out) {
    const ProblemSpec spec = resolve_problem(rc);
    const Grid grid = make_grid(rc.n);
    const SolveReport report = solve(spec, grid, resolve_rule(rc));

    const OutputFormat format = parse_format(rc.format.empty() ? "json" : rc.format);
    with_sink(rc.out_path, out, [&](std::ostream& os) {
        if (format == OutputFormat::json) {
            nlohmann::json doc = report_to_json(report);
            doc["problem"] = spec.name;
            doc["n"] = rc.n;
            doc["criterion"] = rc.criterion;
            os << doc.dump(2) << '\n';
        } else {
            emit_report_csv(report, os);
        }
    });
    if (!rc.solution_out.empty())
        with_sink(rc.solution_out, out, [&](std::ostream& os) { emit_solution(report, grid, os); });
    return exit_ok;
}

inline int run_study(const RunConfig& rc, std::ostream& out) {
    const ProblemSpec spec = resolve_problem(rc);
    if (rc.n_list.size() < 3)
        throw CLI::ValidationError("--n-list", "need at least 3 grid sizes");
    const ConvergenceStudy study = convergence_study(spec, rc.n_list, resolve_rule(rc));
    const OutputFormat format = parse_format(rc.format.empty() ? "csv" : rc.format);
    with_sink(rc.out_path, out, [&](std::ostream& os) { emit_table(study, format, os); });
    return exit_ok;
}

inline int run_certify(const RunConfig& rc, std::ostream& out) {
    const ProblemSpec spec = resolve_problem(rc);
    if (rc.lipschitz.size() != 4)
        throw CLI::ValidationError("--l", "expected 4 comma-separated Lipschitz constants");
    const Grid grid = make_grid(rc.n);
    const auto [k0, k1] = estimate_kernel_norms(spec, grid);
    const ContractionCertificate cert = make_certificate(
        rc.big_m, {rc.lipschitz[0], rc.lipschitz[1], rc.lipschitz[2], rc.lipschitz[3]}, k0, k1);
    const OutputFormat format = parse_format(rc.format.empty() ? "json" : rc.format);
    with_sink(rc.out_path, out, [&](std::ostream& os) {
        if (format == OutputFormat::json) {
            nlohmann::json doc = certificate_to_json(cert);
            doc["problem"] = spec.name;
            doc["n"] = rc.n;
            os << doc.dump(2) << '\n';
        } else {
            emit_certificate_csv(cert, os);
        }
    });
    return exit_ok;
}

inline int run_list(std::ostream& out) {
    for (const std::string& name : builtin_names()) {
        const ProblemSpec spec = builtin(name);
        out << name << "  exact=" << (spec.has_exact() ? "yes" : "no ") << "  "
            << builtin_description(name) << '\n';
    }
    return exit_ok;
}

}  // namespace detail

/// Parse argv (without the program name) and run one command. Errors are
/// printed to err; the return value is an ExitCode.
inline int run(const std::vector<std::string>& argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Solver for fourth-order functional integro-differential boundary value "
                 "problems on [0,1]"};
    app.require_subcommand(1);
    RunConfig rc;

    auto add_problem_flags = [&rc](CLI::App* cmd) {
        cmd->add_option("--example", rc.example, "built-in problem name (see 'list')");
        cmd->add_option("--config", rc.config_path, "path to a problem config JSON file");
    };
    auto add_rule_flags = [&rc](CLI::App* cmd) {
        cmd->add_option("--criterion", rc.criterion, "stopping rule: successive | exact-h2")
            ->default_str("successive");
        cmd->add_option("--tol", rc.tol, "threshold for the successive criterion")
            ->default_str("1e-9")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--max-iter", rc.max_iter, "iteration cap")
            ->default_str("100")
            ->check(CLI::PositiveNumber);
    };
    auto add_output_flags = [&rc](CLI::App* cmd, const char* fmt_default) {
        cmd->add_option("--format", rc.format, std::string("output format: csv | json (default ") +
                                                   fmt_default + ")");
        cmd->add_option("--out", rc.out_path, "write output to this path instead of stdout");
    };

    CLI::App* solve_cmd = app.add_subcommand("solve", "run the iteration on one grid");
    add_problem_flags(solve_cmd);
    solve_cmd->add_option("--n", rc.n, "number of grid subintervals")
        ->default_str("100")
        ->check(CLI::Range(2, 1 << 24));
    add_rule_flags(solve_cmd);
    add_output_flags(solve_cmd, "json");
    solve_cmd->add_option("--solution-out", rc.solution_out,
                          "also write x,u plot data to this path");

    CLI::App* study_cmd = app.add_subcommand("study", "grid refinement study with order fit");
    add_problem_flags(study_cmd);
    study_cmd->add_option("--n-list", rc.n_list, "comma-separated grid sizes (at least 3)")
        ->delimiter(',');
    add_rule_flags(study_cmd);
    add_output_flags(study_cmd, "csv");

    CLI::App* certify_cmd =
        app.add_subcommand("certify", "contraction certificate from user constants");
    add_problem_flags(certify_cmd);
    certify_cmd->add_option("--big-m", rc.big_m, "ball radius M for the right-hand side")
        ->required()
        ->check(CLI::PositiveNumber);
    certify_cmd->add_option("--l", rc.lipschitz, "Lipschitz constants L0,L1,L2,L3")
        ->delimiter(',')
        ->required()
        ->check(CLI::NonNegativeNumber);
    certify_cmd->add_option("--n", rc.n, "grid size for the kernel-norm quadrature")
        ->default_str("100")
        ->check(CLI::Range(2, 1 << 24));
    add_output_flags(certify_cmd, "json");

    CLI::App* list_cmd = app.add_subcommand("list", "list the built-in problems");
    (void)list_cmd;

    try {
        // CLI11's vector overload wants the arguments reversed.
        std::vector<std::string> reversed(argv.rbegin(), argv.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        if (app.got_subcommand("solve")) {
            rc.command = "solve";
            return detail::run_solve(rc, out);
        }
        if (app.got_subcommand("study")) {
            rc.command = "study";
            return detail::run_study(rc, out);
        }
        if (app.got_subcommand("certify")) {
            rc.command = "certify";
            return detail::run_certify(rc, out);
        }
        rc.command = "list";
        return detail::run_list(out);
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return exit_divergence;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return exit_io;
    } catch (const ProblemError& e) {
        err << "error: " << e.what() << '\n';
        return exit_problem;
    } catch (const SolverError& e) {
        err << "error: " << e.what() << '\n';
        return exit_problem;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_problem;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_problem;
    }
}

}  // namespace fide::cli
