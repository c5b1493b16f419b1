#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fide/green.hpp"
#include "fide/grid.hpp"
#include "fide/problem.hpp"

namespace fide {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The iteration left the safety ball ||Psi||_inf <= 1e12.
class DivergenceError : public SolverError {
public:
    using SolverError::SolverError;
};

enum class StopReason { criterion_met, max_iterations };

inline const char* to_string(StopReason r) {
    return r == StopReason::criterion_met ? "criterion-met" : "max-iterations";
}

/// When to stop iterating. Both variants are capped by max_iterations.
struct StoppingRule {
    enum class Kind {
        successive_psi,        // ||Psi_m - Psi_{m-1}||_inf <= tol
        exact_error_below_h2,  // ||U_m - u||_inf <= h^2 (needs an exact solution)
    };

    Kind kind = Kind::successive_psi;
    double tol = 1e-9;
    int max_iterations = 100;

    static StoppingRule successive(double tol, int max_iterations = 100) {
        if (!(tol > 0.0)) throw std::invalid_argument("StoppingRule: tol must be positive");
        if (max_iterations < 1)
            throw std::invalid_argument("StoppingRule: max_iterations must be >= 1");
        return {Kind::successive_psi, tol, max_iterations};
    }

    static StoppingRule exact_h2(int max_iterations = 100) {
        if (max_iterations < 1)
            throw std::invalid_argument("StoppingRule: max_iterations must be >= 1");
        return {Kind::exact_error_below_h2, 0.0, max_iterations};
    }
};

/// One snapshot of the discrete iteration. u, y, v, z are the quadratures
/// computed from the psi that entered the step; psi is the updated
/// right-hand side they produced.
struct IterationState {
    int m = 0;
    GridFunction u;
    GridFunction y;
    GridFunction v;
    GridFunction z;
    GridFunction psi;
};

struct SolveReport {
    GridFunction u;  // final approximate solution at the grid nodes
    int iterations = 0;
    StopReason stop_reason = StopReason::max_iterations;
    std::vector<double> residual_history;  // ||Psi_m - Psi_{m-1}||_inf, one entry per step
    std::optional<double> error_vs_exact;  // ||U_m - exact||_inf when the exact solution is known
    double min_value = 0.0;
    double max_value = 0.0;
};

namespace detail {

inline double max_abs(const GridFunction& g) {
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
}

inline double max_abs_diff(const GridFunction& a, const GridFunction& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

/// Everything that stays fixed across iterations: the weighted kernel
/// matrices, the deviation targets, and the boundary cubic at the nodes.
/// Matrix entries are h*rho_j*kernel(x_i, x_j), so one iteration reduces to
/// four matrix-vector products.
struct SolveWorkspace {
    const ProblemSpec* spec = nullptr;
    const Grid* grid = nullptr;
    int n = 0;
    bool add_boundary = false;
    std::vector<double> phi_targets;  // phi(x_i)
    std::vector<double> wg;           // h rho_j G(x_i, x_j)
    std::vector<double> wg_phi;       // h rho_j G(phi(x_i), x_j)
    std::vector<double> wk0;          // h rho_j k0(x_i, x_j)
    std::vector<double> wk1;          // h rho_j k1(x_i, x_j)
    std::vector<double> p_at_nodes;   // p(x_i)
    std::vector<double> p_at_phi;     // p(phi(x_i))

    static SolveWorkspace build(const ProblemSpec& spec, const Grid& grid) {
        SolveWorkspace ws;
        ws.spec = &spec;
        ws.grid = &grid;
        ws.n = grid.n();
        ws.add_boundary = !spec.bv.homogeneous();
        const int n = ws.n;
        const double h = grid.h();
        const std::size_t rows = static_cast<std::size_t>(n) + 1;

        ws.phi_targets.resize(rows);
        for (int i = 0; i <= n; ++i) {
            const double x = grid.node(i);
            double t = 0.0;
            try {
                t = spec.phi(x);
            } catch (const EvalError& e) {
                throw SolverError("deviation map failed at node " + std::to_string(i) +
                                  " (x = " + std::to_string(x) + "): " + e.what());
            }
            if (!std::isfinite(t))
                throw SolverError("deviation map non-finite at node " + std::to_string(i));
            // absorb round-off excursions; anything larger is a bad problem
            if (t < 0.0 && t >= -1e-12) t = 0.0;
            if (t > 1.0 && t <= 1.0 + 1e-12) t = 1.0;
            if (t < 0.0 || t > 1.0)
                throw SolverError("deviation map leaves [0,1] at node " + std::to_string(i) +
                                  ": phi(" + std::to_string(x) + ") = " + std::to_string(t));
            ws.phi_targets[static_cast<std::size_t>(i)] = t;
        }

        ws.wg.resize(rows * rows);
        ws.wg_phi.resize(rows * rows);
        ws.wk0.resize(rows * rows);
        ws.wk1.resize(rows * rows);
        auto fill_kernel_row = [&](std::vector<double>& w, int i, const char* label,
                                   const std::function<double(double, double)>& k) {
            const double x = grid.node(i);
            for (int j = 0; j <= n; ++j) {
                const double rho = (j == 0 || j == n) ? 0.5 : 1.0;
                double v = 0.0;
                try {
                    v = k(x, grid.node(j));
                } catch (const EvalError& e) {
                    throw SolverError(std::string(label) + " failed at (x,t) = (" +
                                      std::to_string(x) + "," + std::to_string(grid.node(j)) +
                                      "): " + e.what());
                }
                if (!std::isfinite(v))
                    throw SolverError(std::string(label) + " non-finite at (x,t) = (" +
                                      std::to_string(x) + "," + std::to_string(grid.node(j)) +
                                      ")");
                w[static_cast<std::size_t>(i) * rows + static_cast<std::size_t>(j)] =
                    h * rho * v;
            }
        };
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= n; ++j) {
                const double rho = (j == 0 || j == n) ? 0.5 : 1.0;
                const std::size_t at =
                    static_cast<std::size_t>(i) * rows + static_cast<std::size_t>(j);
                ws.wg[at] = h * rho * green_value(grid.node(i), grid.node(j));
                ws.wg_phi[at] =
                    h * rho * green_value(ws.phi_targets[static_cast<std::size_t>(i)],
                                          grid.node(j));
            }
            fill_kernel_row(ws.wk0, i, "kernel k0", spec.k0);
            fill_kernel_row(ws.wk1, i, "kernel k1", spec.k1);
        }

        const BoundaryCubic p = boundary_cubic(spec.bv);
        ws.p_at_nodes.resize(rows);
        ws.p_at_phi.resize(rows);
        for (int i = 0; i <= n; ++i) {
            ws.p_at_nodes[static_cast<std::size_t>(i)] = eval_cubic(p, grid.node(i));
            ws.p_at_phi[static_cast<std::size_t>(i)] =
                eval_cubic(p, ws.phi_targets[static_cast<std::size_t>(i)]);
        }
        return ws;
    }

    void matvec(const std::vector<double>& w, const GridFunction& in, GridFunction& out) const {
        const std::size_t rows = static_cast<std::size_t>(n) + 1;
        out.resize(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            const double* row = w.data() + i * rows;
            double sum = 0.0;
            for (std::size_t j = 0; j < rows; ++j) sum += row[j] * in[j];
            out[i] = sum;
        }
    }

    void check_finite(const GridFunction& g, const char* label) const {
        for (std::size_t i = 0; i < g.size(); ++i)
            if (!std::isfinite(g[i]))
                throw SolverError(std::string(label) + " non-finite at node " +
                                  std::to_string(i) + " (x = " +
                                  std::to_string(grid->node(static_cast<int>(i))) + ")");
    }

    /// U = (weighted G) psi + p at the nodes.
    GridFunction realize_u(const GridFunction& psi) const {
        GridFunction u;
        matvec(wg, psi, u);
        if (add_boundary)
            for (std::size_t i = 0; i < u.size(); ++i) u[i] += p_at_nodes[i];
        check_finite(u, "U");
        return u;
    }

    /// Given Psi_m and U_m, compute Y_m, V_m, Z_m and the update Psi_{m+1}.
    void advance(const GridFunction& psi, const GridFunction& u, GridFunction& y,
                 GridFunction& v, GridFunction& z, GridFunction& psi_next) const {
        matvec(wg_phi, psi, y);
        if (add_boundary)
            for (std::size_t i = 0; i < y.size(); ++i) y[i] += p_at_phi[i];
        check_finite(y, "Y");
        matvec(wk0, u, v);
        check_finite(v, "V");
        matvec(wk1, y, z);
        check_finite(z, "Z");

        const std::size_t rows = static_cast<std::size_t>(n) + 1;
        psi_next.resize(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            if (i == 0 && spec->singular_at_zero) {
                psi_next[0] = 0.0;  // G(., 0) vanishes, so this entry never contributes
                continue;
            }
            const double x = grid->node(static_cast<int>(i));
            try {
                psi_next[i] = spec->f(x, u[i], y[i], v[i], z[i]);
            } catch (const EvalError& e) {
                throw SolverError("Psi update failed at node " + std::to_string(i) +
                                  " (x = " + std::to_string(x) + "): " + e.what());
            }
        }
        check_finite(psi_next, "Psi");
    }
};

}  // namespace detail

/// Psi_0(x_i) = f(x_i, 0, 0, 0, 0); the node x = 0 is forced to zero for
/// problems flagged singular there.
inline GridFunction init_psi(const ProblemSpec& spec, const Grid& grid) {
    GridFunction psi(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i) {
        if (i == 0 && spec.singular_at_zero) {
            psi[0] = 0.0;
            continue;
        }
        const double x = grid.node(i);
        double v = 0.0;
        try {
            v = spec.f(x, 0.0, 0.0, 0.0, 0.0);
        } catch (const EvalError& e) {
            throw SolverError("initial Psi failed at node " + std::to_string(i) +
                              " (x = " + std::to_string(x) + "): " + e.what());
        }
        if (!std::isfinite(v))
            throw SolverError("initial Psi non-finite at node " + std::to_string(i) + " (x = " +
                              std::to_string(x) + ")");
        psi[static_cast<std::size_t>(i)] = v;
    }
    return psi;
}

/// One sweep of the discrete scheme: from Psi_m compute U_m, Y_m, V_m, Z_m
/// by trapezium quadrature and the updated Psi_{m+1} = f(x, U_m, Y_m, V_m,
/// Z_m). The boundary cubic is added to U and Y for non-homogeneous data.
inline IterationState step(const ProblemSpec& spec, const Grid& grid, const GridFunction& psi_m,
                           int m = 0) {
    if (static_cast<int>(psi_m.size()) != grid.size())
        throw std::invalid_argument("step: Psi has " + std::to_string(psi_m.size()) +
                                    " values, grid has " + std::to_string(grid.size()) +
                                    " nodes");
    const auto ws = detail::SolveWorkspace::build(spec, grid);
    IterationState st;
    st.m = m + 1;
    st.u = ws.realize_u(psi_m);
    ws.advance(psi_m, st.u, st.y, st.v, st.z, st.psi);
    return st;
}

/// Run the fixed-point iteration until the stopping rule fires or the
/// iteration cap is hit. Deterministic: identical inputs give identical
/// reports.
inline SolveReport solve(const ProblemSpec& spec, const Grid& grid, const StoppingRule& rule) {
    if (rule.max_iterations < 1)
        throw std::invalid_argument("solve: max_iterations must be >= 1");
    if (rule.kind == StoppingRule::Kind::successive_psi && !(rule.tol > 0.0))
        throw std::invalid_argument("solve: successive-psi tolerance must be positive");
    if (rule.kind == StoppingRule::Kind::exact_error_below_h2 && !spec.has_exact())
        throw std::invalid_argument(
            "solve: stopping rule 'exact-h2' needs a problem with an exact solution");

    const auto ws = detail::SolveWorkspace::build(spec, grid);
    const double h2 = grid.h() * grid.h();
    GridFunction exact_nodes;
    if (spec.has_exact()) exact_nodes = sample(grid, spec.exact);

    SolveReport report;
    GridFunction psi = init_psi(spec, grid);
    GridFunction u = ws.realize_u(psi);
    auto error_now = [&]() { return detail::max_abs_diff(u, exact_nodes); };

    bool met = rule.kind == StoppingRule::Kind::exact_error_below_h2 && error_now() <= h2;
    int m = 0;
    GridFunction y, v, z, psi_next;
    while (!met && m < rule.max_iterations) {
        ws.advance(psi, u, y, v, z, psi_next);
        ++m;
        const double residual = detail::max_abs_diff(psi_next, psi);
        report.residual_history.push_back(residual);
        psi.swap(psi_next);
        if (detail::max_abs(psi) > 1e12)
            throw DivergenceError("iteration diverged: ||Psi_" + std::to_string(m) +
                                  "||_inf exceeds 1e12");
        u = ws.realize_u(psi);
        if (rule.kind == StoppingRule::Kind::successive_psi)
            met = residual <= rule.tol;
        else
            met = error_now() <= h2;
    }

    report.iterations = m;
    report.stop_reason = met ? StopReason::criterion_met : StopReason::max_iterations;
    report.u = std::move(u);
    if (spec.has_exact()) report.error_vs_exact = detail::max_abs_diff(report.u, exact_nodes);
    const auto [lo, hi] = std::minmax_element(report.u.begin(), report.u.end());
    report.min_value = *lo;
    report.max_value = *hi;
    return report;
}

}  // namespace fide
