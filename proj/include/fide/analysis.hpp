#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fide/green.hpp"
#include "fide/grid.hpp"
#include "fide/problem.hpp"
#include "fide/solver.hpp"

namespace fide {

/// Computable solvability certificate. With M the ball radius for the
/// right-hand side, L0..L3 Lipschitz constants of f in (u, y, v, z), and
/// K0, K1 the kernel norms, the fixed-point operator contracts with factor
///
///   q = (L0 + L1 + L2 K0 + L3 K1) * M0,   M0 = 5/384,
///
/// and q < 1 certifies a unique solution bounded by M0*M.
struct ContractionCertificate {
    double ball_radius = 0.0;  // M
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
    double k0 = 0.0, k1 = 0.0;
    double m0 = m0_constant();
    double q = 0.0;
    bool contractive = false;
    double domain_bound = 0.0;  // M0 * M, sup bound on the certified solution
};

inline ContractionCertificate make_certificate(double ball_radius,
                                               const std::array<double, 4>& lipschitz,
                                               double k0, double k1) {
    if (!(ball_radius > 0.0))
        throw std::invalid_argument("make_certificate: ball radius M must be positive");
    for (double l : lipschitz)
        if (!(l >= 0.0))
            throw std::invalid_argument("make_certificate: Lipschitz constants must be >= 0");
    ContractionCertificate cert;
    cert.ball_radius = ball_radius;
    cert.l0 = lipschitz[0];
    cert.l1 = lipschitz[1];
    cert.l2 = lipschitz[2];
    cert.l3 = lipschitz[3];
    cert.k0 = k0;
    cert.k1 = k1;
    cert.q = (cert.l0 + cert.l1 + cert.l2 * k0 + cert.l3 * k1) * cert.m0;
    cert.contractive = cert.q < 1.0;
    cert.domain_bound = cert.m0 * ball_radius;
    return cert;
}

/// Kernel norms K_i = max_x \int_0^1 |k_i(x,s)| ds by trapezium quadrature
/// over the grid nodes. Use a fine grid (N >= 200) for quadrature accuracy.
inline std::pair<double, double> estimate_kernel_norms(const ProblemSpec& spec,
                                                       const Grid& grid) {
    auto norm_of = [&](const std::function<double(double, double)>& k, const char* label) {
        const int n = grid.n();
        const double h = grid.h();
        double best = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double x = grid.node(i);
            double sum = 0.0;
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
                sum += h * rho * std::abs(v);
            }
            best = std::max(best, sum);
        }
        return best;
    };
    return {norm_of(spec.k0, "kernel k0"), norm_of(spec.k1, "kernel k1")};
}

/// A-priori error bound after m iterations: M0 * q^m/(1-q) * d, where
/// d = ||psi_1 - psi_0||_inf. Requires a contractive certificate.
inline double a_priori_bound(const ContractionCertificate& cert, double d, int m) {
    if (!cert.contractive)
        throw std::domain_error("a_priori_bound: certificate is not contractive (q >= 1)");
    if (!(d >= 0.0)) throw std::invalid_argument("a_priori_bound: d must be >= 0");
    if (m < 0) throw std::invalid_argument("a_priori_bound: m must be >= 0");
    const double p_m = std::pow(cert.q, m) / (1.0 - cert.q);
    return cert.m0 * p_m * d;
}

/// Heuristic Lipschitz constants of f in (u, y, v, z): the largest central
/// finite difference over a lattice covering the solvability box
/// |u|,|y| <= M0*M, |v| <= M0*K0*M, |z| <= M0*K1*M. A sampling estimate,
/// not a rigorous global bound; certificates built from it are only as
/// trustworthy as the sampling.
struct LipschitzEstimate {
    double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
};

inline LipschitzEstimate estimate_lipschitz(const ProblemSpec& spec, double ball_radius,
                                            double k0, double k1, int points_per_axis = 5) {
    if (!(ball_radius > 0.0))
        throw std::invalid_argument("estimate_lipschitz: ball radius must be positive");
    points_per_axis = std::clamp(points_per_axis, 2, 9);
    const double bu = m0_constant() * ball_radius;
    const std::array<double, 4> bounds{bu, bu, bu * k0, bu * k1};

    std::array<std::vector<double>, 4> axes;
    for (int a = 0; a < 4; ++a) {
        for (int i = 0; i < points_per_axis; ++i) {
            const double t = points_per_axis == 1
                                 ? 0.0
                                 : -1.0 + 2.0 * i / static_cast<double>(points_per_axis - 1);
            axes[static_cast<std::size_t>(a)].push_back(bounds[static_cast<std::size_t>(a)] * t);
        }
    }
    std::vector<double> xs;
    for (int i = 0; i < points_per_axis; ++i) {
        double x = static_cast<double>(i) / (points_per_axis - 1);
        if (x == 0.0 && spec.singular_at_zero) x = 0.5 / (points_per_axis - 1);
        xs.push_back(x);
    }

    LipschitzEstimate est;
    std::array<double*, 4> slots{&est.l0, &est.l1, &est.l2, &est.l3};
    for (double x : xs)
        for (double u : axes[0])
            for (double y : axes[1])
                for (double v : axes[2])
                    for (double z : axes[3]) {
                        std::array<double, 4> point{u, y, v, z};
                        for (int a = 0; a < 4; ++a) {
                            const double scale = std::max(bounds[static_cast<std::size_t>(a)], 1.0);
                            const double delta = 1e-5 * scale;
                            std::array<double, 4> hi = point, lo = point;
                            hi[static_cast<std::size_t>(a)] += delta;
                            lo[static_cast<std::size_t>(a)] -= delta;
                            const double df =
                                (spec.f(x, hi[0], hi[1], hi[2], hi[3]) -
                                 spec.f(x, lo[0], lo[1], lo[2], lo[3])) /
                                (2.0 * delta);
                            double& slot = *slots[static_cast<std::size_t>(a)];
                            slot = std::max(slot, std::abs(df));
                        }
                    }
    return est;
}

/// One grid refinement study: a solve per N plus the log-log order fit.
struct StudyRow {
    int n = 0;
    double h2 = 0.0;
    int m = 0;
    double error = 0.0;
};

struct ConvergenceStudy {
    std::vector<StudyRow> rows;  // sorted by N ascending
    double fitted_order = std::numeric_limits<double>::quiet_NaN();
    double fit_residual = std::numeric_limits<double>::quiet_NaN();

    /// Rows at or below this error are treated as round-off noise and
    /// excluded from the order fit.
    static constexpr double error_floor = 1e-12;
};

/// Solve on every grid in n_list and fit the observed order: the least
/// squares slope of log(error) against log(h) over rows above the error
/// floor. Requires an exact solution and at least three grid sizes.
inline ConvergenceStudy convergence_study(const ProblemSpec& spec, std::vector<int> n_list,
                                          const StoppingRule& rule) {
    if (!spec.has_exact())
        throw std::invalid_argument("convergence_study: problem has no exact solution");
    if (n_list.size() < 3)
        throw std::invalid_argument("convergence_study: need at least 3 grid sizes");
    std::sort(n_list.begin(), n_list.end());

    ConvergenceStudy study;
    for (int n : n_list) {
        const Grid grid = make_grid(n);
        const SolveReport report = solve(spec, grid, rule);
        study.rows.push_back({n, grid.h() * grid.h(), report.iterations, *report.error_vs_exact});
    }

    std::vector<double> log_h, log_e;
    for (const StudyRow& row : study.rows) {
        if (row.error > ConvergenceStudy::error_floor) {
            log_h.push_back(std::log(1.0 / row.n));
            log_e.push_back(std::log(row.error));
        }
    }
    const std::size_t count = log_h.size();
    if (count >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            mx += log_h[i];
            my += log_e[i];
        }
        mx /= static_cast<double>(count);
        my /= static_cast<double>(count);
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            sxx += (log_h[i] - mx) * (log_h[i] - mx);
            sxy += (log_h[i] - mx) * (log_e[i] - my);
        }
        if (sxx > 0.0) {
            study.fitted_order = sxy / sxx;
            const double intercept = my - study.fitted_order * mx;
            double ss = 0.0;
            for (std::size_t i = 0; i < count; ++i) {
                const double r = log_e[i] - (intercept + study.fitted_order * log_h[i]);
                ss += r * r;
            }
            study.fit_residual = std::sqrt(ss / static_cast<double>(count));
        }
    }
    return study;
}

}  // namespace fide
