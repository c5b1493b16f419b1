#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fide/grid.hpp"

namespace fide {

/// Green's function of u'''' = 0 on [0,1] with hinged (Navier) ends:
/// u(x) = \int_0^1 G(x,s) psi(s) ds solves u'''' = psi with
/// u(0) = u(1) = u''(0) = u''(1) = 0.
///
///   G(x,s) = s (1-x) (2x - x^2 - s^2) / 6   for s <= x,
///
/// extended symmetrically to x <= s. G is nonnegative on the unit square
/// and vanishes whenever x or s lies on the boundary. The classic beam
/// checks hold: G(1/2,1/2) = 1/48 (midspan point load) and
/// max_x \int_0^1 G(x,s) ds = 5/384 (uniform load).
inline double green_value(double x, double s) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("green_value: x = " + std::to_string(x) + " outside [0,1]");
    if (!(s >= 0.0 && s <= 1.0))
        throw std::domain_error("green_value: s = " + std::to_string(s) + " outside [0,1]");
    if (s > x) std::swap(x, s);
    return s * (1.0 - x) * (2.0 * x - x * x - s * s) / 6.0;
}

/// max_x \int_0^1 G(x,s) ds = 5/384, attained at x = 1/2. The amplification
/// factor from the right-hand side to the solution in the max norm.
constexpr double m0_constant() { return 5.0 / 384.0; }

/// Trapezium discretization of the integral operator: for each target t,
/// returns sum_j h rho_j G(t, x_j) psi_j. Targets may lie anywhere in
/// [0,1]; G is evaluated analytically, never interpolated.
inline std::vector<double> apply_green(const Grid& grid, const GridFunction& psi,
                                       std::span<const double> targets) {
    if (static_cast<int>(psi.size()) != grid.size())
        throw std::invalid_argument("apply_green: grid function has " +
                                    std::to_string(psi.size()) + " values, grid has " +
                                    std::to_string(grid.size()) + " nodes");
    const double h = grid.h();
    const int n = grid.n();
    std::vector<double> out(targets.size());
    for (std::size_t k = 0; k < targets.size(); ++k) {
        const double t = targets[k];
        if (!(t >= 0.0 && t <= 1.0))
            throw std::domain_error("apply_green: target " + std::to_string(t) +
                                    " outside [0,1]");
        double sum = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double rho = (j == 0 || j == n) ? 0.5 : 1.0;
            const double w = h * rho * green_value(t, grid.node(j));
            sum += w * psi[static_cast<std::size_t>(j)];
        }
        out[k] = sum;
    }
    return out;
}

/// Prescribed boundary data: u(0) = c1, u(1) = c2, u''(0) = c3, u''(1) = c4.
struct BoundaryValues {
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;

    bool homogeneous() const { return c1 == 0.0 && c2 == 0.0 && c3 == 0.0 && c4 == 0.0; }
};

/// Cubic p(x) = a0 + a1 x + a2 x^2 + a3 x^3 interpolating the boundary data:
/// p(0) = c1, p(1) = c2, p''(0) = c3, p''(1) = c4.
struct BoundaryCubic {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double a3 = 0.0;
};

inline BoundaryCubic boundary_cubic(const BoundaryValues& bv) {
    BoundaryCubic p;
    p.a0 = bv.c1;
    p.a1 = -bv.c1 + bv.c2 - bv.c3 / 3.0 - bv.c4 / 6.0;
    p.a2 = bv.c3 / 2.0;
    p.a3 = (bv.c4 - bv.c3) / 6.0;
    return p;
}

inline double eval_cubic(const BoundaryCubic& p, double x) {
    return p.a0 + x * (p.a1 + x * (p.a2 + x * p.a3));
}

}  // namespace fide
