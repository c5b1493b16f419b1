#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fide {

/// Nodal values of a function on a grid, one entry per node.
using GridFunction = std::vector<double>;

/// Uniform partition of [0,1] into N subintervals with nodes x_i = i*h.
///
/// Nodes are computed as i*h rather than by cumulative addition, and the
/// endpoints are pinned to exactly 0 and 1 so that kernel evaluations at
/// the boundary hit their zeros exactly.
class Grid {
public:
    explicit Grid(int subintervals) : n_(subintervals) {
        if (subintervals < 2)
            throw std::invalid_argument("Grid: need at least 2 subintervals, got " +
                                        std::to_string(subintervals));
        h_ = 1.0 / static_cast<double>(n_);
        nodes_.resize(static_cast<std::size_t>(n_) + 1);
        for (int i = 0; i <= n_; ++i) nodes_[static_cast<std::size_t>(i)] = i * h_;
        nodes_.front() = 0.0;
        nodes_.back() = 1.0;
    }

    int n() const { return n_; }
    double h() const { return h_; }
    /// Number of nodes, N+1.
    int size() const { return n_ + 1; }
    double node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
    std::span<const double> nodes() const { return nodes_; }

private:
    int n_;
    double h_;
    std::vector<double> nodes_;
};

inline Grid make_grid(int subintervals) { return Grid(subintervals); }

/// Trapezium weights rho_j: 1/2 at both endpoints, 1 at interior nodes.
inline std::vector<double> trapezoid_weights(const Grid& grid) {
    std::vector<double> rho(static_cast<std::size_t>(grid.size()), 1.0);
    rho.front() = 0.5;
    rho.back() = 0.5;
    return rho;
}

/// Composite trapezium rule: sum_j h*rho_j*values_j. Exact for affine
/// integrands, O(h^2) for C^2 integrands.
inline double integrate(const Grid& grid, const GridFunction& values) {
    if (static_cast<int>(values.size()) != grid.size())
        throw std::invalid_argument("integrate: grid function has " +
                                    std::to_string(values.size()) + " values, grid has " +
                                    std::to_string(grid.size()) + " nodes");
    const double h = grid.h();
    const int n = grid.n();
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double rho = (j == 0 || j == n) ? 0.5 : 1.0;
        sum += h * rho * values[static_cast<std::size_t>(j)];
    }
    return sum;
}

/// Sample a callable at every grid node.
template <typename F>
GridFunction sample(const Grid& grid, F&& f) {
    GridFunction values(static_cast<std::size_t>(grid.size()));
    for (int i = 0; i < grid.size(); ++i) values[static_cast<std::size_t>(i)] = f(grid.node(i));
    return values;
}

}  // namespace fide
