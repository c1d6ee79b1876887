// Uniform 1D grids and grid-attached solution snapshots.
#ifndef HJLAB_GRID_HPP
#define HJLAB_GRID_HPP

#include <Eigen/Dense>
#include <vector>

#include "hjlab/errors.hpp"

namespace hjlab {

struct Grid1D {
    double x0 = 0.0;
    double dx = 1.0;
    int n_nodes = 0;
    std::vector<int> junction_indices; // sorted, strictly increasing

    double x(int j) const { return x0 + j * dx; }
    double x_last() const { return x(n_nodes - 1); }

    // Index of the node sitting exactly at xq.  Junctions and probes must
    // be grid nodes; anything off-grid is a caller error, never snapped.
    int node_at(double xq) const;

    bool same_as(const Grid1D &o) const;

    // Grid covering [x_lo, x_hi] whose node set contains every junction.
    static Grid1D over(double x_lo, double x_hi, double dx,
                       const std::vector<double> &junctions = {});
};

struct GridSolution {
    Grid1D grid;
    double t = 0.0;
    Eigen::ArrayXd values;
    // Certified bounds: |u_{j+1}-u_j| <= lip_space * dx and one step of
    // size dt moves no node by more than lip_time * dt.
    double lip_space = 0.0;
    double lip_time = 0.0;

    double measured_lip_space() const;
    double value_at(double xq) const { return values[grid.node_at(xq)]; }
};

} // namespace hjlab

#endif
