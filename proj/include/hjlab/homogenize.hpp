// The oscillatory problem u_t + H(t/eps, x/eps, u_x) = 0 against its
// effective single-junction limit: per-epsilon solves, the effective
// solve, and the windowed sup-error table that makes "converges locally
// uniformly" a measurable statement.
#ifndef HJLAB_HOMOGENIZE_HPP
#define HJLAB_HOMOGENIZE_HPP

#include <functional>
#include <string>
#include <vector>

#include "hjlab/cell.hpp"
#include "hjlab/scenario.hpp"
#include "hjlab/solver.hpp"

namespace hjlab {

// Closed-form Lipschitz initial datum; the far-field slopes feed the
// slope-extension boundary conditions of the truncated solves.
struct InitialDatum {
    std::function<double(double)> f;
    double lipschitz = 0.0;
    double slope_left = 0.0, slope_right = 0.0;
    std::string name = "zero";

    static InitialDatum zero();
    static InitialDatum linear(double slope, double offset = 0.0);
    // One kink at `center`: slope_l to its left, slope_r to its right.
    static InitialDatum kink(double center, double slope_l, double slope_r,
                             double offset = 0.0);

    Eigen::ArrayXd sample(const Grid1D &g) const;
};

// u^eps: junctions moved to eps * b_alpha, limiters running 1-periodically
// in t / eps.  Throws UnderResolved unless dx <= eps / oversample.
Trajectory solve_oscillatory(const JunctionScenario &scenario, double eps,
                             const InitialDatum &u0, double T,
                             const Grid1D &grid, const SolveOptions &opt = {},
                             int oversample = 20, double cfl_safety = 0.45);

// u^0: one junction at x = 0 with the constant limiter A_bar and the
// model's outer Hamiltonians.  A limiter below the structural floor A0
// acts exactly like A0 (the junction max clears both branch minima
// pointwise), so the limiter is clamped to keep the scenario well-formed.
Trajectory solve_effective(const EffectiveModel &model, const InitialDatum &u0,
                           double T, const Grid1D &grid,
                           const SolveOptions &opt = {},
                           double cfl_safety = 0.45);

struct SpaceTimeBox {
    double t_min = 0.0, t_max = 0.0, x_lo = 0.0, x_hi = 0.0;
};

struct EpsilonSweep {
    std::vector<double> epsilons{0.2, 0.1, 0.05}; // strictly decreasing
    double T = 2.0;
    double x_radius = 4.0;           // truncation half-width of both solves
    double dx_effective = 1.0 / 128; // coarse (comparison) resolution
    int oversample = 20;
    double t_min_frac = 0.1; // window starts at t_min_frac * T (0 allowed)
    InitialDatum u0 = InitialDatum::zero();
};

struct ConvergenceRow {
    double eps = 0.0, dx = 0.0, dt = 0.0, sup_error = 0.0, runtime_s = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    SpaceTimeBox window;
    bool monotone_tail = true;   // last three errors non-increasing (10% slack)
    bool not_converging = false; // final error exceeds the first
};

// Solves the effective problem once on the coarse grid, then u^eps per
// epsilon on grids refining it by an integer factor (so coarse nodes are
// fine nodes and the sup needs no interpolation), measuring the sup
// difference over the window
//     [t_min_frac * T, T] x [-X, X],  X = x_radius - max|H'| * T,
// which the truncation boundaries cannot influence.
ConvergenceReport convergence_report(const EpsilonSweep &sweep,
                                     const JunctionScenario &scenario,
                                     const EffectiveModel &model);

} // namespace hjlab

#endif
