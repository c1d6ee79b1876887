// Ergodic constants by the long-time method: effective Hamiltonians from
// periodic cell problems, truncated-domain constants lambda_rho with
// envelope boundary conditions, the effective flux limiter A_bar as the
// rho-limit, and rescaled-corrector slope checks.
//
// Every constant here is the growth rate of a single solver run integrated
// over [0, 2T] from zero data, bracketed by ergodic_constant on the probe
// trace and sign-flipped (w grows like -lambda t).
#ifndef HJLAB_CELL_HPP
#define HJLAB_CELL_HPP

#include <limits>
#include <vector>

#include "hjlab/ergodic.hpp"
#include "hjlab/scenario.hpp"
#include "hjlab/solver.hpp"
#include "hjlab/spacetime.hpp"

namespace hjlab {

// Numerical knobs shared by the cell-problem drivers.
struct CellParams {
    double dx = 0.02;
    double T = 40.0; // averaging horizon; runs integrate to 2T
    double cfl_safety = 0.45;
    double requested_tol = std::numeric_limits<double>::infinity();
};

// One truncated cell problem on [-rho, rho].
struct CorrectorRun {
    ErgodicEstimate lambda_rho; // on the lambda scale (sign already flipped)
    GridSolution profile;       // w at the final time 2T
    double time_oscillation = 0.0; // max over nodes of osc of w + lambda t
                                   // across the last unit period
    double rho = 0.0;
    int probe_node = -1;
};

// Solves w_t + (junction equation) = 0 on [-rho, rho] with the minus
// envelope imposed at -rho and the plus envelope at +rho, w(0,.) = 0, over
// [0, 2T]; brackets lambda_rho from the trace at the x = 0 node (or the
// junction node nearest 0 when 0 is off-grid).  The requested dx is
// snapped down (dyadically) when junction positions or rho need it, and
// refined to keep at least 8 cells between adjacent junctions.
CorrectorRun truncated_corrector(const JunctionScenario &scenario, double rho,
                                 const CellParams &prm = {});

// Effective Hamiltonian H_bar(p) of a field 1-periodic in x (and
// 1-periodic, piecewise constant in t between its declared switch points)
// via the cell problem v_t + H(t, x, p + v_x) = 0, v(0,.) = 0, solved with
// periodic wrap on n_cell_nodes nodes.  For a p-only field this returns
// H(p) to machine accuracy: the discrete solution stays flat.
ErgodicEstimate effective_hamiltonian(
    const SpaceTimeHamiltonian &H, double p, int n_cell_nodes = 128,
    double T = 30.0,
    double requested_tol = std::numeric_limits<double>::infinity());

struct RhoPoint {
    double rho = 0.0, lambda = 0.0, lower = 0.0, upper = 0.0;
};

struct EffectiveModel {
    QuasiConvexHamiltonian H_bar_L, H_bar_R;
    double A_bar = 0.0;
    double A0 = 0.0;            // max of the outer branch minima
    double bracket_width = 0.0; // of the accepted lambda_rho
    SlopeQuadruple slopes{};    // level-set endpoints at max(A_bar, A0)
    std::vector<RhoPoint> provenance;
};

// Runs truncated correctors over an increasing rho schedule (default
// {r, 2r, 4r} with r = rho0 + 2), asserting lambda_rho non-decreasing up
// to bracket widths, and accepts the first run whose bracket overlaps its
// predecessor's within tol.  The outer branches are x-independent, so
// H_bar_L/H_bar_R are the branch Hamiltonians themselves.  Throws
// NotConverged if the sweep is exhausted without overlap, if monotonicity
// fails beyond the brackets, or if the estimate lands below A0 - tol.
EffectiveModel effective_flux_limiter(const JunctionScenario &scenario,
                                      const CellParams &prm = {},
                                      std::vector<double> rho_schedule = {},
                                      double tol = 0.02);

// Rescaled-corrector check: W_eps(x) = eps * (w(c + x/eps) - w(c)) against
// the cone spanned by the level-A_bar slopes,
//     p_bar_R x <= W(x) <= p_hat_R x   (x > 0, mirrored on the left),
// within slack 2 * osc_constant * eps + dx / eps.
struct SlopeReport {
    struct Row {
        double eps = 0.0;
        double slack = 0.0;
        double worst_violation = 0.0;
        double measured_left = 0.0, measured_right = 0.0; // far-field secants
        bool pass = false;
    };
    std::vector<Row> rows;
    double window = 0.0;
    bool all_pass = true;
};

SlopeReport corrector_slopes(const GridSolution &profile,
                             const EffectiveModel &model,
                             const std::vector<double> &epsilons,
                             double window = 1.0, double osc_constant = 1.0);

// Same, taking the oscillation constant from the run's own measurement.
SlopeReport corrector_slopes(const CorrectorRun &run, const EffectiveModel &model,
                             const std::vector<double> &epsilons,
                             double window = 1.0);

} // namespace hjlab

#endif
