// Explicit monotone (Godunov) time stepping for u_t + H = 0 on a 1D grid
// with flux-limited junction nodes.
//
// Every node update has the same shape:
//     u_j <- u_j - dt * max( A_j(t), plus_env(H_left_j)(p-), minus_env(H_right_j)(p+) )
// with one-sided slopes p- = (u_j - u_{j-1})/dx, p+ = (u_{j+1} - u_j)/dx.
// Interior nodes have no limiter (A = -inf) and the same Hamiltonian on
// both sides, which reduces the max to the classical Godunov flux; at a
// junction the two sides carry different branches and the limiter joins
// the max.  Under dt <= cfl_safety * dx / max|H'| the update is monotone
// in every neighbor, which is what every comparison-based test relies on.
//
// Limiters (and, when present, the Hamiltonian field itself) are piecewise
// constant in time; a single step must stay inside one phase.  The driver
// solve_cauchy splits the horizon at every switch time, realizing the
// successive-Cauchy-problems meaning of the equation.
#ifndef HJLAB_SOLVER_HPP
#define HJLAB_SOLVER_HPP

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hjlab/grid.hpp"
#include "hjlab/hamiltonian.hpp"
#include "hjlab/scenario.hpp"

namespace hjlab {

struct BoundaryCondition {
    enum class Kind { Dirichlet, EnvelopeMinus, EnvelopePlus, SlopeExtension };
    Kind kind = Kind::SlopeExtension;
    std::function<double(double)> trace; // Dirichlet value U0(t)
    double slope = 0.0;                  // SlopeExtension ghost slope

    static BoundaryCondition dirichlet(std::function<double(double)> u) {
        return {Kind::Dirichlet, std::move(u), 0.0};
    }
    static BoundaryCondition envelope_minus() { return {Kind::EnvelopeMinus, {}, 0.0}; }
    static BoundaryCondition envelope_plus() { return {Kind::EnvelopePlus, {}, 0.0}; }
    static BoundaryCondition slope_extension(double p) {
        return {Kind::SlopeExtension, {}, p};
    }
};

// Assembled, immutable description of one evolution problem.  The
// Hamiltonian field may be piecewise constant in time: phase k holds on
// [ham_phase_taus[k], ham_phase_taus[k+1]) within the unit period (a
// single-phase field uses taus = {0}).
struct StepperSpec {
    Grid1D grid;
    std::vector<std::shared_ptr<const QuasiConvexHamiltonian>> hams; // pool
    std::vector<double> ham_phase_taus{0.0};     // in [0, 1), first = 0
    std::vector<std::vector<int>> left_of_node;  // [phase][node] -> pool index
    std::vector<std::vector<int>> right_of_node; // [phase][node] -> pool index
    std::vector<int> limiter_of_node; // -1 (none) or schedule index
    std::vector<PhaseSchedule> schedules;
    double time_scale = 1.0; // schedules/phases run 1-periodically in t / time_scale
    BoundaryCondition bc_left, bc_right;
    bool periodic = false; // wrap slopes; boundary conditions unused
    double cfl_safety = 0.45;
};

class Stepper {
  public:
    explicit Stepper(StepperSpec spec);

    const Grid1D &grid() const { return spec_.grid; }
    double dx() const { return spec_.grid.dx; }
    int n_nodes() const { return spec_.grid.n_nodes; }
    double cfl_safety() const { return spec_.cfl_safety; }

    // Largest monotonicity-preserving step.
    double dt_max() const;

    // Earliest limiter/Hamiltonian switch time strictly after t (+inf if
    // the problem is autonomous).
    double next_switch_after(double t) const;

    // One explicit Euler step from time t.  Throws CflViolation if dt
    // exceeds dt_max, PhaseBoundaryCrossed if (t, t+dt) straddles a switch.
    void step(Eigen::ArrayXd &u, double t, double dt) const;

    // Largest |rate| the equation can produce on data with space-Lipschitz
    // bound L0: barrier constant for |u(t) - u0| <= C t.
    double barrier_constant(double L0) const;

    // Largest slope reachable once the time-Lipschitz bound is C.
    double slope_bound(double C) const;

    // Limiter value at a junction node at time t (used by diagnostics);
    // -inf at nodes without a limiter.
    double limiter_value(int node, double t) const;

    const StepperSpec &spec() const { return spec_; }

  private:
    int phase_at(double t) const;
    StepperSpec spec_;
    double max_slope_ = 0.0;
    std::vector<double> switch_taus_; // schedule + field switches in [0, 1)
};

// Binds a junction scenario to a grid.  The grid's junction nodes must
// coincide with the scenario positions (checked).  time_scale = eps yields
// the oscillatory problem: junctions already sit at eps*b in the grid and
// limiters run on period eps.
Stepper make_scenario_stepper(const JunctionScenario &scenario, const Grid1D &grid,
                              BoundaryCondition bc_left, BoundaryCondition bc_right,
                              double time_scale = 1.0, double cfl_safety = 0.45);

// Periodic-in-x problem with one Hamiltonian tabulation per node (cell
// problems with x-dependent H).  Node j sits at x0 + j * period / n, the
// last slope wraps back to node 0.
Stepper make_periodic_stepper(
    double x0, double period,
    std::vector<std::shared_ptr<const QuasiConvexHamiltonian>> per_node,
    double cfl_safety = 0.45);

// Same, with a field that is piecewise constant in time:
// per_node_by_phase[k][j] holds on [phase_taus[k], phase_taus[k+1]) of the
// unit period.
Stepper make_periodic_stepper(
    double x0, double period,
    std::vector<std::vector<std::shared_ptr<const QuasiConvexHamiltonian>>>
        per_node_by_phase,
    std::vector<double> phase_taus, double cfl_safety = 0.45);

struct SolveOptions {
    std::vector<double> snapshot_times; // final time always added
    int probe_node = -1;                // -1: no trace recorded
    double L0 = 0.0;                    // space-Lipschitz bound of u0
};

struct Trajectory {
    std::vector<GridSolution> snapshots;
    std::vector<double> trace_t, trace_u;
    double C_barrier = 0.0;    // certified time-Lipschitz bound
    double lip_space_cert = 0.0;
    int probe_node = -1;

    const GridSolution &last() const { return snapshots.back(); }
};

Trajectory solve_cauchy(const Stepper &st, const Eigen::ArrayXd &u0, double t0,
                        double T, const SolveOptions &opt = {});

// Convenience form: binds the scenario to the grid and integrates from u0
// over [0, T].
Trajectory solve_cauchy(const JunctionScenario &scenario, const Eigen::ArrayXd &u0,
                        double T, const Grid1D &grid, BoundaryCondition bc_left,
                        BoundaryCondition bc_right, const SolveOptions &opt = {});

// Nodewise ordering check across two trajectories on the same grid and
// snapshot times: true iff sub <= super + tol everywhere.
bool comparison_check(const Trajectory &sub, const Trajectory &super,
                      double tol = 1e-12);

} // namespace hjlab

#endif
