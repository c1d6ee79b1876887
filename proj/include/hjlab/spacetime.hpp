// A (t, x, p) Hamiltonian field with unit time period: the general input
// the laboratory accepts.  Junction scenarios embed into it (their branch
// Hamiltonians tiled along x); frozen (t, x)-slices come back out as
// tabulated quasi-convex Hamiltonians, which is how the cell-problem
// drivers consume the field.
#ifndef HJLAB_SPACETIME_HPP
#define HJLAB_SPACETIME_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/scenario.hpp"

namespace hjlab {

struct SpaceTimeHamiltonian {
    std::function<double(double t, double x, double p)> eval;
    double period_t = 1.0; // everything downstream normalizes to period 1

    // Phase starts within the unit period when the field is piecewise
    // constant in t; a stationary field declares just {0}.  Solvers split
    // their time steps at these points.
    std::vector<double> time_switch_taus{0.0};

    // Far-field forms as x -> -inf / +inf, when known.
    std::shared_ptr<const QuasiConvexHamiltonian> left_limit, right_limit;

    // Radius outside which the field no longer depends on x.
    double rho0 = 0.0;

    // Slope window used when freezing slices.
    double p_min = -3.0, p_max = 3.0;

    // Tabulated slice p -> H(t, x, p).  Throws NotQuasiConvex if the slice
    // fails validation.
    QuasiConvexHamiltonian freeze(double t, double x, int n_samples = 1201) const;

    static SpaceTimeHamiltonian stationary(std::function<double(double, double)> f_xp,
                                           double p_min = -3.0, double p_max = 3.0);
    static SpaceTimeHamiltonian from_hamiltonian(const QuasiConvexHamiltonian &h);

    // The scenario's field: the branch Hamiltonian of the interval
    // containing x (a junction point binds to its right branch).  Limiter
    // schedules are junction data, not part of the field, so they do not
    // appear here.
    static SpaceTimeHamiltonian from_scenario(const JunctionScenario &s);
};

// Probe-based validation of the standing structural assumptions: unit time
// period, quasi-convex and coercive slices, far-field agreement with the
// declared left/right limits.  Probes cover the declared phase midpoints
// in t and a fixed ladder of x values inside and outside [-rho0, rho0].
struct AssumptionReport {
    bool time_periodic = true;
    bool slices_quasi_convex = true;
    bool slices_coercive = true;
    bool far_field_ok = true; // trivially true when no limits are declared
    double worst_far_field_gap = 0.0;
    std::string first_failure; // empty when everything holds

    bool all() const {
        return time_periodic && slices_quasi_convex && slices_coercive &&
               far_field_ok;
    }
};

AssumptionReport check_assumptions(const SpaceTimeHamiltonian &H,
                                   double far_field_tol = 1e-7);

} // namespace hjlab

#endif
