// A junction scenario: N ordered junction points on the line, N+1 branch
// Hamiltonians, and one limiter schedule per junction.  This is the data
// the whole laboratory revolves around.
#ifndef HJLAB_SCENARIO_HPP
#define HJLAB_SCENARIO_HPP

#include <vector>

#include "hjlab/hamiltonian.hpp"
#include "hjlab/schedule.hpp"

namespace hjlab {

struct JunctionScenario {
    std::vector<double> positions;                     // b_1 < ... < b_N
    std::vector<QuasiConvexHamiltonian> branches;      // H_0 ... H_N
    std::vector<PhaseSchedule> schedules;              // a_1 ... a_N

    std::size_t n_junctions() const { return positions.size(); }

    // Structural checks: sizes line up, positions strictly increase, every
    // schedule value clears the minima of its two adjacent branches.  (The
    // time-modulus assumption on general Hamiltonians is vacuous here:
    // schedules are piecewise constant by construction.)
    void validate() const;

    // Radius of the region containing all junctions (0 when there are none).
    double rho0() const;

    // Floor for the effective limiter: max of the two outer branch minima.
    double A0() const;

    // Time-Lipschitz (barrier) constant for runs whose initial datum has
    // space-Lipschitz bound L0: the largest rate the equation can produce,
    //   max( max |schedule values| , max over branches of max |H| on [-L0, L0] ).
    double barrier_constant(double L0) const;

    // Largest slope a solution with time-Lipschitz bound C can develop:
    // the widest level-set endpoint with |H| <= C across branches.
    double slope_bound(double C) const;

    // Mean of the pointwise-max schedule <max_alpha a_alpha>.
    double mean_max_limiter() const;

    // Largest schedule mean across junctions.
    double max_mean_limiter() const;

    // Copy with every junction gap scaled by `s` about the junction
    // centroid (used by spacing-monotonicity and merging-limit checks).
    JunctionScenario scaled_spacing(double s) const;

    // Copy with gap `alpha` (between junction alpha and alpha+1, 0-based)
    // widened by delta; junctions above the gap translate right.
    JunctionScenario widened_gap(std::size_t alpha, double delta) const;
};

} // namespace hjlab

#endif
