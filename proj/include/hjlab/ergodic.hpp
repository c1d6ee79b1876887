// Two-sided ergodic-constant brackets from long-time traces:
//     lambda_plus(T)  = sup over sampled tau of (u(tau+T) - u(tau)) / T
//     lambda_minus(T) = inf over the same window,
// with the a-priori width bound 2 L (1 + rho) / T coming from the barrier
// and Lipschitz certificates of the run that produced the trace.  The
// point estimate is the bracket midpoint.
#ifndef HJLAB_ERGODIC_HPP
#define HJLAB_ERGODIC_HPP

#include <limits>
#include <vector>

namespace hjlab {

struct ErgodicEstimate {
    double lambda = 0.0;
    double lower = 0.0, upper = 0.0; // lambda^-(T), lambda^+(T)
    double T = 0.0;
    double width_bound = 0.0; // 2 L (1 + rho) / T

    double width() const { return upper - lower; }

    // The bracket for -u.  Solver runs integrate w_t + H = 0 from
    // w(0,.) = 0, so their traces grow like -(ergodic constant) t; the
    // drivers negate on the way out.
    ErgodicEstimate negated() const {
        return {-lambda, -upper, -lower, T, width_bound};
    }
};

// trace (t[i], u[i]) must cover [t.front(), t.front() + 2T]; tau then runs
// over the first half and u(tau + T) is linearly interpolated.  L is a
// certified rate (barrier) bound for the run and rho the domain radius;
// they enter only through the a-priori width bound.  Throws
// HorizonTooShort if the trace is shorter than 2T or the width bound
// exceeds requested_tol.
ErgodicEstimate
ergodic_constant(const std::vector<double> &t, const std::vector<double> &u,
                 double L, double rho, double T,
                 double requested_tol = std::numeric_limits<double>::infinity());

} // namespace hjlab

#endif
