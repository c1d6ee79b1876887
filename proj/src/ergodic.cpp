#include "hjlab/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hjlab/errors.hpp"

namespace hjlab {

ErgodicEstimate ergodic_constant(const std::vector<double> &t,
                                 const std::vector<double> &u, double L,
                                 double rho, double T, double requested_tol) {
    if (t.size() != u.size())
        throw ConfigInvalid("ergodic_constant: trace arrays differ in length");
    if (t.size() < 2)
        throw ConfigInvalid("ergodic_constant: trace needs at least two samples");
    if (!(T > 0))
        throw ConfigInvalid("ergodic_constant: averaging horizon must be positive");
    if (!(L >= 0) || !(rho >= 0))
        throw ConfigInvalid("ergodic_constant: L and rho must be non-negative");
    for (std::size_t i = 1; i < t.size(); ++i)
        if (!(t[i] > t[i - 1]))
            throw ConfigInvalid("ergodic_constant: trace times must strictly increase");

    const double t0 = t.front();
    const double tiny = 1e-9 * std::max(1.0, std::abs(t0) + 2 * T);
    if (t.back() < t0 + 2 * T - tiny) {
        std::ostringstream os;
        os << "ergodic_constant: trace ends at t = " << t.back()
           << " but [t0, t0 + 2T] = [" << t0 << ", " << t0 + 2 * T
           << "] is needed";
        throw HorizonTooShort(os.str());
    }
    const double width_bound = 2.0 * L * (1.0 + rho) / T;
    if (width_bound > requested_tol) {
        std::ostringstream os;
        os << "ergodic_constant: a-priori bracket width " << width_bound
           << " exceeds requested tolerance " << requested_tol
           << "; lengthen T";
        throw HorizonTooShort(os.str());
    }

    // Sweep tau over the samples in [t0, t0 + T]; a moving pointer keeps
    // the interpolation of u(tau + T) linear in the trace length.
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    std::size_t k = 0;
    for (std::size_t i = 0; i < t.size() && t[i] <= t0 + T + tiny; ++i) {
        const double target = t[i] + T;
        while (k + 1 < t.size() && t[k + 1] < target) ++k;
        double uT;
        if (k + 1 >= t.size()) {
            uT = u.back();
        } else {
            const double h = t[k + 1] - t[k];
            const double w = std::clamp((target - t[k]) / h, 0.0, 1.0);
            uT = (1.0 - w) * u[k] + w * u[k + 1];
        }
        const double r = (uT - u[i]) / T;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }

    ErgodicEstimate e;
    e.lower = lo;
    e.upper = hi;
    e.lambda = 0.5 * (lo + hi);
    e.T = T;
    e.width_bound = width_bound;
    return e;
}

} // namespace hjlab
