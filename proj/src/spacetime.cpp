#include "hjlab/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hjlab {

QuasiConvexHamiltonian SpaceTimeHamiltonian::freeze(double t, double x,
                                                    int n_samples) const {
    if (!eval)
        throw ConfigInvalid("SpaceTimeHamiltonian::freeze: eval is empty");
    auto f = eval; // keep the slice alive independently of *this
    return QuasiConvexHamiltonian(
        [f, t, x](double p) { return f(t, x, p); }, p_min, p_max, n_samples);
}

SpaceTimeHamiltonian
SpaceTimeHamiltonian::stationary(std::function<double(double, double)> f_xp,
                                 double p_min, double p_max) {
    SpaceTimeHamiltonian H;
    H.eval = [f = std::move(f_xp)](double, double x, double p) {
        return f(x, p);
    };
    H.p_min = p_min;
    H.p_max = p_max;
    return H;
}

SpaceTimeHamiltonian
SpaceTimeHamiltonian::from_hamiltonian(const QuasiConvexHamiltonian &h) {
    auto hp = std::make_shared<const QuasiConvexHamiltonian>(h);
    SpaceTimeHamiltonian H;
    H.eval = [hp](double, double, double p) { return (*hp)(p); };
    H.left_limit = hp;
    H.right_limit = hp;
    H.p_min = hp->p_min();
    H.p_max = hp->p_max();
    return H;
}

SpaceTimeHamiltonian
SpaceTimeHamiltonian::from_scenario(const JunctionScenario &s) {
    s.validate();
    auto branches =
        std::make_shared<const std::vector<QuasiConvexHamiltonian>>(s.branches);
    auto positions =
        std::make_shared<const std::vector<double>>(s.positions);
    SpaceTimeHamiltonian H;
    H.eval = [branches, positions](double, double x, double p) {
        std::size_t b = std::upper_bound(positions->begin(), positions->end(), x) -
                        positions->begin();
        return (*branches)[b](p);
    };
    // The usable slope window is the intersection of the branch windows.
    double lo = branches->front().p_min(), hi = branches->front().p_max();
    for (const auto &h : *branches) {
        lo = std::max(lo, h.p_min());
        hi = std::min(hi, h.p_max());
    }
    H.p_min = lo;
    H.p_max = hi;
    H.left_limit =
        std::make_shared<const QuasiConvexHamiltonian>(branches->front());
    H.right_limit =
        std::make_shared<const QuasiConvexHamiltonian>(branches->back());
    H.rho0 = s.rho0();
    return H;
}

namespace {

std::string probe_tag(double t, double x) {
    std::ostringstream os;
    os << "(t=" << t << ", x=" << x << ")";
    return os.str();
}

} // namespace

AssumptionReport check_assumptions(const SpaceTimeHamiltonian &H,
                                   double far_field_tol) {
    if (!H.eval)
        throw ConfigInvalid("check_assumptions: eval is empty");
    AssumptionReport rep;
    auto note = [&rep](const std::string &what) {
        if (rep.first_failure.empty()) rep.first_failure = what;
    };

    // t probes: one per declared phase (midpoint), plus a generic time.
    std::vector<double> ts;
    std::vector<double> taus = H.time_switch_taus;
    if (taus.empty()) taus = {0.0};
    for (std::size_t k = 0; k < taus.size(); ++k) {
        double hi = (k + 1 < taus.size()) ? taus[k + 1] : 1.0;
        ts.push_back(0.5 * (taus[k] + hi));
    }
    ts.push_back(1.0 / 7.0);

    const double R = std::max(H.rho0, 1.0);
    const std::vector<double> xs = {0.0,     0.25,     -0.25, 1.0 / 3.0,
                                    -R * 0.5, R,        -R,   R + 1.5,
                                    -(R + 1.5)};

    // Slope probes stay strictly inside the window so interpolation slack
    // never gets in the way.
    std::vector<double> ps;
    for (int k = 0; k <= 6; ++k)
        ps.push_back(H.p_min + (H.p_max - H.p_min) * k / 6.0);

    // Unit time period, checked at every probe tuple.  The invariant is
    // exact equality; floating-point noise up to 1e-12 relative is ignored
    // so closed forms that reduce t mod 1 internally always pass.
    for (double t : ts)
        for (double x : {xs[0], xs[1], xs[5], xs[7]})
            for (double p : ps) {
                double a = H.eval(t, x, p), b = H.eval(t + 1.0, x, p);
                if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a))) {
                    rep.time_periodic = false;
                    note("period: H(t+1) != H(t) at " + probe_tag(t, x));
                }
            }

    // Quasi-convexity and coercivity of frozen slices.
    for (double t : ts)
        for (double x : xs) {
            try {
                QuasiConvexHamiltonian slice = H.freeze(t, x, 801);
                if (!slice.is_coercive()) {
                    rep.slices_coercive = false;
                    note("coercivity: flat window end at " + probe_tag(t, x));
                }
            } catch (const NotQuasiConvex &) {
                rep.slices_quasi_convex = false;
                note("quasi-convexity: slice fails at " + probe_tag(t, x));
            }
        }

    // Far-field agreement with the declared limits.
    auto far_gap = [&](const QuasiConvexHamiltonian &lim, double sign) {
        double worst = 0.0;
        double plo = std::max(H.p_min, lim.p_min());
        double phi = std::min(H.p_max, lim.p_max());
        for (double d : {1.0, 2.0, 4.0}) {
            double x = sign * (R + d);
            for (double t : ts)
                for (int k = 0; k <= 8; ++k) {
                    double p = plo + (phi - plo) * k / 8.0;
                    worst = std::max(worst,
                                     std::abs(H.eval(t, x, p) - lim(p)));
                }
        }
        return worst;
    };
    if (H.left_limit)
        rep.worst_far_field_gap =
            std::max(rep.worst_far_field_gap, far_gap(*H.left_limit, -1.0));
    if (H.right_limit)
        rep.worst_far_field_gap =
            std::max(rep.worst_far_field_gap, far_gap(*H.right_limit, +1.0));
    if (rep.worst_far_field_gap > far_field_tol) {
        rep.far_field_ok = false;
        note("far field: gap " + std::to_string(rep.worst_far_field_gap) +
             " beyond |x| = " + std::to_string(R));
    }
    return rep;
}

} // namespace hjlab
