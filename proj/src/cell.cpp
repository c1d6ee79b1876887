#include "hjlab/cell.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

namespace hjlab {

namespace {

bool aligned(double value, double dx) {
    const double s = value / dx;
    return std::abs(s - std::round(s)) <= 1e-9 * std::max(1.0, std::abs(s));
}

// dx that puts -rho, +rho, x = 0 and every junction on grid nodes.  The
// requested dx is kept when it already fits; otherwise powers of two are
// tried (dyadic positions are the common case).  A hopeless request is
// returned unchanged so Grid1D::over reports the misfit with geometry.
double corrector_dx(const JunctionScenario &sc, double rho, double dx_request) {
    auto fits = [&](double dx) {
        if (!aligned(2 * rho, dx) || !aligned(rho, dx)) return false;
        for (double b : sc.positions)
            if (!aligned(b + rho, dx)) return false;
        return true;
    };
    if (fits(dx_request)) return dx_request;
    double dx = std::pow(2.0, -std::ceil(std::log2(1.0 / dx_request) - 1e-12));
    for (int k = 0; k < 24; ++k, dx *= 0.5)
        if (dx <= dx_request * (1 + 1e-12) && fits(dx)) return dx;
    return dx_request;
}

int probe_node_for(const Grid1D &grid) {
    try {
        return grid.node_at(0.0);
    } catch (const JunctionOffGrid &) {
        // Junction node nearest to x = 0; any fixed probe works, the
        // oscillation bound makes the bracket probe-independent.
        int best = grid.n_nodes / 2;
        double dist = std::numeric_limits<double>::infinity();
        for (int j : grid.junction_indices) {
            const double d = std::abs(grid.x(j));
            if (d < dist) {
                dist = d;
                best = j;
            }
        }
        return best;
    }
}

} // namespace

CorrectorRun truncated_corrector(const JunctionScenario &scenario, double rho,
                                 const CellParams &prm) {
    scenario.validate();
    const double r0 = scenario.rho0();
    if (!(rho > r0)) {
        std::ostringstream os;
        os << "truncated_corrector: rho = " << rho
           << " must exceed the junction radius rho0 = " << r0;
        throw RhoTooSmall(os.str());
    }

    // Keep adjacent junctions at least 8 cells apart so near-merging
    // scenarios stay resolved.
    double dx_req = prm.dx;
    for (std::size_t a = 1; a < scenario.positions.size(); ++a)
        dx_req = std::min(
            dx_req, (scenario.positions[a] - scenario.positions[a - 1]) / 8.0);
    const double dx = corrector_dx(scenario, rho, dx_req);

    const Grid1D grid = Grid1D::over(-rho, rho, dx, scenario.positions);
    const Stepper st = make_scenario_stepper(
        scenario, grid, BoundaryCondition::envelope_minus(),
        BoundaryCondition::envelope_plus(), 1.0, prm.cfl_safety);

    SolveOptions opt;
    opt.probe_node = probe_node_for(grid);
    opt.L0 = 0.0;
    // The final unit period, sampled for the oscillation estimate (the
    // final time 2T is always snapshotted).
    for (int k = 0; k < 8; ++k)
        opt.snapshot_times.push_back(2 * prm.T - 1.0 + k / 8.0);

    const Eigen::ArrayXd w0 = Eigen::ArrayXd::Zero(grid.n_nodes);
    const Trajectory traj = solve_cauchy(st, w0, 0.0, 2 * prm.T, opt);

    const ErgodicEstimate raw =
        ergodic_constant(traj.trace_t, traj.trace_u, traj.C_barrier, rho,
                         prm.T, prm.requested_tol);

    CorrectorRun out{raw.negated(), traj.last(), 0.0, rho, opt.probe_node};
    const double lam = out.lambda_rho.lambda;
    for (int j = 0; j < grid.n_nodes; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const GridSolution &s : traj.snapshots) {
            const double v = s.values[j] + lam * s.t;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        out.time_oscillation = std::max(out.time_oscillation, hi - lo);
    }
    return out;
}

ErgodicEstimate effective_hamiltonian(const SpaceTimeHamiltonian &H, double p,
                                      int n_cell_nodes, double T,
                                      double requested_tol) {
    if (!H.eval)
        throw ConfigInvalid("effective_hamiltonian: eval is empty");
    if (!(p >= H.p_min && p <= H.p_max)) {
        std::ostringstream os;
        os << "effective_hamiltonian: p = " << p << " outside ["
           << H.p_min << ", " << H.p_max << "]";
        throw OutOfRange(os.str());
    }
    if (n_cell_nodes < 8)
        throw ConfigInvalid("effective_hamiltonian: n_cell_nodes < 8");

    // Per-node tabulations G_j(q) = H(t_k, x_j, p + q) on a q-window
    // aligned so q = 0 is a sample point: the p-only identity
    // H_bar(p) = H(p) then holds exactly in the discrete scheme.
    const double dq = 1.0 / 200.0;
    const long i_lo = static_cast<long>(std::ceil((H.p_min - p) / dq - 1e-9));
    const long i_hi = static_cast<long>(std::floor((H.p_max - p) / dq + 1e-9));
    if (i_hi - i_lo < 8)
        throw ConfigInvalid(
            "effective_hamiltonian: slope window narrower than 8 samples");
    const double q_lo = i_lo * dq, q_hi = i_hi * dq;
    const int n_samp = static_cast<int>(i_hi - i_lo) + 1;

    std::vector<double> taus = H.time_switch_taus;
    if (taus.empty()) taus = {0.0};

    std::vector<std::vector<std::shared_ptr<const QuasiConvexHamiltonian>>>
        per_node_by_phase(taus.size());
    for (std::size_t k = 0; k < taus.size(); ++k) {
        const double hi = (k + 1 < taus.size()) ? taus[k + 1] : 1.0;
        const double t_k = 0.5 * (taus[k] + hi); // phase value = midpoint value
        per_node_by_phase[k].reserve(n_cell_nodes);
        for (int j = 0; j < n_cell_nodes; ++j) {
            const double x_j = static_cast<double>(j) / n_cell_nodes;
            per_node_by_phase[k].push_back(
                std::make_shared<const QuasiConvexHamiltonian>(
                    [f = H.eval, t_k, x_j, p](double q) {
                        return f(t_k, x_j, p + q);
                    },
                    q_lo, q_hi, n_samp));
        }
    }

    const Stepper st =
        make_periodic_stepper(0.0, 1.0, std::move(per_node_by_phase), taus);

    SolveOptions opt;
    opt.probe_node = 0;
    opt.L0 = 0.0;
    const Eigen::ArrayXd v0 = Eigen::ArrayXd::Zero(n_cell_nodes);
    const Trajectory traj = solve_cauchy(st, v0, 0.0, 2 * T, opt);

    // Unit cell: radius 1 in the width bound.
    return ergodic_constant(traj.trace_t, traj.trace_u, traj.C_barrier, 1.0, T,
                            requested_tol)
        .negated();
}

EffectiveModel effective_flux_limiter(const JunctionScenario &scenario,
                                      const CellParams &prm,
                                      std::vector<double> rho_schedule,
                                      double tol) {
    scenario.validate();
    if (rho_schedule.empty()) {
        const double r = scenario.rho0() + 2.0;
        rho_schedule = {r, 2 * r, 4 * r};
    }
    if (rho_schedule.size() < 2)
        throw ConfigInvalid("effective_flux_limiter: rho schedule needs >= 2 entries");
    for (std::size_t i = 1; i < rho_schedule.size(); ++i)
        if (!(rho_schedule[i] > rho_schedule[i - 1]))
            throw ConfigInvalid("effective_flux_limiter: rho schedule must increase");

    const double A0 = scenario.A0();
    std::vector<RhoPoint> prov;
    std::optional<CorrectorRun> accepted;
    std::optional<CorrectorRun> prev;

    for (double rho : rho_schedule) {
        CorrectorRun run = truncated_corrector(scenario, rho, prm);
        const ErgodicEstimate &e = run.lambda_rho;
        prov.push_back({rho, e.lambda, e.lower, e.upper});

        if (prev) {
            const ErgodicEstimate &q = prev->lambda_rho;
            // lambda_rho is non-decreasing in rho; a drop beyond the
            // combined widths means the numerics cannot be trusted.
            if (e.lambda + e.width() + q.width() + 1e-12 < q.lambda) {
                std::ostringstream os;
                os << "effective_flux_limiter: lambda dropped from " << q.lambda
                   << " (rho = " << prev->rho << ") to " << e.lambda
                   << " (rho = " << run.rho << ") beyond the bracket widths";
                throw NotConverged(os.str());
            }
            const bool overlap = q.lower <= e.upper + tol &&
                                 e.lower <= q.upper + tol;
            if (overlap) {
                accepted = std::move(run);
                break;
            }
        }
        prev = std::move(run);
    }

    if (!accepted) {
        std::ostringstream os;
        os << "effective_flux_limiter: brackets kept drifting by more than "
           << tol << " over " << rho_schedule.size() << " rho values";
        throw NotConverged(os.str());
    }

    const ErgodicEstimate &e = accepted->lambda_rho;
    if (e.lambda + e.width() + tol < A0) {
        std::ostringstream os;
        os << "effective_flux_limiter: estimate " << e.lambda
           << " fell below the structural floor A0 = " << A0;
        throw NotConverged(os.str());
    }

    // The outer branches are x-independent, so their effective
    // Hamiltonians are the branches themselves; the slope cone is read at
    // the certified level max(A_bar, A0).
    const double level = std::max(e.lambda, A0);
    return EffectiveModel{scenario.branches.front(),
                          scenario.branches.back(),
                          e.lambda,
                          A0,
                          e.width(),
                          slope_quadruple(scenario.branches.front(),
                                          scenario.branches.back(), level),
                          std::move(prov)};
}

SlopeReport corrector_slopes(const GridSolution &profile,
                             const EffectiveModel &model,
                             const std::vector<double> &epsilons,
                             double window, double osc_constant) {
    if (epsilons.empty())
        throw ConfigInvalid("corrector_slopes: empty epsilon list");
    if (!(window > 0))
        throw ConfigInvalid("corrector_slopes: window must be positive");

    const Grid1D &g = profile.grid;
    const int c = probe_node_for(g);
    const double xc = g.x(c);
    const double reach = std::min(xc - g.x0, g.x_last() - xc);

    SlopeReport rep;
    rep.window = window;
    for (double eps : epsilons) {
        if (!(eps > 0))
            throw ConfigInvalid("corrector_slopes: epsilons must be positive");
        if (window > reach * eps + 1e-12) {
            std::ostringstream os;
            os << "corrector_slopes: window " << window
               << " needs w out to |x| = " << window / eps
               << " but the profile reaches " << reach;
            throw ProfileTooNarrow(os.str());
        }

        SlopeReport::Row row;
        row.eps = eps;
        row.slack = 2.0 * osc_constant * eps + g.dx / eps;

        const int span = static_cast<int>(std::floor(window / (eps * g.dx) + 1e-9));
        if (span < 4) {
            std::ostringstream os;
            os << "corrector_slopes: window " << window << " spans only "
               << span << " profile cells at eps = " << eps;
            throw ProfileTooNarrow(os.str());
        }
        const double w_c = profile.values[c];
        auto W = [&](int j) { return eps * (profile.values[j] - w_c); };

        double worst = 0.0;
        for (int o = -span; o <= span; ++o) {
            const int j = c + o;
            if (j < 0 || j >= g.n_nodes) continue;
            const double x = eps * (g.x(j) - xc);
            double lo, hi;
            if (x >= 0) {
                lo = model.slopes.p_bar_R * x;
                hi = model.slopes.p_hat_R * x;
            } else {
                lo = model.slopes.p_bar_L * x;
                hi = model.slopes.p_hat_L * x;
            }
            const double v = W(j);
            worst = std::max({worst, lo - v, v - hi});
        }
        row.worst_violation = worst;
        row.pass = worst <= row.slack;

        // Far-field secants over the outer half of the window.
        const int j_mid_r = c + std::max(1, span / 2), j_hi_r = c + span;
        const int j_mid_l = c - std::max(1, span / 2), j_lo_l = c - span;
        row.measured_right =
            (W(j_hi_r) - W(j_mid_r)) / (eps * g.dx * (j_hi_r - j_mid_r));
        row.measured_left =
            (W(j_mid_l) - W(j_lo_l)) / (eps * g.dx * (j_mid_l - j_lo_l));

        rep.all_pass = rep.all_pass && row.pass;
        rep.rows.push_back(row);
    }
    return rep;
}

SlopeReport corrector_slopes(const CorrectorRun &run, const EffectiveModel &model,
                             const std::vector<double> &epsilons,
                             double window) {
    return corrector_slopes(run.profile, model, epsilons, window,
                            std::max(run.time_oscillation, 0.5));
}

} // namespace hjlab
