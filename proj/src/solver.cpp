#include "hjlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hjlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Stepper::Stepper(StepperSpec spec) : spec_(std::move(spec)) {
    const int n = spec_.grid.n_nodes;
    if (n < 3) throw Error("stepper needs at least 3 nodes");
    const auto &taus = spec_.ham_phase_taus;
    bool taus_ok = !taus.empty() && taus.front() == 0.0 && taus.back() < 1.0;
    for (std::size_t k = 0; taus_ok && k + 1 < taus.size(); ++k)
        taus_ok = taus[k] < taus[k + 1];
    if (!taus_ok)
        throw Error("field phase offsets must start at 0, strictly increase, stay below 1");
    const std::size_t n_phases = taus.size();
    if (spec_.left_of_node.size() != n_phases || spec_.right_of_node.size() != n_phases)
        throw GridMismatch("per-phase node tables do not match the phase count");
    if (static_cast<int>(spec_.limiter_of_node.size()) != n)
        throw GridMismatch("per-node tables do not match the grid");
    auto in_pool = [&](int idx) {
        return idx >= 0 && idx < static_cast<int>(spec_.hams.size()) && spec_.hams[idx];
    };
    for (std::size_t k = 0; k < n_phases; ++k) {
        if (static_cast<int>(spec_.left_of_node[k].size()) != n ||
            static_cast<int>(spec_.right_of_node[k].size()) != n)
            throw GridMismatch("per-node tables do not match the grid");
        for (int j = 0; j < n; ++j)
            if (!in_pool(spec_.left_of_node[k][j]) || !in_pool(spec_.right_of_node[k][j]))
                throw Error("node Hamiltonian index outside the pool");
    }
    for (int j = 0; j < n; ++j)
        if (spec_.limiter_of_node[j] >= static_cast<int>(spec_.schedules.size()))
            throw Error("limiter index outside the schedule list");
    if (!(spec_.time_scale > 0)) throw Error("time_scale must be positive");
    if (!(spec_.cfl_safety > 0) || spec_.cfl_safety > 0.95)
        throw Error("cfl_safety must lie in (0, 0.95]");

    if (!spec_.periodic) {
        using K = BoundaryCondition::Kind;
        if (spec_.bc_left.kind == K::EnvelopePlus)
            throw ConfigInvalid("plus-envelope boundary belongs on the right end");
        if (spec_.bc_right.kind == K::EnvelopeMinus)
            throw ConfigInvalid("minus-envelope boundary belongs on the left end");
        if (spec_.bc_left.kind == K::Dirichlet && !spec_.bc_left.trace)
            throw ConfigInvalid("left Dirichlet boundary needs a trace function");
        if (spec_.bc_right.kind == K::Dirichlet && !spec_.bc_right.trace)
            throw ConfigInvalid("right Dirichlet boundary needs a trace function");
        if (spec_.limiter_of_node.front() >= 0 || spec_.limiter_of_node.back() >= 0)
            throw ConfigInvalid("limiters cannot sit on boundary nodes");
    }

    for (const auto &h : spec_.hams)
        max_slope_ = std::max(max_slope_, h->max_abs_slope());

    // Union of switch offsets inside the unit period.  Constant schedules
    // and single-phase fields contribute none, so an autonomous problem
    // reports no events at all.
    for (const auto &s : spec_.schedules)
        if (s.pieces() > 1)
            switch_taus_.insert(switch_taus_.end(), s.switch_times.begin(),
                                s.switch_times.end());
    if (n_phases > 1)
        switch_taus_.insert(switch_taus_.end(), taus.begin(), taus.end());
    std::sort(switch_taus_.begin(), switch_taus_.end());
    switch_taus_.erase(std::unique(switch_taus_.begin(), switch_taus_.end(),
                                   [](double a, double b) { return b - a < 1e-12; }),
                       switch_taus_.end());
}

double Stepper::dt_max() const {
    if (max_slope_ <= 0) return kInf;
    return spec_.cfl_safety * spec_.grid.dx / max_slope_;
}

int Stepper::phase_at(double t) const {
    const auto &taus = spec_.ham_phase_taus;
    if (taus.size() == 1) return 0;
    double s = t / spec_.time_scale;
    s -= std::floor(s); // reduce to [0, 1)
    int k = static_cast<int>(taus.size()) - 1;
    while (k > 0 && taus[k] > s) --k;
    return k;
}

double Stepper::next_switch_after(double t) const {
    if (switch_taus_.empty()) return kInf;
    // Work in period units; the slack makes "after" robust against a t
    // that sits on a switch up to floating-point noise.
    const double s = t / spec_.time_scale + 1e-9;
    double best = kInf;
    for (double tau : switch_taus_) {
        double k = std::floor(s - tau) + 1.0;
        if (k < 0) k = 0;
        best = std::min(best, k + tau);
    }
    return best * spec_.time_scale;
}

void Stepper::step(Eigen::ArrayXd &u, double t, double dt) const {
    const int n = spec_.grid.n_nodes;
    if (u.size() != n) throw GridMismatch("state size does not match the grid");
    if (dt < 0) throw Error("negative time step");
    if (dt == 0) return;
    const double dtm = dt_max();
    if (dt > dtm * (1 + 1e-9)) {
        std::ostringstream os;
        os << "dt = " << dt << " exceeds the monotonicity bound " << dtm;
        throw CflViolation(os.str());
    }
    const double ns = next_switch_after(t);
    if (t + dt > ns + 1e-9 * spec_.time_scale) {
        std::ostringstream os;
        os << "step [" << t << ", " << t + dt << "] crosses the limiter switch at "
           << ns;
        throw PhaseBoundaryCrossed(os.str());
    }

    // Limiters and the field phase are constant throughout the step;
    // sample them mid-step, safely inside the phase.
    const double t_mid = t + 0.5 * dt;
    std::vector<double> A(spec_.schedules.size());
    for (std::size_t i = 0; i < A.size(); ++i)
        A[i] = spec_.schedules[i].value_at(t_mid / spec_.time_scale);
    const auto &left_of = spec_.left_of_node[phase_at(t_mid)];
    const auto &right_of = spec_.right_of_node[phase_at(t_mid)];

    const double dx = spec_.grid.dx;
    static thread_local Eigen::ArrayXd u_new;
    u_new.resize(n);

    auto rate_at = [&](int j, double pm, double pp) {
        double r = std::max(spec_.hams[left_of[j]]->envelope_plus(pm),
                            spec_.hams[right_of[j]]->envelope_minus(pp));
        const int l = spec_.limiter_of_node[j];
        if (l >= 0) r = std::max(r, A[l]);
        return r;
    };

    for (int j = 1; j + 1 < n; ++j) {
        const double pm = (u[j] - u[j - 1]) / dx;
        const double pp = (u[j + 1] - u[j]) / dx;
        u_new[j] = u[j] - dt * rate_at(j, pm, pp);
    }

    if (spec_.periodic) {
        // The state is the periodic part of the solution: the slope wraps.
        const double p_wrap = (u[0] - u[n - 1]) / dx;
        u_new[0] = u[0] - dt * rate_at(0, p_wrap, (u[1] - u[0]) / dx);
        u_new[n - 1] =
            u[n - 1] - dt * rate_at(n - 1, (u[n - 1] - u[n - 2]) / dx, p_wrap);
    } else {
        using K = BoundaryCondition::Kind;
        switch (spec_.bc_left.kind) {
        case K::Dirichlet:
            u_new[0] = spec_.bc_left.trace(t + dt);
            break;
        case K::EnvelopeMinus: {
            // Absorbing end: only the non-increasing part of the local
            // branch acts, so nothing can propagate in from outside.
            const double pp = (u[1] - u[0]) / dx;
            u_new[0] = u[0] - dt * spec_.hams[right_of[0]]->envelope_minus(pp);
            break;
        }
        case K::SlopeExtension: {
            // Ghost node continuing the datum's far-field slope.
            const double pp = (u[1] - u[0]) / dx;
            u_new[0] = u[0] - dt * rate_at(0, spec_.bc_left.slope, pp);
            break;
        }
        default:
            throw ConfigInvalid("unsupported left boundary condition");
        }
        switch (spec_.bc_right.kind) {
        case K::Dirichlet:
            u_new[n - 1] = spec_.bc_right.trace(t + dt);
            break;
        case K::EnvelopePlus: {
            const double pm = (u[n - 1] - u[n - 2]) / dx;
            u_new[n - 1] =
                u[n - 1] - dt * spec_.hams[left_of[n - 1]]->envelope_plus(pm);
            break;
        }
        case K::SlopeExtension: {
            const double pm = (u[n - 1] - u[n - 2]) / dx;
            u_new[n - 1] = u[n - 1] - dt * rate_at(n - 1, pm, spec_.bc_right.slope);
            break;
        }
        default:
            throw ConfigInvalid("unsupported right boundary condition");
        }
    }

    u = u_new;
}

double Stepper::barrier_constant(double L0) const {
    // Every node rate is a max of limiter values and envelope terms; the
    // envelopes evaluated at slopes within [-L0, L0] land in
    // [min H, max H on [-L0, L0]], so a deep negative minimum bounds the
    // rate even when |H| is small near slope zero.
    double C = 0;
    for (const auto &s : spec_.schedules) C = std::max(C, s.max_abs());
    for (const auto &h : spec_.hams)
        C = std::max({C, h->max_abs_on(-L0, L0), std::abs(h->min_value())});
    return C;
}

double Stepper::slope_bound(double C) const {
    double L = 0;
    for (const auto &h : spec_.hams) L = std::max(L, h->slope_range_at_level(C));
    return L;
}

double Stepper::limiter_value(int node, double t) const {
    const int l = spec_.limiter_of_node.at(node);
    if (l < 0) return -kInf;
    return spec_.schedules[l].value_at(t / spec_.time_scale);
}

Stepper make_scenario_stepper(const JunctionScenario &scenario, const Grid1D &grid,
                              BoundaryCondition bc_left, BoundaryCondition bc_right,
                              double time_scale, double cfl_safety) {
    scenario.validate();
    const int n = grid.n_nodes;
    const int N = static_cast<int>(scenario.n_junctions());

    std::vector<int> jn(N);
    for (int a = 0; a < N; ++a) {
        jn[a] = grid.node_at(scenario.positions[a]);
        if (jn[a] <= 0 || jn[a] >= n - 1)
            throw JunctionOffGrid("junction nodes must be interior to the grid");
        if (a > 0 && jn[a] <= jn[a - 1])
            throw JunctionOffGrid("junctions collapse onto one node at this dx");
    }

    StepperSpec spec;
    spec.grid = grid;
    spec.grid.junction_indices.assign(jn.begin(), jn.end());
    spec.hams.reserve(scenario.branches.size());
    for (const auto &b : scenario.branches)
        spec.hams.push_back(std::make_shared<const QuasiConvexHamiltonian>(b));

    // Branch of the cell (node c, node c+1): the number of junction nodes
    // at or below c.  Node j borders cells j-1 and j.
    auto branch_of_cell = [&](int cell) {
        int k = 0;
        while (k < N && jn[k] <= cell) ++k;
        return k;
    };
    spec.left_of_node.assign(1, std::vector<int>(n));
    spec.right_of_node.assign(1, std::vector<int>(n));
    spec.limiter_of_node.assign(n, -1);
    for (int j = 0; j < n; ++j) {
        spec.left_of_node[0][j] = branch_of_cell(j - 1);
        spec.right_of_node[0][j] = branch_of_cell(j);
    }
    for (int a = 0; a < N; ++a) spec.limiter_of_node[jn[a]] = a;

    spec.schedules = scenario.schedules;
    spec.time_scale = time_scale;
    spec.bc_left = std::move(bc_left);
    spec.bc_right = std::move(bc_right);
    spec.cfl_safety = cfl_safety;
    return Stepper(std::move(spec));
}

Stepper make_periodic_stepper(
    double x0, double period,
    std::vector<std::shared_ptr<const QuasiConvexHamiltonian>> per_node,
    double cfl_safety) {
    return make_periodic_stepper(x0, period, {std::move(per_node)}, {0.0},
                                 cfl_safety);
}

Stepper make_periodic_stepper(
    double x0, double period,
    std::vector<std::vector<std::shared_ptr<const QuasiConvexHamiltonian>>>
        per_node_by_phase,
    std::vector<double> phase_taus, double cfl_safety) {
    if (per_node_by_phase.empty() || per_node_by_phase[0].empty())
        throw Error("periodic stepper needs at least one phase and one node");
    const int n = static_cast<int>(per_node_by_phase[0].size());
    if (n < 3 || !(period > 0))
        throw Error("periodic stepper needs >= 3 nodes and a positive period");
    StepperSpec spec;
    spec.grid = Grid1D{x0, period / n, n, {}};
    spec.ham_phase_taus = std::move(phase_taus);
    const std::size_t n_phases = per_node_by_phase.size();
    spec.left_of_node.assign(n_phases, std::vector<int>(n));
    spec.right_of_node.assign(n_phases, std::vector<int>(n));
    for (std::size_t k = 0; k < n_phases; ++k) {
        if (static_cast<int>(per_node_by_phase[k].size()) != n)
            throw GridMismatch("phases disagree on the node count");
        for (int j = 0; j < n; ++j) {
            const int idx = static_cast<int>(spec.hams.size());
            spec.hams.push_back(std::move(per_node_by_phase[k][j]));
            spec.left_of_node[k][j] = spec.right_of_node[k][j] = idx;
        }
    }
    spec.limiter_of_node.assign(n, -1);
    spec.periodic = true;
    spec.cfl_safety = cfl_safety;
    return Stepper(std::move(spec));
}

Trajectory solve_cauchy(const Stepper &st, const Eigen::ArrayXd &u0, double t0,
                        double T, const SolveOptions &opt) {
    if (u0.size() != st.n_nodes())
        throw GridMismatch("initial datum size does not match the grid");
    if (!(T >= t0)) throw Error("solve_cauchy needs T >= t0");
    if (opt.probe_node >= st.n_nodes())
        throw GridMismatch("probe node outside the grid");

    Trajectory traj;
    traj.probe_node = opt.probe_node;
    traj.C_barrier = st.barrier_constant(opt.L0);
    traj.lip_space_cert = std::max(opt.L0, st.slope_bound(traj.C_barrier));

    const double tol_t = 1e-9 * std::max({1.0, std::abs(t0), std::abs(T)});

    // Event times the march must hit exactly: limiter switches (a step may
    // not straddle one), requested snapshots, and the final time.
    std::vector<double> events;
    for (double s = st.next_switch_after(t0); s < T - tol_t;
         s = st.next_switch_after(s))
        events.push_back(s);
    for (double s : opt.snapshot_times)
        if (s > t0 + tol_t && s < T - tol_t) events.push_back(s);
    events.push_back(T);
    std::sort(events.begin(), events.end());
    events.erase(std::unique(events.begin(), events.end(),
                             [&](double a, double b) { return b - a < tol_t; }),
                 events.end());

    auto snapshot_requested = [&](double t) {
        for (double s : opt.snapshot_times)
            if (std::abs(s - t) <= tol_t) return true;
        return false;
    };

    Eigen::ArrayXd u = u0;
    auto push_snapshot = [&](double t) {
        traj.snapshots.push_back(
            GridSolution{st.grid(), t, u, traj.lip_space_cert, traj.C_barrier});
    };
    auto push_trace = [&](double t) {
        if (opt.probe_node >= 0) {
            traj.trace_t.push_back(t);
            traj.trace_u.push_back(u[opt.probe_node]);
        }
    };

    push_trace(t0);
    if (snapshot_requested(t0)) push_snapshot(t0);

    const double dtm = st.dt_max();
    double a = t0;
    for (std::size_t e = 0; e < events.size(); ++e) {
        const double b = events[e];
        const double len = b - a;
        if (len > 0) {
            long m = 1;
            if (std::isfinite(dtm) && len > dtm)
                m = static_cast<long>(std::ceil(len / dtm - 1e-12));
            const double dt = len / m;
            for (long i = 0; i < m; ++i) {
                st.step(u, a + i * dt, dt);
                push_trace(a + (i + 1) * dt);
            }
        }
        a = b;
        if (e + 1 == events.size() || snapshot_requested(b)) push_snapshot(b);
    }
    return traj;
}

Trajectory solve_cauchy(const JunctionScenario &scenario, const Eigen::ArrayXd &u0,
                        double T, const Grid1D &grid, BoundaryCondition bc_left,
                        BoundaryCondition bc_right, const SolveOptions &opt) {
    const Stepper st = make_scenario_stepper(scenario, grid, std::move(bc_left),
                                             std::move(bc_right));
    return solve_cauchy(st, u0, 0.0, T, opt);
}

bool comparison_check(const Trajectory &sub, const Trajectory &super, double tol) {
    if (sub.snapshots.size() != super.snapshots.size())
        throw GridMismatch("trajectories hold different snapshot counts");
    for (std::size_t k = 0; k < sub.snapshots.size(); ++k) {
        const auto &a = sub.snapshots[k];
        const auto &b = super.snapshots[k];
        if (!a.grid.same_as(b.grid) ||
            std::abs(a.t - b.t) > 1e-9 * std::max(1.0, std::abs(a.t)))
            throw GridMismatch("trajectories live on different grids or times");
        if (((a.values - b.values) > tol).any()) return false;
    }
    return true;
}

} // namespace hjlab
