#include "hjlab/homogenize.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace hjlab {

InitialDatum InitialDatum::zero() {
    InitialDatum d;
    d.f = [](double) { return 0.0; };
    return d;
}

InitialDatum InitialDatum::linear(double slope, double offset) {
    InitialDatum d;
    d.f = [slope, offset](double x) { return offset + slope * x; };
    d.lipschitz = std::abs(slope);
    d.slope_left = d.slope_right = slope;
    d.name = "linear";
    return d;
}

InitialDatum InitialDatum::kink(double center, double slope_l, double slope_r,
                                double offset) {
    InitialDatum d;
    d.f = [center, slope_l, slope_r, offset](double x) {
        return offset + (x < center ? slope_l : slope_r) * (x - center);
    };
    d.lipschitz = std::max(std::abs(slope_l), std::abs(slope_r));
    d.slope_left = slope_l;
    d.slope_right = slope_r;
    d.name = "kink";
    return d;
}

Eigen::ArrayXd InitialDatum::sample(const Grid1D &g) const {
    if (!f) throw ConfigInvalid("InitialDatum: empty function");
    Eigen::ArrayXd u(g.n_nodes);
    for (int j = 0; j < g.n_nodes; ++j) u[j] = f(g.x(j));
    return u;
}

Trajectory solve_oscillatory(const JunctionScenario &scenario, double eps,
                             const InitialDatum &u0, double T,
                             const Grid1D &grid, const SolveOptions &opt,
                             int oversample, double cfl_safety) {
    scenario.validate();
    if (!(eps > 0))
        throw ConfigInvalid("solve_oscillatory: eps must be positive");
    if (oversample < 1)
        throw ConfigInvalid("solve_oscillatory: oversample must be >= 1");
    if (grid.dx > eps / oversample + 1e-12) {
        std::ostringstream os;
        os << "solve_oscillatory: dx = " << grid.dx
           << " is too coarse for eps = " << eps << " (need dx <= eps/"
           << oversample << " = " << eps / oversample << ")";
        throw UnderResolved(os.str());
    }

    JunctionScenario scaled = scenario;
    for (double &b : scaled.positions) b *= eps;

    const Stepper st = make_scenario_stepper(
        scaled, grid, BoundaryCondition::slope_extension(u0.slope_left),
        BoundaryCondition::slope_extension(u0.slope_right), eps, cfl_safety);

    SolveOptions o = opt;
    o.L0 = std::max(o.L0, u0.lipschitz);
    return solve_cauchy(st, u0.sample(grid), 0.0, T, o);
}

Trajectory solve_effective(const EffectiveModel &model, const InitialDatum &u0,
                           double T, const Grid1D &grid,
                           const SolveOptions &opt, double cfl_safety) {
    JunctionScenario eff;
    eff.positions = {0.0};
    eff.branches = {model.H_bar_L, model.H_bar_R};
    eff.schedules = {PhaseSchedule::constant(std::max(model.A_bar, model.A0))};

    const Stepper st = make_scenario_stepper(
        eff, grid, BoundaryCondition::slope_extension(u0.slope_left),
        BoundaryCondition::slope_extension(u0.slope_right), 1.0, cfl_safety);

    SolveOptions o = opt;
    o.L0 = std::max(o.L0, u0.lipschitz);
    return solve_cauchy(st, u0.sample(grid), 0.0, T, o);
}

ConvergenceReport convergence_report(const EpsilonSweep &sweep,
                                     const JunctionScenario &scenario,
                                     const EffectiveModel &model) {
    scenario.validate();
    if (sweep.epsilons.empty())
        throw ConfigInvalid("convergence_report: empty epsilon list");
    for (std::size_t i = 0; i < sweep.epsilons.size(); ++i) {
        if (!(sweep.epsilons[i] > 0))
            throw ConfigInvalid("convergence_report: epsilons must be positive");
        if (i > 0 && !(sweep.epsilons[i] < sweep.epsilons[i - 1]))
            throw ConfigInvalid("convergence_report: epsilons must strictly decrease");
    }
    if (!(sweep.T > 0) || !(sweep.x_radius > 0) || !(sweep.dx_effective > 0))
        throw ConfigInvalid("convergence_report: T, x_radius, dx_effective must be positive");
    if (!(sweep.t_min_frac >= 0 && sweep.t_min_frac < 1))
        throw ConfigInvalid("convergence_report: t_min_frac must lie in [0, 1)");

    double cmax = 0.0;
    for (const auto &h : scenario.branches)
        cmax = std::max(cmax, h.max_abs_slope());
    cmax = std::max({cmax, model.H_bar_L.max_abs_slope(),
                     model.H_bar_R.max_abs_slope()});

    const double T = sweep.T, R = sweep.x_radius;
    const double X = R - cmax * T;
    if (!(X > 0))
        throw ConfigInvalid(
            "convergence_report: window is empty; enlarge x_radius or shorten T");
    const double t_min = sweep.t_min_frac * T;

    std::vector<double> sample_times;
    for (int k = 0; k <= 8; ++k)
        sample_times.push_back(t_min + (T - t_min) * k / 8.0);

    const Grid1D gc = Grid1D::over(-R, R, sweep.dx_effective, {0.0});
    SolveOptions oc;
    oc.snapshot_times = sample_times;
    const Trajectory eff = solve_effective(model, sweep.u0, T, gc, oc);

    ConvergenceReport rep;
    rep.window = {t_min, T, -X, X};

    for (double eps : sweep.epsilons) {
        const auto tic = std::chrono::steady_clock::now();

        // Integer refinement of the coarse grid, fine enough for eps.
        const long m = static_cast<long>(
            std::ceil(sweep.dx_effective * sweep.oversample / eps - 1e-9));
        const double dxf = sweep.dx_effective / std::max(m, 1L);

        std::vector<double> junctions;
        for (double b : scenario.positions) junctions.push_back(eps * b);
        const Grid1D gf = Grid1D::over(-R, R, dxf, junctions);

        SolveOptions of;
        of.snapshot_times = sample_times;
        const Trajectory osc = solve_oscillatory(scenario, eps, sweep.u0, T, gf,
                                                 of, sweep.oversample);

        if (osc.snapshots.size() != eff.snapshots.size())
            throw GridMismatch("convergence_report: snapshot counts diverged");

        double sup = 0.0;
        for (std::size_t s = 0; s < eff.snapshots.size(); ++s) {
            const GridSolution &uc = eff.snapshots[s];
            const GridSolution &uf = osc.snapshots[s];
            if (std::abs(uc.t - uf.t) > 1e-6)
                throw GridMismatch("convergence_report: snapshot times diverged");
            if (uc.t < t_min - 1e-9) continue;
            for (int j = 0; j < gc.n_nodes; ++j) {
                const double x = gc.x(j);
                if (std::abs(x) > X + 1e-12) continue;
                sup = std::max(sup, std::abs(uf.value_at(x) - uc.values[j]));
            }
        }

        const double runtime =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - tic)
                .count();
        const double dt_bound = cmax > 0 ? 0.45 * dxf / cmax : 0.0;
        rep.rows.push_back({eps, dxf, dt_bound, sup, runtime});
    }

    const std::size_t n = rep.rows.size();
    for (std::size_t i = (n >= 3 ? n - 3 : 0); i + 1 < n; ++i)
        rep.monotone_tail =
            rep.monotone_tail &&
            rep.rows[i + 1].sup_error <= rep.rows[i].sup_error * 1.10 + 1e-15;
    rep.not_converging =
        rep.rows.back().sup_error > rep.rows.front().sup_error + 1e-15;
    return rep;
}

} // namespace hjlab
