#include <doctest.h>

#include <cmath>

#include "hjlab/homogenize.hpp"
#include "oracles.hpp"

using namespace hjlab;
using doctest::Approx;

namespace {

JunctionScenario single_light(const PhaseSchedule &sched) {
    JunctionScenario s;
    s.positions = {0.0};
    s.branches = {QuasiConvexHamiltonian::vee(), QuasiConvexHamiltonian::vee()};
    s.schedules = {sched};
    return s;
}

} // namespace

TEST_CASE("initial data factories sample what they promise") {
    const Grid1D g = Grid1D::over(-1.0, 1.0, 0.25, {});

    const auto z = InitialDatum::zero();
    CHECK(z.lipschitz == 0.0);
    CHECK(z.sample(g).abs().maxCoeff() == 0.0);

    const auto lin = InitialDatum::linear(-0.75, 0.3);
    CHECK(lin.lipschitz == Approx(0.75));
    CHECK(lin.slope_left == Approx(-0.75));
    CHECK(lin.slope_right == Approx(-0.75));
    CHECK(lin.sample(g)[0] == Approx(-0.75 * -1.0 + 0.3));

    const auto k = InitialDatum::kink(0.5, 1.0, -2.0, 0.1);
    CHECK(k.lipschitz == Approx(2.0));
    CHECK(k.slope_left == Approx(1.0));
    CHECK(k.slope_right == Approx(-2.0));
    CHECK(k.f(0.5) == Approx(0.1));
    CHECK(k.f(0.0) == Approx(0.1 - 0.5));
    CHECK(k.f(1.0) == Approx(0.1 - 1.0));

    SUBCASE("an empty datum cannot be sampled") {
        InitialDatum hollow;
        CHECK_THROWS_AS((void)hollow.sample(g), ConfigInvalid);
    }
}

TEST_CASE("eps = 1 reduces to the plain junction solve") {
    const auto s = single_light(PhaseSchedule({0.0, 0.5}, {1.0, 0.0}));
    const Grid1D g = Grid1D::over(-2.0, 2.0, 0.05, {0.0});
    const auto u0 = InitialDatum::kink(0.0, 0.5, -0.5);

    SolveOptions opt;
    opt.snapshot_times = {0.4, 0.8};
    const auto osc = solve_oscillatory(s, 1.0, u0, 0.8, g, opt, 1);

    SolveOptions ref_opt = opt;
    ref_opt.L0 = u0.lipschitz;
    const auto ref = solve_cauchy(s, u0.sample(g), 0.8, g,
                                  BoundaryCondition::slope_extension(0.5),
                                  BoundaryCondition::slope_extension(-0.5),
                                  ref_opt);

    REQUIRE(osc.snapshots.size() == ref.snapshots.size());
    for (std::size_t k = 0; k < osc.snapshots.size(); ++k) {
        CHECK(osc.snapshots[k].t == ref.snapshots[k].t);
        CHECK((osc.snapshots[k].values - ref.snapshots[k].values)
                  .abs()
                  .maxCoeff() == 0.0);
    }
    CHECK(osc.C_barrier == ref.C_barrier);
}

TEST_CASE("under-resolved grids are refused with both numbers") {
    const auto s = single_light(PhaseSchedule({0.0, 0.5}, {1.0, 0.0}));
    const Grid1D g = Grid1D::over(-2.0, 2.0, 0.02, {0.0});
    const auto u0 = InitialDatum::zero();

    CHECK_THROWS_AS(
        (void)solve_oscillatory(s, 0.1, u0, 0.5, g, {}, 20),
        UnderResolved); // needs dx <= 0.1/20 = 0.005
    CHECK_THROWS_AS((void)solve_oscillatory(s, -0.5, u0, 0.5, g),
                    ConfigInvalid);
    CHECK_THROWS_AS((void)solve_oscillatory(s, 0.5, u0, 0.5, g, {}, 0),
                    ConfigInvalid);
    CHECK_THROWS_WITH_AS(
        (void)solve_oscillatory(s, 0.08, u0, 0.5, g, {}, 20),
        doctest::Contains("0.004"), UnderResolved);
}

TEST_CASE("linear data away from junctions advects exactly") {
    JunctionScenario s;
    s.branches = {QuasiConvexHamiltonian::vee()};
    s.schedules = {};
    const Grid1D g = Grid1D::over(-2.0, 2.0, 0.05, {});
    const auto u0 = InitialDatum::linear(0.3);

    for (double eps : {1.0, 0.25}) {
        const auto traj = solve_oscillatory(s, eps, u0, 1.0, g, {}, 1);
        double worst = 0;
        for (int j = 0; j < g.n_nodes; ++j)
            worst = std::max(worst, std::abs(traj.last().values[j] -
                                             (0.3 * g.x(j) - 0.3)));
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("the effective solve reproduces the steady junction profile") {
    EffectiveModel model{QuasiConvexHamiltonian::vee(),
                         QuasiConvexHamiltonian::vee(),
                         0.5,
                         0.0,
                         0.0,
                         {},
                         {}};

    const Grid1D g = Grid1D::over(-2.0, 2.0, 0.02, {0.0});
    const auto u0 = InitialDatum::kink(0.0, 0.5, -0.5);
    const auto traj = solve_effective(model, u0, 1.0, g);

    double worst = 0;
    for (int j = 0; j < g.n_nodes; ++j)
        worst = std::max(worst,
                         std::abs(traj.last().values[j] -
                                  oracles::vee_steady_profile(0.5, 1.0, g.x(j))));
    CHECK(worst <= 1e-11);

    SUBCASE("a limiter below the floor is clamped to the floor") {
        // Offset branches with min 0.25, requested limiter below the floor.
        EffectiveModel lifted{QuasiConvexHamiltonian::vee(0.25),
                              QuasiConvexHamiltonian::vee(0.25),
                              0.1,
                              0.25,
                              0.0,
                              {},
                              {}};
        const auto t2 = solve_effective(lifted, InitialDatum::zero(), 0.5, g);
        // Flat data on offset branches descends at the branch minimum.
        CHECK(t2.last().values[g.n_nodes / 2] ==
              Approx(-0.25 * 0.5).epsilon(1e-10));
    }
}

TEST_CASE("the epsilon sweep measures plain first-order homogenization") {
    const auto s = single_light(PhaseSchedule({0.0, 0.5}, {1.0, 0.0}));

    EffectiveModel model{QuasiConvexHamiltonian::vee(),
                         QuasiConvexHamiltonian::vee(),
                         0.5,
                         0.0,
                         0.0,
                         {},
                         {}};

    EpsilonSweep sweep;
    sweep.epsilons = {0.2, 0.1};
    sweep.T = 1.0;
    sweep.x_radius = 2.5;
    sweep.dx_effective = 1.0 / 64;
    sweep.oversample = 16;

    const auto rep = convergence_report(sweep, s, model);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].eps == 0.2);
    CHECK(rep.rows[1].eps == 0.1);
    CHECK(rep.window.x_hi == Approx(2.5 - 1.0)); // max |H'| = 1
    CHECK(rep.window.x_lo == Approx(-1.5));
    CHECK(rep.window.t_min == Approx(0.1));
    CHECK(rep.window.t_max == Approx(1.0));
    for (const auto &row : rep.rows) {
        CHECK(row.dx <= sweep.dx_effective + 1e-15);
        CHECK(row.dt > 0.0);
        CHECK(row.sup_error > 0.0);
        CHECK(row.sup_error <= 2.0 * row.eps); // O(eps) in practice
    }
    CHECK(rep.rows[1].sup_error <= rep.rows[0].sup_error + 1e-12);
    CHECK(rep.monotone_tail);
    CHECK_FALSE(rep.not_converging);

    SUBCASE("epsilon lists must strictly decrease") {
        EpsilonSweep bad = sweep;
        bad.epsilons = {0.1, 0.2};
        CHECK_THROWS_AS((void)convergence_report(bad, s, model),
                        ConfigInvalid);
        bad.epsilons = {};
        CHECK_THROWS_AS((void)convergence_report(bad, s, model),
                        ConfigInvalid);
    }
    SUBCASE("an empty measurement window is refused") {
        EpsilonSweep tight = sweep;
        tight.x_radius = 0.9; // max |H'| * T = 1 swallows the window
        CHECK_THROWS_AS((void)convergence_report(tight, s, model),
                        ConfigInvalid);
    }
}
