#include <doctest.h>

#include <cmath>
#include <memory>

#include "hjlab/spacetime.hpp"

using namespace hjlab;
using doctest::Approx;

namespace {

QuasiConvexHamiltonian vee(double slope, double p_min = -3.0,
                           double p_max = 3.0) {
    return QuasiConvexHamiltonian(
        [slope](double p) { return slope * std::abs(p); }, p_min, p_max);
}

PhaseSchedule half_and_half(double a_on, double a_off) {
    return PhaseSchedule({0.0, 0.5}, {a_on, a_off});
}

} // namespace

TEST_CASE("a scenario's field picks the branch containing x") {
    JunctionScenario s;
    s.positions = {0.0};
    s.branches = {vee(1.0), vee(2.0)};
    s.schedules = {half_and_half(1.0, 0.0)};

    const auto H = SpaceTimeHamiltonian::from_scenario(s);
    // The junction point itself binds to its right branch.
    CHECK(H.eval(0.3, 0.0, 1.0) == Approx(2.0));
    CHECK(H.eval(0.3, -1e-9, 1.0) == Approx(1.0));
    CHECK(H.eval(0.3, 2.0, 1.0) == Approx(2.0));
    // Limiter schedules are junction data, not part of the field: the value
    // at the junction does not depend on t.
    CHECK(H.eval(0.1, 0.0, 1.0) == H.eval(0.9, 0.0, 1.0));

    REQUIRE(H.left_limit);
    REQUIRE(H.right_limit);
    CHECK((*H.left_limit)(1.0) == Approx(1.0));
    CHECK((*H.right_limit)(1.0) == Approx(2.0));
    CHECK(H.rho0 == s.rho0());

    SUBCASE("slope window is the intersection of the branch windows") {
        JunctionScenario t = s;
        t.branches = {vee(1.0, -3.0, 3.0), vee(2.0, -2.0, 4.0)};
        const auto G = SpaceTimeHamiltonian::from_scenario(t);
        CHECK(G.p_min == Approx(-2.0));
        CHECK(G.p_max == Approx(3.0));
    }
}

TEST_CASE("a valid scenario's field passes every structural check") {
    JunctionScenario s;
    s.positions = {-0.5, 1.0};
    s.branches = {vee(1.0), vee(1.5), vee(1.0)};
    s.schedules = {half_and_half(0.8, 0.2), half_and_half(0.6, 0.4)};

    const auto rep = check_assumptions(SpaceTimeHamiltonian::from_scenario(s));
    CHECK(rep.all());
    CHECK(rep.first_failure.empty());
    CHECK(rep.worst_far_field_gap <= 1e-9);
}

TEST_CASE("a bump persisting past rho0 is flagged as a far-field gap") {
    auto H = SpaceTimeHamiltonian::stationary(
        [](double x, double p) { return std::abs(p) + 0.3 / (1.0 + x * x); });
    H.rho0 = 1.0;
    H.left_limit = std::make_shared<const QuasiConvexHamiltonian>(vee(1.0));
    H.right_limit = H.left_limit;

    const auto rep = check_assumptions(H);
    CHECK_FALSE(rep.far_field_ok);
    CHECK_FALSE(rep.all());
    // Nearest probe sits at |x| = rho0 + 1 = 2, where the bump is 0.3/5.
    CHECK(rep.worst_far_field_gap == Approx(0.06));
    CHECK(rep.first_failure.substr(0, 9) == "far field");
    // Periodicity and slice structure are untouched by the bump.
    CHECK(rep.time_periodic);
    CHECK(rep.slices_quasi_convex);
    CHECK(rep.slices_coercive);
}

TEST_CASE("a drifting field fails the unit-period check") {
    SpaceTimeHamiltonian H;
    H.eval = [](double t, double, double p) { return std::abs(p) + 0.1 * t; };
    const auto rep = check_assumptions(H);
    CHECK_FALSE(rep.time_periodic);
    CHECK(rep.first_failure.substr(0, 6) == "period");
}

TEST_CASE("a W-shaped slice fails quasi-convexity") {
    const auto H = SpaceTimeHamiltonian::stationary([](double, double p) {
        const double q = p * p - 1.0;
        return 0.5 * q * q;
    });
    const auto rep = check_assumptions(H);
    CHECK_FALSE(rep.slices_quasi_convex);
    CHECK(rep.first_failure.substr(0, 15) == "quasi-convexity");
}

TEST_CASE("a slice that never climbs above its minimum fails coercivity") {
    const auto H =
        SpaceTimeHamiltonian::stationary([](double, double) { return 0.0; });
    const auto rep = check_assumptions(H);
    CHECK(rep.slices_quasi_convex); // constants are fine shape-wise
    CHECK_FALSE(rep.slices_coercive);
}

TEST_CASE("freeze tabulates the slice at the requested point") {
    const double pi = std::acos(-1.0);
    const auto H = SpaceTimeHamiltonian::stationary([pi](double x, double p) {
        return std::abs(p) - 0.5 * (1.0 + std::cos(2 * pi * x));
    });

    const auto slice = H.freeze(0.3, 0.0);
    CHECK(slice.min_value() == Approx(-1.0));
    CHECK(slice.minimizer() == Approx(0.0));
    for (double p : {-2.5, -1.0, 0.0, 0.5, 2.0})
        CHECK(slice(p) == Approx(H.eval(0.3, 0.0, p)).epsilon(1e-10));

    const auto off_center = H.freeze(0.0, 0.25);
    CHECK(off_center.min_value() == Approx(-0.5));

    SUBCASE("freezing an empty field is a configuration error") {
        SpaceTimeHamiltonian empty;
        CHECK_THROWS_AS((void)empty.freeze(0.0, 0.0), ConfigInvalid);
    }
}

TEST_CASE("a bare Hamiltonian lifts to a constant field") {
    const auto h = QuasiConvexHamiltonian(
        [](double p) { return (p - 0.5) * (p - 0.5); }, -2.0, 2.0);
    const auto H = SpaceTimeHamiltonian::from_hamiltonian(h);

    CHECK(H.p_min == Approx(-2.0));
    CHECK(H.p_max == Approx(2.0));
    CHECK(H.eval(5.0, 7.0, 1.0) == Approx(h(1.0)));
    CHECK(H.eval(-3.0, 0.0, -1.5) == Approx(h(-1.5)));
    REQUIRE(H.left_limit);
    CHECK(check_assumptions(H).all());
}
