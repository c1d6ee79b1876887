#include <doctest.h>

#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "hjlab/hamiltonian.hpp"
#include "oracles.hpp"

using namespace hjlab;
using doctest::Approx;

namespace {

// A deterministic grab bag of valid quasi-convex shapes.
std::vector<QuasiConvexHamiltonian> shape_zoo() {
    return {
        QuasiConvexHamiltonian::vee(0.0, 1.0, 0.0),
        QuasiConvexHamiltonian::vee(-0.3, 2.0, 0.5),
        QuasiConvexHamiltonian::quadratic(0.0, 1.0, 0.0),
        QuasiConvexHamiltonian::quadratic(-0.75, 0.5, 0.2),
        QuasiConvexHamiltonian::trapezoid(-1.0, 1.0, 1.0, 2.0, -0.5),
        QuasiConvexHamiltonian::trapezoid(-0.25, 0.5, 0.5, 0.5, 0.0),
    };
}

} // namespace

TEST_CASE("envelopes split H and rebuild it pointwise") {
    for (const auto &h : shape_zoo()) {
        bool max_identity = true, minus_monotone = true, plus_monotone = true,
             below = true;
        double prev_minus = 0, prev_plus = 0;
        for (int i = 0; i <= 600; ++i) {
            const double p = h.p_min() + (h.p_max() - h.p_min()) * i / 600.0;
            const double v = h(p);
            const double m = h.envelope_minus(p);
            const double q = h.envelope_plus(p);
            max_identity = max_identity && std::abs(std::max(m, q) - v) <= 1e-9;
            below = below && m <= v + 1e-12 && q <= v + 1e-12;
            if (i > 0) {
                minus_monotone = minus_monotone && m <= prev_minus + 1e-12;
                plus_monotone = plus_monotone && q >= prev_plus - 1e-12;
            }
            prev_minus = m;
            prev_plus = q;
        }
        CHECK(max_identity);
        CHECK(minus_monotone);
        CHECK(plus_monotone);
        CHECK(below);
        // Both envelopes bottom out at the minimum value.
        CHECK(h.envelope_minus(h.p_max()) == Approx(h.min_value()));
        CHECK(h.envelope_plus(h.p_min()) == Approx(h.min_value()));
    }
}

TEST_CASE("quasi-convexity validation rejects a W shape") {
    CHECK_THROWS_AS(QuasiConvexHamiltonian(
                        [](double p) { return std::min(std::abs(p - 1.0),
                                                       std::abs(p + 1.0)); },
                        -3.0, 3.0),
                    NotQuasiConvex);
    // A hair of noise on a vee stays below the relative tolerance knob.
    CHECK_NOTHROW(QuasiConvexHamiltonian(
        [](double p) { return std::abs(p) + 1e-15 * std::cos(40 * p); }, -3.0,
        3.0, 1201, 1e-12));
}

TEST_CASE("coercivity concerns the tabulated window, not the shape") {
    const auto h = QuasiConvexHamiltonian::vee();
    CHECK(h.is_coercive());
    CHECK(h.is_coercive(2.9));     // ends reach 3 above the 0 minimum
    CHECK_FALSE(h.is_coercive(3.0));

    // The same vee re-tabulated around its bottom stops being coercive.
    const auto flat = h.retabulated(-0.25, 0.25);
    CHECK(flat.is_coercive());      // still rises 0.25 above the minimum
    CHECK_FALSE(flat.is_coercive(0.25));
}

TEST_CASE("minimizer and minimum value") {
    CHECK(QuasiConvexHamiltonian::vee(0.25, 2.0, 0.5).minimizer() == Approx(0.5));
    CHECK(QuasiConvexHamiltonian::vee(0.25, 2.0, 0.5).min_value() == Approx(0.25));
    CHECK(QuasiConvexHamiltonian::quadratic(-0.75, 0.5, 0.2).minimizer() ==
          Approx(-0.75));
    const auto trap = QuasiConvexHamiltonian::trapezoid(-1.0, 1.0, 1.0, 1.0, 0.5);
    CHECK(trap.min_value() == Approx(0.5));
    CHECK(trap.minimizer() == Approx(-1.0)); // smallest minimizer: left edge
}

TEST_CASE("level-set endpoints against a bisection oracle") {
    const auto quad = QuasiConvexHamiltonian::quadratic(0.3, 1.2, -0.4);
    const auto f = [](double p) { return -0.4 + 1.2 * (p - 0.3) * (p - 0.3); };
    for (double lambda : {-0.2, 0.1, 0.9}) {
        const auto right = quad.level_set_endpoints(lambda, true);
        const auto left = quad.level_set_endpoints(lambda, false);
        const double oracle_r = oracles::bisect_level(f, lambda, 0.3, 3.0, true);
        const double oracle_l = oracles::bisect_level(f, lambda, -3.0, 0.3, false);
        CHECK(right.first == Approx(oracle_r).epsilon(1e-4));
        CHECK(right.second == Approx(oracle_r).epsilon(1e-4));
        CHECK(left.first == Approx(oracle_l).epsilon(1e-4));
        CHECK(left.second == Approx(oracle_l).epsilon(1e-4));
    }

    SUBCASE("vee at half height") {
        const auto h = QuasiConvexHamiltonian::vee();
        CHECK(h.level_set_endpoints(0.5, true).first == Approx(0.5));
        CHECK(h.level_set_endpoints(0.5, false).second == Approx(-0.5));
    }

    SUBCASE("flat bottom returns the argmin interval at the minimum") {
        const auto trap =
            QuasiConvexHamiltonian::trapezoid(-1.0, 1.0, 1.0, 1.0, 0.0);
        const auto at_min = trap.level_set_endpoints(0.0, true);
        CHECK(at_min.first == Approx(-1.0).epsilon(1e-6));
        CHECK(at_min.second == Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("below the minimum throws") {
        CHECK_THROWS_AS(QuasiConvexHamiltonian::vee().level_set_endpoints(
                            -0.5, true),
                        BelowMinimum);
    }
}

TEST_CASE("junction function: monotone in A, invisible at the minimum") {
    const auto hl = QuasiConvexHamiltonian::vee(0.0, 1.0, 0.0);
    const auto hr = QuasiConvexHamiltonian::quadratic(0.0, 1.0, 0.0);

    bool monotone_A = true, invisible = true, monotone_pL = true,
         antitone_pR = true;
    for (int i = -10; i <= 10; ++i) {
        const double p = 0.25 * i;
        // Limiter at the common minimum reproduces the plain Godunov flux.
        invisible = invisible &&
                    std::abs(junction_function(0.0, hl, hl, p, p) -
                             godunov_flux(hl, p, p)) <= 1e-12 &&
                    std::abs(godunov_flux(hl, p, p) - hl(p)) <= 1e-9;
        double prev = junction_function(-1.0, hl, hr, p, -p);
        for (double A : {-0.5, 0.0, 0.5, 1.0}) {
            const double cur = junction_function(A, hl, hr, p, -p);
            monotone_A = monotone_A && cur >= prev - 1e-12 && cur >= A;
            prev = cur;
        }
        if (i > -10) {
            monotone_pL = monotone_pL &&
                          junction_function(0.2, hl, hr, p, 0.3) >=
                              junction_function(0.2, hl, hr, p - 0.25, 0.3) - 1e-12;
            antitone_pR = antitone_pR &&
                          junction_function(0.2, hl, hr, 0.3, p) <=
                              junction_function(0.2, hl, hr, 0.3, p - 0.25) + 1e-12;
        }
    }
    CHECK(monotone_A);
    CHECK(invisible);
    CHECK(monotone_pL);
    CHECK(antitone_pR);
}

TEST_CASE("slope quadruple orders the cone") {
    const auto h = QuasiConvexHamiltonian::vee();
    const auto s = slope_quadruple(h, h, 0.5);
    CHECK(s.p_bar_L == Approx(-0.5));
    CHECK(s.p_hat_L == Approx(-0.5));
    CHECK(s.p_bar_R == Approx(0.5));
    CHECK(s.p_hat_R == Approx(0.5));

    // Flat-bottomed branches split bar (inner) from hat (outer).
    const auto trap = QuasiConvexHamiltonian::trapezoid(-1.0, 1.0, 1.0, 1.0, 0.0);
    const auto st = slope_quadruple(trap, trap, 0.0);
    CHECK(st.p_bar_R == Approx(-1.0).epsilon(1e-6));
    CHECK(st.p_hat_R == Approx(1.0).epsilon(1e-6));
    CHECK(st.p_bar_L == Approx(1.0).epsilon(1e-6));
    CHECK(st.p_hat_L == Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("descriptor round-trips every factory shape") {
    for (const auto &h : shape_zoo()) {
        const auto back = QuasiConvexHamiltonian::from_descriptor(h.descriptor());
        REQUIRE(back.n_samples() == h.n_samples());
        CHECK(back.p_min() == Approx(h.p_min()));
        CHECK(back.p_max() == Approx(h.p_max()));
        double worst = 0;
        for (int i = 0; i < h.n_samples(); ++i)
            worst = std::max(worst, std::abs(back.values()[i] - h.values()[i]));
        CHECK(worst <= 1e-12);
    }

    SUBCASE("tables survive too") {
        const auto h = QuasiConvexHamiltonian(
            [](double p) { return p * p * p * p - p; }, 0.4, 3.0, 301);
        const auto back = QuasiConvexHamiltonian::from_descriptor(h.descriptor());
        CHECK(back.n_samples() == h.n_samples());
        CHECK(back(1.0) == Approx(h(1.0)));
    }
}

TEST_CASE("slope bounds power the CFL and barrier constants") {
    const auto h = QuasiConvexHamiltonian::vee(0.0, 2.0, 0.5);
    CHECK(h.max_abs_slope() == Approx(2.0).epsilon(1e-6));
    CHECK(h.max_abs_on(-1.0, 1.0) == Approx(3.0).epsilon(1e-6)); // |H(-1)| = 3
    CHECK(h.max_abs_on(0.5, 0.5) == Approx(0.0).epsilon(1e-6));
    CHECK(h.slope_range_at_level(1.0) >= 0.5);
}

TEST_CASE("max of envelopes is exactly H for random quasi-convex shapes") {
    std::mt19937_64 rng(2026);
    for (int trial = 0; trial < 25; ++trial) {
        const double center = -1.0 + 0.25 * static_cast<double>(rng() % 9);
        const double slope = 0.5 + 0.5 * static_cast<double>(rng() % 4);
        const double offset = -1.0 + 0.5 * static_cast<double>(rng() % 5);
        const auto h = (trial % 2 == 0)
                           ? QuasiConvexHamiltonian::vee(offset, slope, center)
                           : QuasiConvexHamiltonian::quadratic(center, slope,
                                                               offset);
        bool ok = true;
        for (int i = 0; i <= 240; ++i) {
            const double p = -3.0 + 6.0 * i / 240.0;
            ok = ok && std::abs(std::max(h.envelope_minus(p),
                                         h.envelope_plus(p)) -
                                h(p)) <= 1e-9;
        }
        CHECK(ok);
    }
}
