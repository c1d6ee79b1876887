#include "hjlab/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hjlab {

CheckReport check_n1_identity(const JunctionScenario &s, const CellParams &prm,
                              double tol) {
    if (s.n_junctions() != 1)
        throw ConfigInvalid("check_n1_identity: scenario must have exactly one junction");
    const double mean = mean_limiter(s.schedules[0]);
    const EffectiveModel m = effective_flux_limiter(s, prm, {}, tol);

    CheckReport rep;
    rep.check = "n1_identity";
    CheckRow row{"A_bar = <a_1>", mean, m.A_bar, m.bracket_width,
                 std::abs(m.A_bar - mean) <= tol + m.bracket_width, ""};
    rep.add(row);
    if (!rep.pass) {
        std::ostringstream os;
        os << "check_n1_identity: A_bar = " << m.A_bar << " vs <a_1> = "
           << mean << " differ by more than tol " << tol << " + bracket "
           << m.bracket_width;
        throw ToleranceExceeded(os.str());
    }
    return rep;
}

CheckReport check_lower_bound(const JunctionScenario &s, const CellParams &prm,
                              double tol) {
    const double target = std::max(s.A0(), s.max_mean_limiter());
    const EffectiveModel m = effective_flux_limiter(s, prm);

    CheckReport rep;
    rep.check = "lower_bound";
    rep.add({"A_bar + bracket >= max(A0, max<a>)", target, m.A_bar,
             m.bracket_width, m.A_bar + m.bracket_width >= target - tol, ""});
    return rep;
}

CheckReport check_monotonicity_in_spacing(const JunctionScenario &base,
                                          const std::vector<double> &spacing_deltas,
                                          const CellParams &prm, double tol) {
    base.validate();
    CheckReport rep;
    rep.check = "monotonicity_in_spacing";

    const EffectiveModel m0 = effective_flux_limiter(base, prm);
    rep.add({"base", m0.A_bar, m0.A_bar, m0.bracket_width, true, "reference"});

    if (base.n_junctions() < 2) {
        rep.rows.back().note = "single light: spacing vacuous";
        return rep;
    }
    for (double delta : spacing_deltas) {
        if (!(delta > 0))
            throw ConfigInvalid("check_monotonicity_in_spacing: deltas must be positive");
        for (std::size_t alpha = 0; alpha + 1 < base.n_junctions(); ++alpha) {
            const JunctionScenario wide = base.widened_gap(alpha, delta);
            const EffectiveModel m = effective_flux_limiter(wide, prm);
            std::ostringstream name;
            name << "gap[" << alpha << "] + " << delta;
            rep.add({name.str(), m0.A_bar, m.A_bar,
                     m.bracket_width + m0.bracket_width,
                     m.A_bar <= m0.A_bar + m.bracket_width + m0.bracket_width + tol,
                     "wider spacing must not raise A_bar"});
        }
    }
    return rep;
}

CheckReport check_merging_limit(const JunctionScenario &base,
                                const std::vector<double> &scales,
                                const CellParams &prm, double tol) {
    base.validate();
    if (scales.size() < 2)
        throw ConfigInvalid("check_merging_limit: need at least two scales");
    for (std::size_t i = 1; i < scales.size(); ++i)
        if (!(scales[i] < scales[i - 1] && scales[i] > 0))
            throw ConfigInvalid("check_merging_limit: scales must decrease and stay positive");

    // <max_alpha a_alpha> is invariant under spacing changes.
    const double target = base.mean_max_limiter();

    CheckReport rep;
    rep.check = "merging_limit";
    double prev_err = 0.0, prev_bracket = 0.0;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        const JunctionScenario sc = base.scaled_spacing(scales[i]);
        const EffectiveModel m = effective_flux_limiter(sc, prm);
        const double err = std::abs(m.A_bar - target);
        std::ostringstream name;
        name << "scale " << scales[i];
        const bool pass =
            i == 0 || err <= prev_err + prev_bracket + m.bracket_width + tol;
        rep.add({name.str(), target, m.A_bar, m.bracket_width, pass,
                 "|A_bar - <max a>| must shrink as lights merge"});
        prev_err = err;
        prev_bracket = m.bracket_width;
    }
    return rep;
}

CriticalDistance critical_distance_estimate(const JunctionScenario &s) {
    s.validate();
    CriticalDistance out;
    const std::size_t N = s.n_junctions();
    if (N <= 1) return out; // spacing is vacuous

    const double level = s.max_mean_limiter();
    const double C = s.barrier_constant(0.0);

    for (std::size_t b = 1; b < N; ++b) { // branches between two junctions
        const QuasiConvexHamiltonian &h = s.branches[b];
        const double scale =
            std::max(1.0, std::abs(level) + std::abs(h.min_value()));
        if (level <= h.min_value() + 1e-12 * scale)
            return {0.0, true};
        const auto argmin = h.level_set_endpoints(h.min_value(), true);
        const double p_bar_R = h.level_set_endpoints(level, true).first;
        const double p_bar_L = h.level_set_endpoints(level, false).second;
        const double gap =
            std::min(p_bar_R - argmin.second, argmin.first - p_bar_L);
        if (gap <= 1e-9) return {0.0, true};
        out.d0 = std::max(out.d0, 8.0 * C / gap);
    }
    return out;
}

namespace {

// Deterministic draws (no <random> distributions: their algorithms vary
// across standard libraries, and reports must reproduce from a seed).
long draw_int(std::mt19937_64 &rng, long lo, long hi) {
    return lo + static_cast<long>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

double draw_16th(std::mt19937_64 &rng, double lo, double hi) {
    const long klo = static_cast<long>(std::ceil(lo * 16 - 1e-9));
    const long khi = static_cast<long>(std::floor(hi * 16 + 1e-9));
    return static_cast<double>(draw_int(rng, klo, khi)) / 16.0;
}

QuasiConvexHamiltonian draw_branch(std::mt19937_64 &rng) {
    const double slopes[] = {0.5, 1.0, 1.5, 2.0};
    const double centers[] = {-0.5, 0.0, 0.5};
    switch (draw_int(rng, 0, 2)) {
        case 0:
            return QuasiConvexHamiltonian::vee(0.0, slopes[draw_int(rng, 0, 3)],
                                               centers[draw_int(rng, 0, 2)]);
        case 1:
            return QuasiConvexHamiltonian::quadratic(
                centers[draw_int(rng, 0, 2)], 0.5 + 0.25 * draw_int(rng, 0, 2));
        default:
            return QuasiConvexHamiltonian::trapezoid(
                draw_16th(rng, -1.0, -0.25), draw_16th(rng, 0.25, 1.0),
                slopes[draw_int(rng, 0, 3)], slopes[draw_int(rng, 0, 3)]);
    }
}

} // namespace

JunctionScenario random_scenario(std::mt19937_64 &rng,
                                 const RandomScenarioParams &prm) {
    if (prm.max_junctions < 1 || prm.max_pieces < 1)
        throw ConfigInvalid("random_scenario: counts must be positive");

    const long N = draw_int(rng, 1, prm.max_junctions);

    std::vector<double> gaps;
    double span = 0.0;
    for (long a = 0; a + 1 < N; ++a) {
        gaps.push_back(draw_16th(rng, prm.min_gap, prm.max_gap));
        span += gaps.back();
    }

    JunctionScenario s;
    // Center the junction cluster so rho0 stays small.
    double b = -std::round(span * 8.0) / 16.0;
    s.positions.push_back(b);
    for (double g : gaps) s.positions.push_back(b += g);

    for (long i = 0; i <= N; ++i) s.branches.push_back(draw_branch(rng));

    for (long a = 0; a < N; ++a) {
        const long K = draw_int(rng, 1, prm.max_pieces);
        // K distinct switch points: 0 plus K-1 draws from {1/16..15/16}.
        std::vector<long> ticks{0};
        while (static_cast<long>(ticks.size()) < K) {
            const long t = draw_int(rng, 1, 15);
            if (std::find(ticks.begin(), ticks.end(), t) == ticks.end())
                ticks.push_back(t);
        }
        std::sort(ticks.begin(), ticks.end());
        std::vector<double> times, values;
        for (long t : ticks) {
            times.push_back(t / 16.0);
            values.push_back(draw_16th(rng, 0.0, 1.0));
        }
        s.schedules.emplace_back(times, values);
    }

    s.validate();
    return s;
}

} // namespace hjlab
