// Traffic-light scenario checks: the single-light identity A_bar = <a_1>,
// the lower bound A_bar >= max(A0, max <a_alpha>), monotonicity in the
// junction spacings, the merging limit A_bar -> <max_alpha a_alpha>, and
// the sufficient critical distance d_0.  Each check returns a report of
// (expected, computed, bracket, pass) rows that the CLI persists as-is.
#ifndef HJLAB_TRAFFIC_HPP
#define HJLAB_TRAFFIC_HPP

#include <random>
#include <string>
#include <vector>

#include "hjlab/cell.hpp"
#include "hjlab/scenario.hpp"

namespace hjlab {

struct CheckRow {
    std::string name;
    double expected = 0.0;
    double computed = 0.0;
    double bracket = 0.0;
    bool pass = true;
    std::string note;
};

struct CheckReport {
    std::string check;
    std::vector<CheckRow> rows;
    bool pass = true;

    void add(CheckRow r) {
        pass = pass && r.pass;
        rows.push_back(std::move(r));
    }
};

// |A_bar - <a_1>| <= tol + bracket for a single light.  Throws
// ToleranceExceeded (with both values in the message) on failure.
CheckReport check_n1_identity(const JunctionScenario &s,
                              const CellParams &prm = {}, double tol = 0.02);

// A_bar + bracket >= max(A0, max_alpha <a_alpha>) - tol.
CheckReport check_lower_bound(const JunctionScenario &s,
                              const CellParams &prm = {}, double tol = 0.0);

// Widening one gap at a time never increases A_bar:
// A_bar(gap + delta) <= A_bar(gap) + brackets + tol for each delta > 0.
CheckReport check_monotonicity_in_spacing(const JunctionScenario &base,
                                          const std::vector<double> &spacing_deltas,
                                          const CellParams &prm = {},
                                          double tol = 0.02);

// Along a decreasing spacing-scale sequence, |A_bar - <max_alpha a_alpha>|
// shrinks monotonically within brackets.
CheckReport check_merging_limit(const JunctionScenario &base,
                                const std::vector<double> &scales,
                                const CellParams &prm = {}, double tol = 0.02);

struct CriticalDistance {
    double d0 = 0.0;
    // The level max<a> hits a relevant branch minimum: the level-set gaps
    // collapse and the bound degenerates to 0.
    bool degenerate_level = false;
};

// Sufficient spacing for A_bar = max_alpha <a_alpha>: with C the rate
// (barrier) constant of the scenario and level A_bar0 = max_alpha <a_alpha>,
//     d_0 = max over interior branches of 8 C / min(gap_R, gap_L),
// where gap_R/gap_L are the distances from the argmin interval to the
// level-set endpoints on the increasing/decreasing side.  This is a
// sufficient spacing, not a sharp one.  A single light returns 0: spacing
// is vacuous.
CriticalDistance critical_distance_estimate(const JunctionScenario &s);

// Scenario generator for property tests: dyadic positions and switch
// times (multiples of 1/16), schedule values in [0, 1], branch shapes
// with minimum 0 drawn from a small library.  Fully deterministic for a
// given engine state (no distribution objects involved).
struct RandomScenarioParams {
    int max_junctions = 3;
    int max_pieces = 3;
    double min_gap = 0.25, max_gap = 4.0;
};

JunctionScenario random_scenario(std::mt19937_64 &rng,
                                 const RandomScenarioParams &prm = {});

} // namespace hjlab

#endif
