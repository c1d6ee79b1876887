#include "hjlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hjlab {

void JunctionScenario::validate() const {
    if (branches.size() != positions.size() + 1)
        throw InvalidScenario("need exactly one more branch than junctions");
    if (schedules.size() != positions.size())
        throw InvalidScenario("need exactly one schedule per junction");
    for (std::size_t i = 0; i + 1 < positions.size(); ++i)
        if (!(positions[i] < positions[i + 1]))
            throw InvalidScenario("junction positions must be strictly increasing");
    for (std::size_t i = 0; i < branches.size(); ++i)
        if (!branches[i].is_coercive()) {
            std::ostringstream os;
            os << "branch " << i << " is not coercive over its sampled range";
            throw InvalidScenario(os.str());
        }
    for (std::size_t a = 0; a < schedules.size(); ++a) {
        const double floor_level =
            std::max(branches[a].min_value(), branches[a + 1].min_value());
        if (schedules[a].min_value() < floor_level - 1e-12) {
            std::ostringstream os;
            os << "schedule at junction " << a + 1 << " dips to "
               << schedules[a].min_value() << ", below the adjacent branch minimum "
               << floor_level;
            throw InvalidScenario(os.str());
        }
    }
}

double JunctionScenario::rho0() const {
    double r = 0;
    for (double b : positions) r = std::max(r, std::abs(b));
    return r;
}

double JunctionScenario::A0() const {
    return std::max(branches.front().min_value(), branches.back().min_value());
}

double JunctionScenario::barrier_constant(double L0) const {
    // Envelope terms range over [min H, max H on [-L0, L0]] (see
    // Stepper::barrier_constant), hence the |min| term.
    double C = 0;
    for (const auto &s : schedules) C = std::max(C, s.max_abs());
    for (const auto &h : branches)
        C = std::max({C, h.max_abs_on(-L0, L0), std::abs(h.min_value())});
    return C;
}

double JunctionScenario::slope_bound(double C) const {
    double L = 0;
    for (const auto &h : branches) L = std::max(L, h.slope_range_at_level(C));
    return L;
}

double JunctionScenario::mean_max_limiter() const {
    return schedule_pointwise_max(schedules).mean();
}

double JunctionScenario::max_mean_limiter() const {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto &s : schedules) m = std::max(m, s.mean());
    return m;
}

JunctionScenario JunctionScenario::scaled_spacing(double s) const {
    if (positions.empty()) return *this;
    const double center =
        std::accumulate(positions.begin(), positions.end(), 0.0) / positions.size();
    JunctionScenario out = *this;
    for (auto &b : out.positions) b = center + s * (b - center);
    return out;
}

JunctionScenario JunctionScenario::widened_gap(std::size_t alpha, double delta) const {
    if (alpha + 1 >= positions.size())
        throw InvalidScenario("widened_gap: no interior gap with that index");
    JunctionScenario out = *this;
    for (std::size_t i = alpha + 1; i < out.positions.size(); ++i)
        out.positions[i] += delta;
    return out;
}

} // namespace hjlab
