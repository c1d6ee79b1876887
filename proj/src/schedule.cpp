#include "hjlab/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hjlab {

PhaseSchedule::PhaseSchedule(std::vector<double> times, std::vector<double> vals)
    : switch_times(std::move(times)), values(std::move(vals)) {
    if (switch_times.empty() || switch_times.size() != values.size())
        throw InvalidScenario("schedule needs matching, non-empty switch_times/values");
    if (switch_times.front() != 0.0)
        throw InvalidScenario("schedule switch_times must start at 0");
    for (std::size_t i = 0; i + 1 < switch_times.size(); ++i)
        if (!(switch_times[i] < switch_times[i + 1]))
            throw InvalidScenario("schedule switch_times must be strictly increasing");
    if (switch_times.back() >= 1.0)
        throw InvalidScenario("schedule switch_times must stay inside [0, 1)");
}

double PhaseSchedule::value_at(double t) const {
    double tau = t - std::floor(t);
    // A step landing a hair before a switch time belongs to the next piece.
    auto it = std::upper_bound(switch_times.begin(), switch_times.end(), tau + 1e-12);
    return values[static_cast<std::size_t>(it - switch_times.begin()) - 1];
}

double PhaseSchedule::mean() const {
    double m = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double t1 = (i + 1 < switch_times.size()) ? switch_times[i + 1] : 1.0;
        m += values[i] * (t1 - switch_times[i]);
    }
    return m;
}

double PhaseSchedule::max_abs() const {
    double m = 0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double PhaseSchedule::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

PhaseSchedule schedule_pointwise_max(const std::vector<PhaseSchedule> &schedules) {
    if (schedules.empty()) throw InvalidScenario("pointwise max of zero schedules");
    std::set<double> cuts;
    for (const auto &s : schedules)
        cuts.insert(s.switch_times.begin(), s.switch_times.end());
    std::vector<double> times(cuts.begin(), cuts.end());
    std::vector<double> vals;
    vals.reserve(times.size());
    for (double t : times) {
        double v = schedules.front().value_at(t);
        for (const auto &s : schedules) v = std::max(v, s.value_at(t));
        vals.push_back(v);
    }
    return PhaseSchedule(std::move(times), std::move(vals));
}

} // namespace hjlab
