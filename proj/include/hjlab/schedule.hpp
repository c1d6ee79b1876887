// 1-periodic piecewise-constant limiter schedules ("traffic lights").
#ifndef HJLAB_SCHEDULE_HPP
#define HJLAB_SCHEDULE_HPP

#include <vector>

#include "hjlab/errors.hpp"

namespace hjlab {

// a(t) = values[i] on [switch_times[i], switch_times[i+1]) within one
// period, extended 1-periodically.  switch_times[0] must be 0.
struct PhaseSchedule {
    std::vector<double> switch_times;
    std::vector<double> values;

    PhaseSchedule() = default;
    PhaseSchedule(std::vector<double> times, std::vector<double> vals);

    static PhaseSchedule constant(double a) { return PhaseSchedule({0.0}, {a}); }
    // a = on_value for the first half-period, off_value for the second.
    static PhaseSchedule half_and_half(double on_value, double off_value) {
        return PhaseSchedule({0.0, 0.5}, {on_value, off_value});
    }

    std::size_t pieces() const { return values.size(); }

    // Value at an absolute time t (any real; reduced mod 1).
    double value_at(double t) const;

    // Exact piecewise-constant integral over one period.
    double mean() const;

    double max_abs() const;
    double min_value() const;
};

// Mean limiter <a> of a schedule (exposed as a free function because the
// traffic checks speak about it by that name).
inline double mean_limiter(const PhaseSchedule &s) { return s.mean(); }

// Pointwise maximum of several schedules, again piecewise constant on the
// merged switch set.  Its mean is the merging-limit target.
PhaseSchedule schedule_pointwise_max(const std::vector<PhaseSchedule> &schedules);

} // namespace hjlab

#endif
