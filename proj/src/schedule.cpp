// schedule.cpp — Measurement schedule and strength/amplitude conversion

#include "qsd/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qsd {

void MeasurementSchedule::validate() const {
    if (!(period > 0.0)) throw std::invalid_argument("schedule: period T must be positive");
    if (!(a_max >= 0.0) || !(b_max >= 0.0)) throw std::invalid_argument("schedule: amplitudes must be non-negative");
}

std::pair<double, double> coupling_at(const MeasurementSchedule& schedule, double t) {
    if (t < 0.0) throw std::invalid_argument("coupling_at: negative time " + std::to_string(t));
    const double phase = std::fmod(t, schedule.period);
    if (phase < 0.5 * schedule.period) return {schedule.a_max, 0.0};
    return {0.0, schedule.b_max};
}

double strength_to_amplitude(double strength, double period) {
    if (!(strength >= 0.0)) throw std::invalid_argument("strength_to_amplitude: strength must be >= 0");
    if (!(period > 0.0)) throw std::invalid_argument("strength_to_amplitude: period must be > 0");
    return std::sqrt(2.0 * strength / period);
}

MeasurementSchedule schedule_from_strengths(double strength_z, double strength_x, double period) {
    MeasurementSchedule s;
    s.period = period;
    s.a_max = strength_to_amplitude(strength_z, period);
    s.b_max = strength_to_amplitude(strength_x, period);
    return s;
}

}  // namespace qsd
