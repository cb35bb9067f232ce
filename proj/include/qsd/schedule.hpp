// schedule.hpp — Box-function couplings for alternating S_z / S_x measurement

#pragma once

#include <utility>

namespace qsd {

// a(t) = a_max on [nT, nT + T/2), b(t) = b_max on [nT + T/2, (n+1)T); the
// S_z window always comes first.
struct MeasurementSchedule {
    double period = 2.0;
    double a_max = 0.0;
    double b_max = 0.0;

    // M = g_max² T / 2
    double strength_z() const noexcept { return a_max * a_max * period / 2.0; }
    double strength_x() const noexcept { return b_max * b_max * period / 2.0; }

    void validate() const;
};

// Throws std::invalid_argument for t < 0.
std::pair<double, double> coupling_at(const MeasurementSchedule& schedule, double t);

// √(2M/T); throws for M < 0 or T ≤ 0.
double strength_to_amplitude(double strength, double period);

MeasurementSchedule schedule_from_strengths(double strength_z, double strength_x, double period);

}  // namespace qsd
