// noise.hpp — Seeded, reproducible noise stream for the steppers

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qsd {

// Identical seeds produce bit-identical draw sequences.
class NoiseSource {
public:
    explicit NoiseSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Wiener increment dW ~ Normal(0, dt).
    double wiener(double dt) { return std::sqrt(dt) * gauss_(engine_); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> gauss_;
};

}  // namespace qsd
