#pragma once

// Deterministic random source. The engine (mt19937_64) is fully specified by
// the standard; the transforms below are written out so that draws do not
// depend on the standard library's distribution implementations.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace vocoder::nnet {

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() {
        return (double(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Box-Muller, one output per call.
    double gaussian(double mean = 0.0, double stddev = 1.0) {
        const double u1 = uniform();
        const double u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
        return mean + stddev * z;
    }

    /// Laplace(0, scale) by inverse CDF.
    double laplace(double scale) {
        const double u = uniform() - 0.5;
        const double mag = -scale * std::log(1.0 - 2.0 * std::abs(u));
        return u < 0.0 ? -mag : mag;
    }

    friend bool operator==(const Rng&, const Rng&) = default;

private:
    std::mt19937_64 engine_;
};

} // namespace vocoder::nnet
