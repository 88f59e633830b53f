#pragma once

// Training-data augmentation: level changes over a 40 dB range and a random
// first-order spectral tilt.

#include <algorithm>
#include <cmath>
#include <vector>

#include "vocoder/dsp/audio.hpp"
#include "vocoder/error.hpp"

namespace vocoder::features {

/// Scales by 10^(gain_db/20) and clips to [-1, 1]. gain_db must lie in [-40, 0].
inline AudioBuffer augment_level(const AudioBuffer& signal, double gain_db) {
    if (!(gain_db >= -40.0 && gain_db <= 0.0)) {
        throw InvalidArgument("augment_level: gain_db must lie in [-40, 0]");
    }
    const double g = std::pow(10.0, gain_db / 20.0);
    std::vector<float> out(signal.size());
    for (std::size_t i = 0; i < signal.size(); ++i) {
        out[i] = static_cast<float>(std::clamp(double(signal[i]) * g, -1.0, 1.0));
    }
    return AudioBuffer(std::move(out));
}

/// H(z) = (1 + r1 z^-1) / (1 + r2 z^-1), zero initial state.
inline AudioBuffer augment_tilt(const AudioBuffer& signal, double r1, double r2) {
    if (!(std::abs(r1) < 1.0) || !(std::abs(r2) < 1.0)) {
        throw InvalidArgument("augment_tilt: |r1| and |r2| must be < 1");
    }
    std::vector<float> out(signal.size());
    double x_prev = 0.0;
    double y_prev = 0.0;
    for (std::size_t i = 0; i < signal.size(); ++i) {
        const double x = signal[i];
        const double y = x + r1 * x_prev - r2 * y_prev;
        out[i] = static_cast<float>(y);
        x_prev = x;
        y_prev = y;
    }
    return AudioBuffer(std::move(out));
}

} // namespace vocoder::features
