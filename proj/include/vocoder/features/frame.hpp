#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>

#include "vocoder/dsp/audio.hpp"
#include "vocoder/dsp/lpc.hpp"
#include "vocoder/dsp/spectrum.hpp"

namespace vocoder::features {

inline constexpr std::size_t kLtpTaps = 5;
inline constexpr std::size_t kFeatureDim = 2 * kNumBands + 2;  // 38
inline constexpr double kMinPitch = 16.0;
inline constexpr double kMaxPitch = 512.0;

/// Decoder-side parameters for one 10 ms synthesis frame.
struct FrameFeatures {
    dsp::LpcCoeffs lpc_q;                       // as transmitted
    std::array<double, kLtpTaps> ltp_gains{};   // 5-tap long-term predictor
    double pitch_period = kMinPitch;            // samples at 16 kHz
    std::array<std::int16_t, kFrameSize> decoded{};

    friend bool operator==(const FrameFeatures&, const FrameFeatures&) = default;
};

inline double clamp_pitch(double period) noexcept {
    return std::clamp(period, kMinPitch, kMaxPitch);
}

/// Per-frame network input. Flattened order: decoded-audio cepstrum (18),
/// LPC-spectrum cepstrum (18), normalized pitch period, pitch gain.
struct ConditioningVector {
    dsp::Cepstrum18 cepstrum_decoded;
    dsp::Cepstrum18 cepstrum_lpc;
    double pitch_period_norm = 0.0;  // period / 512 - 0.5
    double pitch_gain = 0.0;         // clamp(sum of LTP taps, 0, 1)

    std::array<double, kFeatureDim> flatten() const noexcept {
        std::array<double, kFeatureDim> out{};
        std::copy(cepstrum_decoded.c.begin(), cepstrum_decoded.c.end(), out.begin());
        std::copy(cepstrum_lpc.c.begin(), cepstrum_lpc.c.end(), out.begin() + kNumBands);
        out[2 * kNumBands] = pitch_period_norm;
        out[2 * kNumBands + 1] = pitch_gain;
        return out;
    }

    static ConditioningVector unflatten(std::span<const double, kFeatureDim> v) noexcept {
        ConditioningVector c;
        std::copy(v.begin(), v.begin() + kNumBands, c.cepstrum_decoded.c.begin());
        std::copy(v.begin() + kNumBands, v.begin() + 2 * kNumBands, c.cepstrum_lpc.c.begin());
        c.pitch_period_norm = v[2 * kNumBands];
        c.pitch_gain = v[2 * kNumBands + 1];
        return c;
    }

    friend bool operator==(const ConditioningVector&, const ConditioningVector&) = default;
};

/// LPC recomputed from the decoded-audio cepstrum; minimum phase by construction.
struct DerivedLpc {
    dsp::LpcCoeffs lpc;
    friend bool operator==(const DerivedLpc&, const DerivedLpc&) = default;
};

} // namespace vocoder::features
