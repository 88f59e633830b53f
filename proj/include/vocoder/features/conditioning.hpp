#pragma once

// Conditioning features from decoder-side parameters.
//
// Both spectral estimates describe the pre-emphasized signal domain the sample
// network synthesizes in: each power spectrum is weighted by |1 - 0.85 e^-jw|^2.
//  - decoded:  Hann-windowed 320-sample decoded audio (previous + current frame)
//  - lpc:      1/|A|^2 of the transmitted LPC, scaled to the decoded-audio energy
//              (the dump carries no separate LPC gain)

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "vocoder/dsp/lpc.hpp"
#include "vocoder/dsp/spectrum.hpp"
#include "vocoder/features/frame.hpp"

namespace vocoder::features {

using DecodedHistory = std::array<std::int16_t, kFrameSize>;

namespace detail {

inline const dsp::PowerSpectrum& emphasis_weight() {
    static const dsp::PowerSpectrum w = [] {
        dsp::PowerSpectrum out{};
        for (std::size_t k = 0; k < kSpectrumBins; ++k) {
            const double omega = 2.0 * std::numbers::pi * double(k) / double(kWindowSize);
            out[k] = 1.0 + kEmphasisAlpha * kEmphasisAlpha - 2.0 * kEmphasisAlpha * std::cos(omega);
        }
        return out;
    }();
    return w;
}

/// Mean frequency of the bins in each band, in bin units.
inline const std::array<double, kNumBands>& band_centers() {
    static const std::array<double, kNumBands> centers = [] {
        std::array<double, kNumBands> sum{};
        const auto counts = dsp::band_bin_counts();
        for (std::size_t k = 0; k < kSpectrumBins; ++k) sum[dsp::band_of_bin(k)] += double(k);
        for (std::size_t b = 0; b < kNumBands; ++b) sum[b] /= double(counts[b]);
        return sum;
    }();
    return centers;
}

} // namespace detail

inline double pitch_gain_from_taps(std::span<const double, kLtpTaps> taps) noexcept {
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    return std::clamp(sum, 0.0, 1.0);
}

inline double normalize_pitch(double period) noexcept {
    return clamp_pitch(period) / kMaxPitch - 0.5;
}

/// Power spectrum of the windowed, emphasis-weighted decoded audio.
inline dsp::PowerSpectrum decoded_spectrum(const DecodedHistory& previous,
                                           const std::array<std::int16_t, kFrameSize>& current) {
    const auto& win = dsp::hann_window();
    std::array<double, kWindowSize> x{};
    for (std::size_t n = 0; n < kFrameSize; ++n) {
        x[n] = win[n] * (double(previous[n]) / 32768.0);
        x[n + kFrameSize] = win[n + kFrameSize] * (double(current[n]) / 32768.0);
    }
    auto p = dsp::power_spectrum(x);
    const auto& w = detail::emphasis_weight();
    for (std::size_t k = 0; k < kSpectrumBins; ++k) p[k] *= w[k];
    return p;
}

inline ConditioningVector conditioning_from_frame(const FrameFeatures& frame,
                                                  const DecodedHistory& previous) {
    const auto decoded_power = decoded_spectrum(previous, frame.decoded);

    auto lpc_power = dsp::lpc_frequency_response(frame.lpc_q);
    const auto& w = detail::emphasis_weight();
    for (std::size_t k = 0; k < kSpectrumBins; ++k) lpc_power[k] *= w[k];
    const double decoded_total = std::accumulate(decoded_power.begin(), decoded_power.end(), 0.0);
    const double lpc_total = std::accumulate(lpc_power.begin(), lpc_power.end(), 0.0);
    const double gain = decoded_total / lpc_total;
    for (auto& v : lpc_power) v *= gain;

    ConditioningVector c;
    c.cepstrum_decoded = dsp::cepstrum_from_bands(dsp::band_energies(decoded_power));
    c.cepstrum_lpc = dsp::cepstrum_from_bands(dsp::band_energies(lpc_power));
    c.pitch_period_norm = normalize_pitch(frame.pitch_period);
    c.pitch_gain = pitch_gain_from_taps(frame.ltp_gains);
    return c;
}

/// Spreads band energies back onto the 161-bin grid: per-bin density of each
/// band placed at the band's centre bin, interpolated linearly in the log
/// domain, held flat beyond the outermost centres.
inline dsp::PowerSpectrum interpolate_bands(const dsp::BandEnergies& bands) {
    const auto counts = dsp::band_bin_counts();
    const auto& centers = detail::band_centers();
    std::array<double, kNumBands> log_density{};
    for (std::size_t b = 0; b < kNumBands; ++b) {
        log_density[b] = std::log(bands[b] / double(counts[b]));
    }
    dsp::PowerSpectrum out{};
    std::size_t b = 0;
    for (std::size_t k = 0; k < kSpectrumBins; ++k) {
        const double pos = double(k);
        double ld;
        if (pos <= centers.front()) {
            ld = log_density.front();
        } else if (pos >= centers.back()) {
            ld = log_density.back();
        } else {
            while (centers[b + 1] < pos) ++b;
            const double t = (pos - centers[b]) / (centers[b + 1] - centers[b]);
            ld = (1.0 - t) * log_density[b] + t * log_density[b + 1];
        }
        out[k] = std::exp(ld);
    }
    return out;
}

inline DerivedLpc lpc_from_cepstrum(const dsp::Cepstrum18& cepstrum) {
    const auto power = interpolate_bands(dsp::bands_from_cepstrum(cepstrum));
    const auto r = dsp::autocorrelation_from_power<kLpcOrder + 1>(power);
    return DerivedLpc{dsp::levinson_durbin(r).lpc};
}

inline DerivedLpc lpc_from_conditioning(const ConditioningVector& c) {
    return lpc_from_cepstrum(c.cepstrum_decoded);
}

/// Streams frames through conditioning_from_frame, carrying the previous
/// frame's decoded audio as the first half of each analysis window.
class ConditioningExtractor {
public:
    struct Output {
        ConditioningVector conditioning;
        DerivedLpc lpc;
    };

    Output next(const FrameFeatures& frame) {
        Output out;
        out.conditioning = conditioning_from_frame(frame, previous_);
        out.lpc = lpc_from_conditioning(out.conditioning);
        previous_ = frame.decoded;
        return out;
    }

    void reset() noexcept { previous_.fill(0); }

private:
    DecodedHistory previous_{};
};

inline std::vector<ConditioningExtractor::Output> extract_features(
    std::span<const FrameFeatures> frames) {
    ConditioningExtractor ex;
    std::vector<ConditioningExtractor::Output> out;
    out.reserve(frames.size());
    for (const auto& f : frames) out.push_back(ex.next(f));
    return out;
}

} // namespace vocoder::features
