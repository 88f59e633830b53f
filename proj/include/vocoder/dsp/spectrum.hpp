#pragma once

// Fixed 320-point analysis: Hann window, real DFT onto 161 bins (50 Hz apart),
// 18-band energy grouping and the orthonormal 18-point DCT used for cepstra.

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "vocoder/dsp/audio.hpp"
#include "vocoder/error.hpp"

namespace vocoder::dsp {

using PowerSpectrum = std::array<double, kSpectrumBins>;
using BandEnergies = std::array<double, kNumBands>;

/// Band edges in Hz. Band b covers [edge[b], edge[b+1]); the last band also
/// owns the Nyquist bin.
inline constexpr std::array<double, kNumBands + 1> kBandEdgesHz = {
    0,    200,  400,  600,  800,  1000, 1200, 1400, 1600, 2000,
    2400, 2800, 3200, 4000, 4800, 5600, 6400, 7200, 8000};

inline constexpr double kBinSpacingHz = double(kSampleRate) / double(kWindowSize);

inline constexpr std::size_t band_of_bin(std::size_t bin) noexcept {
    const double f = double(bin) * kBinSpacingHz;
    for (std::size_t b = 0; b + 1 < kNumBands; ++b) {
        if (f < kBandEdgesHz[b + 1]) return b;
    }
    return kNumBands - 1;
}

inline constexpr std::array<std::size_t, kNumBands> band_bin_counts() noexcept {
    std::array<std::size_t, kNumBands> n{};
    for (std::size_t k = 0; k < kSpectrumBins; ++k) ++n[band_of_bin(k)];
    return n;
}

namespace detail {

struct Twiddles {
    std::array<double, kWindowSize> cos{};
    std::array<double, kWindowSize> sin{};
};

inline const Twiddles& twiddles() {
    static const Twiddles tw = [] {
        Twiddles t;
        for (std::size_t m = 0; m < kWindowSize; ++m) {
            const double w = 2.0 * std::numbers::pi * double(m) / double(kWindowSize);
            t.cos[m] = std::cos(w);
            t.sin[m] = std::sin(w);
        }
        return t;
    }();
    return tw;
}

} // namespace detail

/// Periodic Hann window of 320 samples.
inline const std::array<double, kWindowSize>& hann_window() {
    static const std::array<double, kWindowSize> w = [] {
        std::array<double, kWindowSize> out{};
        for (std::size_t n = 0; n < kWindowSize; ++n) {
            const double s = std::sin(std::numbers::pi * double(n) / double(kWindowSize));
            out[n] = s * s;
        }
        return out;
    }();
    return w;
}

/// |X_k|^2 for k = 0..160 of a 320-sample real frame.
inline PowerSpectrum power_spectrum(std::span<const double, kWindowSize> frame) {
    const auto& tw = detail::twiddles();
    PowerSpectrum out{};
    for (std::size_t k = 0; k < kSpectrumBins; ++k) {
        double re = 0.0;
        double im = 0.0;
        std::size_t idx = 0;
        for (std::size_t n = 0; n < kWindowSize; ++n) {
            re += frame[n] * tw.cos[idx];
            im -= frame[n] * tw.sin[idx];
            idx += k;
            if (idx >= kWindowSize) idx -= kWindowSize;
        }
        out[k] = re * re + im * im;
    }
    return out;
}

/// Real, even inverse transform of a one-sided power spectrum: the first
/// `lags.size()` autocorrelation lags of the 320-point periodic sequence.
template <std::size_t N>
std::array<double, N> autocorrelation_from_power(const PowerSpectrum& power) {
    static_assert(N <= kWindowSize / 2);
    const auto& tw = detail::twiddles();
    std::array<double, N> r{};
    for (std::size_t lag = 0; lag < N; ++lag) {
        double acc = power[0] + power[kSpectrumBins - 1] * ((lag & 1) ? -1.0 : 1.0);
        std::size_t idx = lag;
        for (std::size_t k = 1; k + 1 < kSpectrumBins; ++k) {
            acc += 2.0 * power[k] * tw.cos[idx];
            idx += lag;
            if (idx >= kWindowSize) idx -= kWindowSize;
        }
        r[lag] = acc / double(kWindowSize);
    }
    return r;
}

/// Sums bins into the 18 bands. Every bin lands in exactly one band.
inline BandEnergies band_energies(const PowerSpectrum& power) {
    BandEnergies bands{};
    for (std::size_t k = 0; k < kSpectrumBins; ++k) {
        if (!(power[k] >= 0.0) || !std::isfinite(power[k])) {
            throw InvalidArgument("band_energies: bin " + std::to_string(k) +
                                  " is negative or non-finite");
        }
        bands[band_of_bin(k)] += power[k];
    }
    return bands;
}

namespace detail {

inline const std::array<std::array<double, kNumBands>, kNumBands>& dct_matrix() {
    static const auto m = [] {
        std::array<std::array<double, kNumBands>, kNumBands> d{};
        const double n = double(kNumBands);
        for (std::size_t k = 0; k < kNumBands; ++k) {
            const double scale = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
            for (std::size_t i = 0; i < kNumBands; ++i) {
                d[k][i] = scale * std::cos(std::numbers::pi * double(k) * (2.0 * double(i) + 1.0) /
                                           (2.0 * n));
            }
        }
        return d;
    }();
    return m;
}

} // namespace detail

/// Orthonormal DCT-II.
inline std::array<double, kNumBands> dct18(std::span<const double, kNumBands> x) {
    const auto& d = detail::dct_matrix();
    std::array<double, kNumBands> out{};
    for (std::size_t k = 0; k < kNumBands; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < kNumBands; ++i) acc += d[k][i] * x[i];
        out[k] = acc;
    }
    return out;
}

/// Inverse of dct18 (the transpose, DCT-III).
inline std::array<double, kNumBands> idct18(std::span<const double, kNumBands> c) {
    const auto& d = detail::dct_matrix();
    std::array<double, kNumBands> out{};
    for (std::size_t i = 0; i < kNumBands; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < kNumBands; ++k) acc += d[k][i] * c[k];
        out[i] = acc;
    }
    return out;
}

inline constexpr double kLogFloor = 1e-10;

struct Cepstrum18 {
    std::array<double, kNumBands> c{};
    friend bool operator==(const Cepstrum18&, const Cepstrum18&) = default;
};

/// c = DCT-II(log10(bands + 1e-10)).
inline Cepstrum18 cepstrum_from_bands(const BandEnergies& bands) {
    std::array<double, kNumBands> logs{};
    for (std::size_t b = 0; b < kNumBands; ++b) {
        if (!(bands[b] >= 0.0)) throw InvalidArgument("cepstrum_from_bands: negative band energy");
        logs[b] = std::log10(bands[b] + kLogFloor);
    }
    return Cepstrum18{dct18(logs)};
}

/// Inverse of cepstrum_from_bands; returns bands + 1e-10 (the floor is not removed).
inline BandEnergies bands_from_cepstrum(const Cepstrum18& cep) {
    const auto logs = idct18(cep.c);
    BandEnergies bands{};
    for (std::size_t b = 0; b < kNumBands; ++b) bands[b] = std::pow(10.0, logs[b]);
    return bands;
}

} // namespace vocoder::dsp
