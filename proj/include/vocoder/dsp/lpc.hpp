#pragma once

// Linear prediction in the prediction-filter convention
//
//   y[t] = sum_{i=1}^{16} a_i * s[t-i],   A(z) = 1 - sum_i a_i z^-i.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "vocoder/dsp/audio.hpp"
#include "vocoder/dsp/spectrum.hpp"
#include "vocoder/error.hpp"

namespace vocoder::dsp {

struct LpcCoeffs {
    std::array<double, kLpcOrder> a{};

    bool finite() const noexcept {
        return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
    }

    friend bool operator==(const LpcCoeffs&, const LpcCoeffs&) = default;
};

/// `history[0]` is the most recent sample s[t-1].
inline double lpc_predict(std::span<const double, kLpcOrder> history, const LpcCoeffs& lpc) noexcept {
    double y = 0.0;
    for (std::size_t i = 0; i < kLpcOrder; ++i) y += lpc.a[i] * history[i];
    return y;
}

using Autocorrelation = std::array<double, kLpcOrder + 1>;

/// Conditioning applied to the autocorrelation before the recursion: a Gaussian
/// lag window of the given bandwidth and a white-noise floor added to r0.
struct LevinsonOptions {
    double lag_window_hz = 60.0;
    double noise_floor = 1e-4;

    /// Plain recursion on the autocorrelation as given.
    static constexpr LevinsonOptions raw() noexcept { return {0.0, 0.0}; }
};

struct LevinsonResult {
    LpcCoeffs lpc;
    std::array<double, kLpcOrder> reflection{};
    /// error[0] = conditioned r0, error[p] = residual energy of the order-p predictor.
    std::array<double, kLpcOrder + 1> error{};
};

inline Autocorrelation condition_autocorrelation(const Autocorrelation& r,
                                                 const LevinsonOptions& opt = {}) {
    Autocorrelation out = r;
    if (opt.lag_window_hz > 0.0) {
        for (std::size_t k = 1; k <= kLpcOrder; ++k) {
            const double x = 2.0 * std::numbers::pi * opt.lag_window_hz * double(k) / kSampleRate;
            out[k] *= std::exp(-0.5 * x * x);
        }
    }
    out[0] *= 1.0 + opt.noise_floor;
    return out;
}

/// Levinson-Durbin recursion. Throws NumericalError when r0 <= 0 or when the
/// (conditioned) sequence is not positive definite. If the residual reaches
/// exactly zero the remaining higher-order coefficients stay zero.
inline LevinsonResult levinson_durbin(const Autocorrelation& autocorr,
                                      const LevinsonOptions& opt = {}) {
    for (double v : autocorr) {
        if (!std::isfinite(v)) throw NumericalError("levinson_durbin: non-finite autocorrelation");
    }
    if (!(autocorr[0] > 0.0)) throw NumericalError("levinson_durbin: r0 must be positive");

    const Autocorrelation r = condition_autocorrelation(autocorr, opt);
    LevinsonResult res;
    auto& a = res.lpc.a;
    double err = r[0];
    res.error.fill(0.0);
    res.error[0] = err;

    for (std::size_t i = 1; i <= kLpcOrder; ++i) {
        if (err <= 0.0) break;
        double acc = r[i];
        for (std::size_t j = 1; j < i; ++j) acc -= a[j - 1] * r[i - j];
        const double k = acc / err;
        if (!(std::abs(k) < 1.0)) {
            throw NumericalError("levinson_durbin: reflection coefficient " + std::to_string(i) +
                                 " outside (-1, 1); autocorrelation not positive definite");
        }
        std::array<double, kLpcOrder> prev = a;
        a[i - 1] = k;
        for (std::size_t j = 1; j < i; ++j) a[j - 1] = prev[j - 1] - k * prev[i - j - 1];
        res.reflection[i - 1] = k;
        err *= 1.0 - k * k;
        res.error[i] = err;
    }
    return res;
}

inline constexpr double kMaxResponse = 1e12;

/// 1/|A(e^{jw})|^2 sampled on the 161 bins of the 320-point grid.
inline PowerSpectrum lpc_frequency_response(const LpcCoeffs& lpc) {
    const auto& tw = detail::twiddles();
    PowerSpectrum out{};
    for (std::size_t k = 0; k < kSpectrumBins; ++k) {
        double re = 1.0;
        double im = 0.0;
        std::size_t idx = 0;
        for (std::size_t i = 0; i < kLpcOrder; ++i) {
            idx += k;
            if (idx >= kWindowSize) idx -= kWindowSize;
            re -= lpc.a[i] * tw.cos[idx];
            im += lpc.a[i] * tw.sin[idx];
        }
        const double mag2 = re * re + im * im;
        const double resp = 1.0 / mag2;
        if (!(resp <= kMaxResponse)) {
            throw NumericalError("lpc_frequency_response: response exceeds 1e12 at bin " +
                                 std::to_string(k));
        }
        out[k] = resp;
    }
    return out;
}

} // namespace vocoder::dsp
