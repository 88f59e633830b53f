#pragma once

// Excitation sampling with pitch-dependent temperature: the softmax is raised
// to beta = 1 + beta_slope * pitch_gain and renormalized, classes below
// threshold * max are dropped, and one class is drawn by inverse CDF.

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "vocoder/dsp/mulaw.hpp"
#include "vocoder/error.hpp"
#include "vocoder/nnet/layers.hpp"
#include "vocoder/nnet/rng.hpp"

namespace vocoder::nnet {

struct SamplingParams {
    double beta_slope = 2.0;
    double threshold = 0.002;

    friend bool operator==(const SamplingParams&, const SamplingParams&) = default;
};

using Distribution = std::array<double, kOutputClasses>;

/// Softmax of beta * logits.
inline Distribution softmax(const Logits& logits, double beta = 1.0) {
    double mx = logits[0];
    for (float l : logits) {
        if (!std::isfinite(l)) throw InvalidArgument("softmax: non-finite logit");
        mx = std::max(mx, double(l));
    }
    Distribution p{};
    double sum = 0.0;
    for (std::size_t k = 0; k < kOutputClasses; ++k) {
        p[k] = std::exp(beta * (double(logits[k]) - mx));
        sum += p[k];
    }
    for (auto& v : p) v /= sum;
    return p;
}

/// The distribution actually sampled from.
inline Distribution excitation_distribution(const Logits& logits, double pitch_gain,
                                            const SamplingParams& params = {}) {
    if (!(pitch_gain >= 0.0 && pitch_gain <= 1.0)) {
        throw InvalidArgument("sample_excitation: pitch_gain must lie in [0, 1]");
    }
    // softmax(l)^beta renormalized == softmax(beta * l)
    Distribution p = softmax(logits, 1.0 + params.beta_slope * pitch_gain);
    const double cut = params.threshold * *std::max_element(p.begin(), p.end());
    double sum = 0.0;
    for (auto& v : p) {
        if (v < cut) v = 0.0;
        sum += v;
    }
    if (!(sum > 0.0)) throw std::logic_error("sample_excitation: no probability mass left");
    for (auto& v : p) v /= sum;
    return p;
}

/// Inverse-CDF draw using one uniform from `rng`.
inline dsp::MuLawIndex draw(const Distribution& p, Rng& rng) {
    const double u = rng.uniform();
    double cdf = 0.0;
    std::size_t last = 0;
    for (std::size_t k = 0; k < kOutputClasses; ++k) {
        if (p[k] <= 0.0) continue;
        cdf += p[k];
        last = k;
        if (u < cdf) return dsp::MuLawIndex(int(k));
    }
    return dsp::MuLawIndex(int(last));
}

inline dsp::MuLawIndex sample_excitation(const Logits& logits, double pitch_gain, Rng& rng,
                                         const SamplingParams& params = {}) {
    return draw(excitation_distribution(logits, pitch_gain, params), rng);
}

} // namespace vocoder::nnet
