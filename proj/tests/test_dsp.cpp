#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "test_support.hpp"
#include "vocoder/dsp/emphasis.hpp"
#include "vocoder/dsp/lpc.hpp"
#include "vocoder/dsp/mulaw.hpp"
#include "vocoder/dsp/spectrum.hpp"

namespace {

using namespace vocoder;
using namespace vocoder::dsp;

// ------------------------------------------------------------------ mu-law

TEST(MuLaw, FixedPoints) {
    EXPECT_EQ(mulaw_encode(0.0).code(), 128);
    EXPECT_EQ(mulaw_encode(1.0).code(), 255);
    EXPECT_EQ(mulaw_encode(-1.0).code(), 1);
    EXPECT_EQ(mulaw_decode(MuLawIndex(128)), 0.0);
    EXPECT_DOUBLE_EQ(mulaw_decode(MuLawIndex(255)), 1.0);
}

TEST(MuLaw, EncodeIsMonotone) {
    int prev = -1;
    for (int i = -1000; i <= 1000; ++i) {
        const int code = mulaw_encode(i / 1000.0).code();
        EXPECT_GE(code, prev) << "x=" << i / 1000.0;
        prev = code;
    }
}

TEST(MuLaw, EveryCodeRoundTrips) {
    for (int c = 0; c < 256; ++c) {
        EXPECT_EQ(mulaw_encode(mulaw_decode(MuLawIndex(c))).code(), c);
    }
}

TEST(MuLaw, QuantizationErrorWithinWidestCell) {
    double worst = 0.0;
    for (int i = -10000; i <= 10000; ++i) {
        const double x = i * 1e-4;
        worst = std::max(worst, std::abs(mulaw_decode(mulaw_encode(x)) - x));
    }
    EXPECT_LE(worst, 0.031);
}

TEST(MuLaw, DecodeAntisymmetricWithinOneStep) {
    for (int k = 1; k <= 127; ++k) {
        const double pos = mulaw_decode(MuLawIndex(128 + k));
        const double neg = mulaw_decode(MuLawIndex(128 - k));
        const double step = pos - mulaw_decode(MuLawIndex(128 + k - 1));
        EXPECT_LE(std::abs(pos + neg), step);
    }
}

TEST(MuLaw, RejectsBadInput) {
    EXPECT_THROW(mulaw_encode(std::nan("")), InvalidArgument);
    EXPECT_THROW(mulaw_encode(INFINITY), InvalidArgument);
    EXPECT_THROW(MuLawIndex(256), InvalidArgument);
    EXPECT_THROW(MuLawIndex(-1), InvalidArgument);
    EXPECT_EQ(mulaw_encode(50.0).code(), 255);
    EXPECT_EQ(mulaw_encode(-50.0).code(), 0);
}

// ------------------------------------------------------------------ emphasis

TEST(Emphasis, PreemphasisImpulse) {
    const std::vector<double> x{1, 0, 0, 0};
    const auto y = preemphasis<double>(x, 0.85, 0.0);
    EXPECT_EQ(y.samples, (std::vector<double>{1, -0.85, 0, 0}));
    EXPECT_EQ(y.state, 0.0);
}

TEST(Emphasis, PreemphasisConstant) {
    const double c = 0.3;
    const std::vector<double> x{c, c, c};
    const auto y = preemphasis<double>(x, 0.85, 0.0);
    EXPECT_DOUBLE_EQ(y.samples[0], c);
    EXPECT_NEAR(y.samples[1], 0.15 * c, 1e-15);
    EXPECT_NEAR(y.samples[2], 0.15 * c, 1e-15);
}

TEST(Emphasis, ZeroAlphaIsIdentity) {
    const auto x = testkit::white_noise(100, 1);
    EXPECT_EQ(preemphasis<double>(x, 0.0, 0.5).samples, x);
    EXPECT_EQ(deemphasis<double>(x, 0.0, 0.5).samples, x);
}

TEST(Emphasis, DeemphasisImpulseDecaysGeometrically) {
    const std::vector<double> x{1, 0, 0, 0, 0};
    const auto y = deemphasis<double>(x, 0.85, 0.0);
    for (std::size_t t = 0; t < x.size(); ++t) EXPECT_NEAR(y.samples[t], std::pow(0.85, double(t)), 1e-15);
}

TEST(Emphasis, CascadeInvertsInFloat) {
    const auto x = testkit::white_noise_f(kSampleRate, 2, 0.3);
    const auto pre = preemphasis<float>(x, 0.85f, 0.0f);
    const auto back = deemphasis<float>(pre.samples, 0.85f, 0.0f);
    float worst = 0.0f;
    for (std::size_t t = 0; t < x.size(); ++t) worst = std::max(worst, std::abs(back.samples[t] - x[t]));
    EXPECT_LT(worst, 1e-5f);
}

TEST(Emphasis, StreamingMatchesSinglePass) {
    const auto x = testkit::white_noise(1000, 3);
    const auto whole = preemphasis<double>(x, 0.85, 0.0);
    const std::span<const double> all(x);
    const auto a = preemphasis<double>(all.first(377), 0.85, 0.0);
    const auto b = preemphasis<double>(all.subspan(377), 0.85, a.state);
    std::vector<double> joined = a.samples;
    joined.insert(joined.end(), b.samples.begin(), b.samples.end());
    EXPECT_EQ(joined, whole.samples);

    const auto dwhole = deemphasis<double>(x, 0.85, 0.0);
    const auto da = deemphasis<double>(all.first(500), 0.85, 0.0);
    const auto db = deemphasis<double>(all.subspan(500), 0.85, da.state);
    joined = da.samples;
    joined.insert(joined.end(), db.samples.begin(), db.samples.end());
    EXPECT_EQ(joined, dwhole.samples);
}

TEST(Emphasis, AlphaOutOfRange) {
    const std::vector<double> x{1.0};
    EXPECT_THROW(preemphasis<double>(x, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(preemphasis<double>(x, -0.1, 0.0), InvalidArgument);
    EXPECT_THROW(deemphasis<double>(x, 1.5, 0.0), InvalidArgument);
}

TEST(Emphasis, AudioBufferOverloads) {
    const AudioBuffer in(std::vector<float>{1.0f, 0.0f, 0.0f});
    const auto [pre, s1] = preemphasis(in, 0.85f, 0.0f);
    EXPECT_FLOAT_EQ(pre[1], -0.85f);
    const auto [back, s2] = deemphasis(pre, 0.85f, 0.0f);
    EXPECT_NEAR(back[1], 0.0f, 1e-7f);
    EXPECT_THROW(AudioBuffer(std::vector<float>{NAN}), InvalidArgument);
}

// ------------------------------------------------------------------ prediction

TEST(LpcPredict, SingleTapCopiesMostRecent) {
    LpcCoeffs lpc;
    lpc.a[0] = 1.0;
    std::array<double, kLpcOrder> h{};
    h.fill(0.25);
    h[0] = 0.5;
    EXPECT_EQ(lpc_predict(h, lpc), 0.5);
    EXPECT_EQ(lpc_predict(h, LpcCoeffs{}), 0.0);
}

TEST(LpcPredict, MatchesNaiveLoopOverSignal) {
    nnet::Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        LpcCoeffs lpc;
        for (auto& a : lpc.a) a = rng.gaussian();
        std::vector<double> s(40);
        for (auto& v : s) v = rng.gaussian();
        const std::size_t t = 30;
        double expect = 0.0;
        for (std::size_t i = 1; i <= 16; ++i) expect += lpc.a[i - 1] * s[t - i];
        std::array<double, kLpcOrder> hist{};
        for (std::size_t i = 0; i < kLpcOrder; ++i) hist[i] = s[t - 1 - i];
        EXPECT_NEAR(lpc_predict(hist, lpc), expect, 1e-12);
    }
}

// ------------------------------------------------------------------ Levinson-Durbin

TEST(Levinson, WhiteNoiseGivesZeroPredictor) {
    Autocorrelation r{};
    r[0] = 1.0;
    const auto res = levinson_durbin(r);
    for (double a : res.lpc.a) EXPECT_EQ(a, 0.0);
}

TEST(Levinson, Ar1AnalyticAutocorrelation) {
    Autocorrelation r{};
    for (std::size_t k = 0; k <= kLpcOrder; ++k) r[k] = std::pow(0.9, double(k));
    const auto raw = levinson_durbin(r, LevinsonOptions::raw());
    EXPECT_NEAR(raw.lpc.a[0], 0.9, 1e-12);
    for (std::size_t i = 1; i < kLpcOrder; ++i) EXPECT_LT(std::abs(raw.lpc.a[i]), 1e-6) << i;

    // The lag window and noise floor pull the predictor slightly toward zero.
    const auto cond = levinson_durbin(r);
    EXPECT_NEAR(cond.lpc.a[0], 0.9, 0.01);
    for (std::size_t i = 1; i < kLpcOrder; ++i) EXPECT_LT(std::abs(cond.lpc.a[i]), 0.01) << i;
}

TEST(Levinson, RecoversRandomStableAr16FromFilteredNoise) {
    nnet::Rng rng(5);
    for (int trial = 0; trial < 3; ++trial) {
        const auto truth = testkit::random_stable_lpc(rng, 0.6);
        const auto s = testkit::ar_filter(truth, testkit::white_noise(1 << 18, 100 + trial));
        const auto est = levinson_durbin(testkit::sample_autocorrelation(s), LevinsonOptions::raw());
        for (std::size_t i = 0; i < kLpcOrder; ++i) {
            EXPECT_NEAR(est.lpc.a[i], truth.a[i], 1e-2) << "trial " << trial << " coeff " << i;
        }
    }
}

TEST(Levinson, RejectsDegenerateInput) {
    Autocorrelation r{};
    EXPECT_THROW(levinson_durbin(r), NumericalError);
    r[0] = -1.0;
    EXPECT_THROW(levinson_durbin(r), NumericalError);
    r[0] = 1.0;
    r[1] = 2.0;  // not an autocorrelation
    EXPECT_THROW(levinson_durbin(r, LevinsonOptions::raw()), NumericalError);
}

TEST(Levinson, MinimumPhaseUnderRandomPsdFuzz) {
    nnet::Rng rng(6);
    for (int trial = 0; trial < 10000; ++trial) {
        PowerSpectrum p{};
        const int kind = trial % 3;
        for (std::size_t k = 0; k < kSpectrumBins; ++k) {
            if (kind == 0) p[k] = std::exp(3.0 * rng.gaussian());
            else if (kind == 1) p[k] = rng.uniform() < 0.05 ? std::exp(10.0 * rng.uniform()) : 0.0;
            else p[k] = 1.0 / (1e-6 + std::pow(std::abs(double(k) - 80.0 * rng.uniform()), 4.0));
        }
        p[std::size_t(rng.uniform() * kSpectrumBins)] += 1.0;  // never all-zero
        const auto res = levinson_durbin(autocorrelation_from_power<kLpcOrder + 1>(p));
        for (double k : res.reflection) ASSERT_LT(std::abs(k), 1.0) << "trial " << trial;
        for (std::size_t i = 1; i <= kLpcOrder; ++i) {
            ASSERT_GE(res.error[i], 0.0);
            ASSERT_LE(res.error[i], res.error[i - 1]);
        }
    }
}

// ------------------------------------------------------------------ bands and cepstra

TEST(Bands, FlatSpectrumGivesBinCounts) {
    PowerSpectrum p;
    p.fill(1.0);
    const auto b = band_energies(p);
    const std::array<double, kNumBands> expect{4, 4, 4, 4, 4, 4, 4, 4, 8, 8, 8, 8, 16, 16, 16, 16, 16, 17};
    for (std::size_t i = 0; i < kNumBands; ++i) EXPECT_EQ(b[i], expect[i]) << i;
}

TEST(Bands, HundredHzBinLandsInFirstBand) {
    PowerSpectrum p{};
    p[2] = 3.0;  // 2 * 50 Hz
    const auto b = band_energies(p);
    EXPECT_EQ(b[0], 3.0);
    for (std::size_t i = 1; i < kNumBands; ++i) EXPECT_EQ(b[i], 0.0);
}

TEST(Bands, PartitionPreservesTotal) {
    nnet::Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        PowerSpectrum p;
        // dyadic values keep every partial sum exact
        for (auto& v : p) v = std::ldexp(double(rng.next_u64() % 1024), -10);
        const auto b = band_energies(p);
        EXPECT_EQ(std::accumulate(b.begin(), b.end(), 0.0), std::accumulate(p.begin(), p.end(), 0.0));
    }
    std::array<int, kNumBands> owners{};
    for (std::size_t k = 0; k < kSpectrumBins; ++k) ++owners[band_of_bin(k)];
    EXPECT_EQ(std::accumulate(owners.begin(), owners.end(), 0), int(kSpectrumBins));
}

TEST(Bands, RejectsNegativeBin) {
    PowerSpectrum p{};
    p[10] = -1e-3;
    EXPECT_THROW(band_energies(p), InvalidArgument);
}

TEST(Cepstrum, UnitBands) {
    BandEnergies b;
    b.fill(1.0);
    const auto c = cepstrum_from_bands(b);
    EXPECT_NEAR(c.c[0], std::log10(1.0 + 1e-10) * std::sqrt(18.0), 1e-15);
    for (std::size_t i = 1; i < kNumBands; ++i) EXPECT_NEAR(c.c[i], 0.0, 1e-15);
}

TEST(Cepstrum, RoundTripRelativeError) {
    nnet::Rng rng(8);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        BandEnergies b;
        for (auto& v : b) v = std::exp(8.0 * rng.gaussian());
        const auto back = bands_from_cepstrum(cepstrum_from_bands(b));
        for (std::size_t i = 0; i < kNumBands; ++i) {
            const double want = b[i] + kLogFloor;
            worst = std::max(worst, std::abs(back[i] - want) / want);
        }
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(Cepstrum, DctIsOrthonormal) {
    std::vector<std::array<double, kNumBands>> rows;
    for (std::size_t i = 0; i < kNumBands; ++i) {
        std::array<double, kNumBands> e{};
        e[i] = 1.0;
        rows.push_back(dct18(e));
    }
    for (std::size_t i = 0; i < kNumBands; ++i) {
        for (std::size_t j = 0; j < kNumBands; ++j) {
            const double dot = std::inner_product(rows[i].begin(), rows[i].end(), rows[j].begin(), 0.0);
            EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-12);
        }
    }
}

// ------------------------------------------------------------------ LPC spectrum

TEST(LpcResponse, ZeroLpcIsFlat) {
    const auto r = lpc_frequency_response(LpcCoeffs{});
    for (double v : r) EXPECT_EQ(v, 1.0);
}

TEST(LpcResponse, SinglePoleAtDc) {
    LpcCoeffs lpc;
    lpc.a[0] = 0.9;
    const auto r = lpc_frequency_response(lpc);
    EXPECT_NEAR(r[0], 100.0, 1e-9);
    EXPECT_NEAR(r[160], 1.0 / (1.9 * 1.9), 1e-12);
}

TEST(LpcResponse, MatchesHornerEvaluation) {
    nnet::Rng rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const auto lpc = testkit::random_stable_lpc(rng, 0.9);
        const auto r = lpc_frequency_response(lpc);
        for (std::size_t k = 0; k < kSpectrumBins; ++k) {
            const double want = testkit::naive_lpc_response(lpc, 2.0 * std::numbers::pi * double(k) / 320.0);
            EXPECT_NEAR(r[k], want, 1e-9 * want);
            EXPECT_GT(r[k], 0.0);
        }
    }
}

TEST(LpcResponse, UnstableFilterIsReported) {
    LpcCoeffs lpc;
    lpc.a[0] = 1.0;  // pole on the unit circle at DC
    EXPECT_THROW(lpc_frequency_response(lpc), NumericalError);
}

TEST(Spectrum, AutocorrelationInvertsPowerOfKnownSequence) {
    // x = white noise frame; circular autocorrelation computed directly.
    const auto x = testkit::white_noise(kWindowSize, 10);
    std::array<double, kWindowSize> frame{};
    std::copy(x.begin(), x.end(), frame.begin());
    const auto p = power_spectrum(frame);
    const auto r = autocorrelation_from_power<17>(p);
    for (std::size_t lag = 0; lag < 17; ++lag) {
        double acc = 0.0;
        for (std::size_t n = 0; n < kWindowSize; ++n) acc += x[n] * x[(n + lag) % kWindowSize];
        EXPECT_NEAR(r[lag], acc, 1e-9 * kWindowSize);
    }
}

} // namespace
