#pragma once

// Autoregressive synthesis. Per sample, in the pre-emphasized linear domain:
//
//   y[t] = LPC prediction from the last 16 outputs (clamped to [-2, 2])
//   GRU_A(mu(s[t-1]), mu(y[t]), e[t-1]) -> GRU_B -> dual_fc -> p(e[t])
//   e[t] ~ p(e[t]),  s[t] = y[t] + mu^-1(e[t])
//
// Each 160-sample frame is de-emphasized and clipped to [-1, 1] on output.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "vocoder/dsp/audio.hpp"
#include "vocoder/dsp/emphasis.hpp"
#include "vocoder/dsp/lpc.hpp"
#include "vocoder/dsp/mulaw.hpp"
#include "vocoder/error.hpp"
#include "vocoder/features/frame.hpp"
#include "vocoder/nnet/layers.hpp"
#include "vocoder/nnet/model.hpp"
#include "vocoder/nnet/rng.hpp"
#include "vocoder/nnet/sample_rate.hpp"
#include "vocoder/nnet/sampling.hpp"

namespace vocoder::synth {

inline constexpr double kPredictionLimit = 2.0;

struct SynthOptions {
    std::uint64_t seed = 0;
    /// Laplace scale of the integer offset added to each sampled excitation
    /// code; 0 disables injection.
    double noise_scale = 0.0;
};

struct FrameInput {
    features::ConditioningVector conditioning;
    features::DerivedLpc lpc;
};

struct SynthState {
    nnet::GruState gru_a;
    nnet::GruState gru_b;
    std::array<double, kLpcOrder> history{};  // pre-emphasized s, most recent first
    dsp::MuLawIndex e_prev{dsp::MuLawIndex::kCenter};
    double deemph_state = 0.0;
    nnet::Rng rng;
    double noise_scale = 0.0;
    nnet::FrameNetState frame_net;
    nnet::FrameContrib frame;
    std::vector<float> f;
    std::uint64_t samples_done = 0;

    /// Cold start: zero recurrent state, history and filter memory.
    static SynthState initial(const nnet::ModelWeights& model, const SynthOptions& opt = {}) {
        if (model.empty()) throw InvalidArgument("SynthState: model not loaded");
        if (!(opt.noise_scale >= 0.0)) throw InvalidArgument("SynthState: noise_scale must be >= 0");
        const auto& c = model.config();
        SynthState s;
        s.gru_a = nnet::GruState::zeros(c.units);
        s.gru_b = nnet::GruState::zeros(c.gru_b_units);
        s.rng = nnet::Rng(opt.seed);
        s.noise_scale = opt.noise_scale;
        s.frame_net = nnet::FrameNetState::zeros(c.feature_dim, c.frame_hidden);
        return s;
    }

    struct Scratch {
        nnet::GruAWorkspace gru_a;
        nnet::GruWorkspace gru_b;
        nnet::Logits logits{};
    };
    Scratch scratch;
};

/// Adds round(Laplace(0, scale)) to the code, clamped to [0, 255]. Leaves the
/// generator untouched when scale is 0.
inline dsp::MuLawIndex inject_excitation_noise(dsp::MuLawIndex e, double scale, nnet::Rng& rng) {
    if (!(scale >= 0.0)) throw InvalidArgument("inject_excitation_noise: scale must be >= 0");
    if (scale == 0.0) return e;
    const double offset = std::round(rng.laplace(scale));
    const double code = std::clamp(double(e.code()) + offset, 0.0, 255.0);
    return dsp::MuLawIndex(int(code));
}

namespace detail {

inline void push_history(std::array<double, kLpcOrder>& h, double s) noexcept {
    std::copy_backward(h.begin(), h.end() - 1, h.end());
    h[0] = s;
}

inline void begin_frame(SynthState& st, const features::ConditioningVector& c,
                        const nnet::ModelWeights& model) {
    auto out = nnet::frame_rate_network(c, st.frame_net, model.layers().frame);
    st.frame = std::move(out.contrib);
    st.f = std::move(out.f);
}

/// GRU_A -> GRU_B -> dual_fc for one sample; leaves logits in st.scratch.
inline void run_network(SynthState& st, dsp::MuLawIndex s_prev, dsp::MuLawIndex y_idx,
                        const nnet::ModelWeights& model) {
    const auto& L = model.layers();
    nnet::gru_a_step(st.gru_a.h, s_prev, y_idx, st.e_prev, st.frame, L.sample, model.table(),
                     st.scratch.gru_a);
    nnet::gru_step(L.gru_b, st.gru_a.h, st.gru_b.h, st.scratch.gru_b);
    nnet::dual_fc(L.dual_fc, st.gru_b.h, st.scratch.logits);
}

inline void check_logits(const nnet::Logits& l, std::uint64_t index) {
    for (float v : l) {
        if (!std::isfinite(v)) throw DivergenceError("non-finite logit", index);
    }
}

} // namespace detail

/// Generates one 10 ms frame and advances `state`.
inline std::vector<float> synth_frame(SynthState& state, const features::ConditioningVector& c,
                                      const features::DerivedLpc& lpc,
                                      const nnet::ModelWeights& model) {
    detail::begin_frame(state, c, model);
    const double pitch_gain = std::clamp(c.pitch_gain, 0.0, 1.0);

    std::array<double, kFrameSize> pre{};
    for (std::size_t t = 0; t < kFrameSize; ++t) {
        const double y = std::clamp(dsp::lpc_predict(state.history, lpc.lpc), -kPredictionLimit,
                                    kPredictionLimit);
        detail::run_network(state, dsp::mulaw_encode(state.history[0]), dsp::mulaw_encode(y), model);
        detail::check_logits(state.scratch.logits, state.samples_done);

        auto e = nnet::sample_excitation(state.scratch.logits, pitch_gain, state.rng,
                                         model.config().sampling);
        e = inject_excitation_noise(e, state.noise_scale, state.rng);
        const double s = y + dsp::mulaw_decode(e);
        if (!std::isfinite(s)) throw DivergenceError("non-finite sample", state.samples_done);

        pre[t] = s;
        detail::push_history(state.history, s);
        state.e_prev = e;
        ++state.samples_done;
    }

    auto de = dsp::deemphasis<double>(pre, kEmphasisAlpha, state.deemph_state);
    state.deemph_state = de.state;
    std::vector<float> out(kFrameSize);
    for (std::size_t t = 0; t < kFrameSize; ++t) {
        out[t] = static_cast<float>(std::clamp(de.samples[t], -1.0, 1.0));
    }
    return out;
}

struct TeacherForced {
    std::vector<float> samples;  // y + mu^-1(mu(ref - y)), pre-emphasized domain
    std::vector<dsp::MuLawIndex> excitation;
    std::vector<double> prediction;
    double cross_entropy = 0.0;  // mean -ln p(true excitation), nats
};

/// Drives the network with ground truth: the prediction history holds the
/// reference samples and the true excitation code feeds back as e[t-1].
inline TeacherForced teacher_forced_frame(SynthState& state, const features::ConditioningVector& c,
                                          const features::DerivedLpc& lpc,
                                          const nnet::ModelWeights& model,
                                          std::span<const float, kFrameSize> reference) {
    detail::begin_frame(state, c, model);
    TeacherForced out;
    out.samples.resize(kFrameSize);
    out.excitation.reserve(kFrameSize);
    out.prediction.resize(kFrameSize);
    double ce = 0.0;
    for (std::size_t t = 0; t < kFrameSize; ++t) {
        const double y = std::clamp(dsp::lpc_predict(state.history, lpc.lpc), -kPredictionLimit,
                                    kPredictionLimit);
        detail::run_network(state, dsp::mulaw_encode(state.history[0]), dsp::mulaw_encode(y), model);
        detail::check_logits(state.scratch.logits, state.samples_done);

        const double ref = reference[t];
        const auto e = dsp::mulaw_encode(ref - y);
        const auto p = nnet::softmax(state.scratch.logits);
        ce -= std::log(p[std::size_t(e.code())]);

        out.samples[t] = static_cast<float>(y + dsp::mulaw_decode(e));
        out.prediction[t] = y;
        out.excitation.push_back(e);
        detail::push_history(state.history, ref);
        state.e_prev = e;
        ++state.samples_done;
    }
    out.cross_entropy = ce / double(kFrameSize);
    return out;
}

/// Whole-utterance driver: fresh state, frames in order.
inline AudioBuffer synthesize(std::span<const FrameInput> frames, const nnet::ModelWeights& model,
                              const SynthOptions& opt = {}) {
    if (frames.empty()) return AudioBuffer{};
    auto state = SynthState::initial(model, opt);
    std::vector<float> out;
    out.reserve(frames.size() * kFrameSize);
    for (const auto& fr : frames) {
        const auto block = synth_frame(state, fr.conditioning, fr.lpc, model);
        out.insert(out.end(), block.begin(), block.end());
    }
    return AudioBuffer(std::move(out));
}

} // namespace vocoder::synth
