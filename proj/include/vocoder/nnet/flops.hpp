#pragma once

// Analytic complexity model. A multiply-accumulate counts 2 FLOPs, a lone add or
// multiply 1, and every activation (sigmoid, tanh, exp) 4. Sample-rate items run
// 16000 times per second, frame-rate items 100 times.

#include <string>
#include <vector>

#include "vocoder/dsp/audio.hpp"
#include "vocoder/nnet/model.hpp"

namespace vocoder::nnet {

inline constexpr double kActivationFlops = 4.0;
inline constexpr double kFramesPerSecond = double(kSampleRate) / double(kFrameSize);

struct FlopItem {
    std::string name;
    double per_eval = 0.0;  // FLOPs per evaluation
    double rate = 0.0;      // evaluations per second
    double per_second() const noexcept { return per_eval * rate; }
};

struct FlopReport {
    std::vector<FlopItem> items;
    std::size_t sample_rate_weights = 0;
    double per_sample = 0.0;  // sample-rate FLOPs per output sample
    double per_frame = 0.0;   // frame-rate FLOPs per frame
    double total_per_second = 0.0;

    double gflops() const noexcept { return total_per_second * 1e-9; }
};

inline FlopReport flop_count(const ModelWeights& model) {
    FlopReport rep;
    if (model.empty()) return rep;

    const auto& c = model.config();
    const auto& L = model.layers();
    const double n = c.units;
    const double b = c.gru_b_units;
    const double h = c.frame_hidden;
    const double classes = kOutputClasses;
    const double sr = kSampleRate;
    const double fr = kFramesPerSecond;

    const double recurrent_nnz =
        double(L.sample.w_u.nonzeros() + L.sample.w_r.nonzeros() + L.sample.w_h.nonzeros());

    auto sample = [&](std::string name, double f) { rep.items.push_back({std::move(name), f, sr}); };
    auto frame = [&](std::string name, double f) { rep.items.push_back({std::move(name), f, fr}); };

    sample("lpc_prediction", 2.0 * kLpcOrder + 1.0);  // + excitation add
    sample("gru_a_recurrent_sparse", 2.0 * recurrent_nnz);
    sample("gru_a_input_lookups", 3.0 * n * 5.0);  // 3 tables + g + bias per gate row
    sample("gru_a_activations", 3.0 * n * kActivationFlops);
    sample("gru_a_elementwise", n * 5.0);  // reset product, state blend
    sample("gru_b_dense", 2.0 * double(L.gru_b.input.size() + L.gru_b.recurrent.size()) + 3.0 * b * 2.0);
    sample("gru_b_activations", 3.0 * b * kActivationFlops);
    sample("gru_b_elementwise", b * 5.0);
    sample("dual_fc_matvec", 2.0 * double(L.dual_fc.w1.size() + L.dual_fc.w2.size()));
    sample("dual_fc_activations", 2.0 * classes * kActivationFlops);
    sample("dual_fc_scale", 3.0 * classes);
    sample("softmax_sampling", classes * kActivationFlops + 3.0 * classes);

    auto layer = [&](const DenseLayer& l) {
        return 2.0 * double(l.weights.size()) + double(l.bias.size());
    };
    frame("frame_conv1", layer(L.frame.conv1) + h * kActivationFlops);
    frame("frame_conv2", layer(L.frame.conv2) + h * kActivationFlops);
    frame("frame_dense1", layer(L.frame.dense1) + h * kActivationFlops);
    frame("frame_dense2", layer(L.frame.dense2) + h * kActivationFlops);
    frame("frame_gate_projection", layer(L.frame.gate_proj));

    for (const auto& it : rep.items) {
        if (it.rate == sr) rep.per_sample += it.per_eval;
        else rep.per_frame += it.per_eval;
        rep.total_per_second += it.per_second();
    }
    rep.sample_rate_weights = model.sample_rate_weight_count();
    return rep;
}

} // namespace vocoder::nnet
