#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "vocoder/nnet/matrix.hpp"

namespace vocoder::nnet {

inline constexpr std::size_t kOutputClasses = 256;

inline float sigmoid(float x) noexcept { return 1.0f / (1.0f + std::exp(-x)); }

/// Fully connected layer y = act(W x + b).
struct DenseLayer {
    DenseMatrix weights;  // out x in
    std::vector<float> bias;

    std::size_t inputs() const noexcept { return weights.cols; }
    std::size_t outputs() const noexcept { return weights.rows; }

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

inline std::vector<float> dense_linear(const DenseLayer& layer, std::span<const float> x) {
    check_dims(x.size(), layer.inputs(), "dense");
    std::vector<float> out(layer.bias);
    matvec_accumulate(layer.weights, x, out);
    return out;
}

inline std::vector<float> dense_tanh(const DenseLayer& layer, std::span<const float> x) {
    auto out = dense_linear(layer, x);
    for (auto& v : out) v = std::tanh(v);
    return out;
}

/// Plain GRU with gate rows stacked [u; r; h]. The reset gate multiplies the
/// recurrent candidate term only, as in the sparse sample-rate cell.
struct DenseGru {
    DenseMatrix input;      // 3H x I
    DenseMatrix recurrent;  // 3H x H
    std::vector<float> bias;  // 3H

    std::size_t units() const noexcept { return recurrent.cols; }

    friend bool operator==(const DenseGru&, const DenseGru&) = default;
};

struct GruWorkspace {
    std::vector<float> in;
    std::vector<float> rec;
};

/// h <- GRU(x, h), in place.
inline void gru_step(const DenseGru& gru, std::span<const float> x, std::span<float> h,
                     GruWorkspace& ws) {
    const std::size_t n = gru.units();
    ws.in.assign(gru.bias.begin(), gru.bias.end());
    ws.rec.assign(3 * n, 0.0f);
    matvec_accumulate(gru.input, x, ws.in);
    matvec_accumulate(gru.recurrent, h, ws.rec);
    for (std::size_t i = 0; i < n; ++i) {
        const float u = sigmoid(ws.in[i] + ws.rec[i]);
        const float r = sigmoid(ws.in[n + i] + ws.rec[n + i]);
        const float cand = std::tanh(ws.in[2 * n + i] + r * ws.rec[2 * n + i]);
        h[i] = u * h[i] + (1.0f - u) * cand;
    }
}

/// Output layer a1 * tanh(W1 x) + a2 * tanh(W2 x).
struct DualFcWeights {
    DenseMatrix w1;  // 256 x in
    DenseMatrix w2;  // 256 x in
    std::vector<float> a1;
    std::vector<float> a2;

    friend bool operator==(const DualFcWeights&, const DualFcWeights&) = default;
};

using Logits = std::array<float, kOutputClasses>;

inline void dual_fc(const DualFcWeights& w, std::span<const float> x, Logits& out) {
    check_dims(x.size(), w.w1.cols, "dual_fc");
    check_dims(w.w1.rows, kOutputClasses, "dual_fc rows");
    for (std::size_t k = 0; k < kOutputClasses; ++k) {
        const float s1 = dot(w.w1.data.data() + k * w.w1.cols, x.data(), x.size());
        const float s2 = dot(w.w2.data.data() + k * w.w2.cols, x.data(), x.size());
        out[k] = w.a1[k] * std::tanh(s1) + w.a2[k] * std::tanh(s2);
    }
}

inline Logits dual_fc(const DualFcWeights& w, std::span<const float> x) {
    Logits out{};
    dual_fc(w, x, out);
    return out;
}

} // namespace vocoder::nnet
