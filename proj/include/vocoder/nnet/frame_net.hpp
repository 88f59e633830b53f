#pragma once

// Frame-rate network: two kernel-3 temporal convolutions over the conditioning
// sequence, two tanh dense layers producing f, and a linear projection of f
// onto the three GRU_A gates. Runs once per 10 ms frame.

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "vocoder/features/frame.hpp"
#include "vocoder/nnet/layers.hpp"

namespace vocoder::nnet {

inline constexpr std::size_t kConvTaps = 3;

struct FrameRateWeights {
    DenseLayer conv1;      // H x (3 * 38), taps ordered oldest .. current
    DenseLayer conv2;      // H x (3 * H)
    DenseLayer dense1;     // H x H
    DenseLayer dense2;     // H x H
    DenseLayer gate_proj;  // 3N x H, rows [u; r; h]

    friend bool operator==(const FrameRateWeights&, const FrameRateWeights&) = default;
};

/// Per-frame additive gate contributions g(u), g(r), g(h), stacked.
struct FrameContrib {
    std::vector<float> g;

    std::size_t units() const noexcept { return g.size() / 3; }
    std::span<const float> gate(std::size_t k) const noexcept {
        return std::span<const float>(g).subspan(k * units(), units());
    }
};

/// Past two conditioning inputs and past two conv1 outputs, oldest first.
struct FrameNetState {
    std::array<std::vector<float>, kConvTaps - 1> inputs;
    std::array<std::vector<float>, kConvTaps - 1> conv1;

    static FrameNetState zeros(std::size_t feature_dim, std::size_t hidden) {
        FrameNetState s;
        for (auto& v : s.inputs) v.assign(feature_dim, 0.0f);
        for (auto& v : s.conv1) v.assign(hidden, 0.0f);
        return s;
    }

    friend bool operator==(const FrameNetState&, const FrameNetState&) = default;
};

struct FrameOutput {
    FrameContrib contrib;
    std::vector<float> f;
};

namespace detail {
inline std::vector<float> stack_taps(const std::array<std::vector<float>, kConvTaps - 1>& past,
                                     std::span<const float> current) {
    std::vector<float> x;
    x.reserve(current.size() * kConvTaps);
    for (const auto& p : past) x.insert(x.end(), p.begin(), p.end());
    x.insert(x.end(), current.begin(), current.end());
    return x;
}

template <class T>
void shift_in(std::array<std::vector<float>, kConvTaps - 1>& past, const T& v) {
    std::rotate(past.begin(), past.begin() + 1, past.end());
    past.back().assign(v.begin(), v.end());
}
} // namespace detail

inline std::vector<float> to_float_features(const features::ConditioningVector& c) {
    const auto flat = c.flatten();
    return std::vector<float>(flat.begin(), flat.end());
}

/// Advances `state` by one frame.
inline FrameOutput frame_rate_network(const features::ConditioningVector& c, FrameNetState& state,
                                      const FrameRateWeights& w) {
    const auto x = to_float_features(c);
    const auto c1 = dense_tanh(w.conv1, detail::stack_taps(state.inputs, x));
    const auto c2 = dense_tanh(w.conv2, detail::stack_taps(state.conv1, c1));
    detail::shift_in(state.inputs, x);
    detail::shift_in(state.conv1, c1);

    FrameOutput out;
    out.f = dense_tanh(w.dense2, dense_tanh(w.dense1, c2));
    out.contrib.g = dense_linear(w.gate_proj, out.f);
    return out;
}

} // namespace vocoder::nnet
