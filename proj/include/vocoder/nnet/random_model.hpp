#pragma once

#include <cstdint>

#include "vocoder/nnet/model.hpp"
#include "vocoder/nnet/model_io.hpp"
#include "vocoder/nnet/rng.hpp"

namespace vocoder::nnet {

inline constexpr double kInitStddev = 0.08;

namespace detail {

inline DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    DenseMatrix m(rows, cols);
    for (auto& v : m.data) v = static_cast<float>(rng.gaussian(0.0, kInitStddev));
    return m;
}

inline std::vector<float> gaussian_vector(std::size_t n, Rng& rng) {
    std::vector<float> v(n);
    for (auto& x : v) x = static_cast<float>(rng.gaussian(0.0, kInitStddev));
    return v;
}

inline DenseLayer gaussian_layer(std::size_t out, std::size_t in, Rng& rng) {
    DenseLayer l;
    l.weights = gaussian_matrix(out, in, rng);
    l.bias = gaussian_vector(out, rng);
    return l;
}

} // namespace detail

/// Untrained model for testing and benchmarking: every parameter drawn from
/// N(0, 0.08^2), GRU_A recurrent matrices pruned to the configured densities.
/// Fully determined by (seed, config).
inline ModelPtr random_model(std::uint64_t seed, const ModelConfig& config) {
    config.validate();
    using namespace detail;
    Rng rng(seed);
    const std::size_t n = config.units;
    const std::size_t b = config.gru_b_units;
    const std::size_t d = config.embed_dim;
    const std::size_t h = config.frame_hidden;
    const std::size_t f = config.feature_dim;

    ModelLayers L;
    L.frame.conv1 = gaussian_layer(h, kConvTaps * f, rng);
    L.frame.conv2 = gaussian_layer(h, kConvTaps * h, rng);
    L.frame.dense1 = gaussian_layer(h, h, rng);
    L.frame.dense2 = gaussian_layer(h, h, rng);
    L.frame.gate_proj = gaussian_layer(3 * n, h, rng);

    L.sample.embedding = gaussian_matrix(kOutputClasses, d, rng);
    L.sample.input = gaussian_matrix(3 * n, kInputSlots * d, rng);
    L.sample.bias = gaussian_vector(3 * n, rng);
    L.sample.w_u = prune_to_blocks(gaussian_matrix(n, n, rng), config.density_u);
    L.sample.w_r = prune_to_blocks(gaussian_matrix(n, n, rng), config.density_r);
    L.sample.w_h = prune_to_blocks(gaussian_matrix(n, n, rng), config.density_h);

    L.gru_b.input = gaussian_matrix(3 * b, n, rng);
    L.gru_b.recurrent = gaussian_matrix(3 * b, b, rng);
    L.gru_b.bias = gaussian_vector(3 * b, rng);

    L.dual_fc.w1 = gaussian_matrix(kOutputClasses, b, rng);
    L.dual_fc.w2 = gaussian_matrix(kOutputClasses, b, rng);
    L.dual_fc.a1 = gaussian_vector(kOutputClasses, rng);
    L.dual_fc.a2 = gaussian_vector(kOutputClasses, rng);

    return make_model(config, std::move(L));
}

/// All-zero parameters of the configured shapes (the sparse matrices keep their
/// block layout with zero values so the density metadata stays consistent).
inline ModelPtr zero_model(const ModelConfig& config) {
    auto base = random_model(0, config);
    ModelLayers L = base->layers();
    auto zero = [](auto& v) { std::fill(v.begin(), v.end(), 0.0f); };
    for (auto* l : {&L.frame.conv1, &L.frame.conv2, &L.frame.dense1, &L.frame.dense2, &L.frame.gate_proj}) {
        zero(l->weights.data);
        zero(l->bias);
    }
    zero(L.sample.embedding.data);
    zero(L.sample.input.data);
    zero(L.sample.bias);
    for (auto* m : {&L.sample.w_u, &L.sample.w_r, &L.sample.w_h}) {
        auto blocks = m->blocks();
        for (auto& blk : blocks) blk.values.fill(0.0f);
        *m = BlockSparseMatrix::from_blocks(m->rows(), m->cols(), std::move(blocks));
    }
    zero(L.gru_b.input.data);
    zero(L.gru_b.recurrent.data);
    zero(L.gru_b.bias);
    zero(L.dual_fc.w1.data);
    zero(L.dual_fc.w2.data);
    zero(L.dual_fc.a1);
    zero(L.dual_fc.a2);
    return make_model(config, std::move(L));
}

} // namespace vocoder::nnet
