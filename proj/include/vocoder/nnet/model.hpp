#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>

#include "vocoder/error.hpp"
#include "vocoder/features/frame.hpp"
#include "vocoder/nnet/frame_net.hpp"
#include "vocoder/nnet/layers.hpp"
#include "vocoder/nnet/sample_rate.hpp"
#include "vocoder/nnet/sampling.hpp"

namespace vocoder::nnet {

struct ModelConfig {
    std::uint32_t units = 384;         // GRU_A
    std::uint32_t gru_b_units = 16;
    std::uint32_t embed_dim = 128;     // only used to build the contribution tables
    std::uint32_t frame_hidden = 128;
    std::uint32_t feature_dim = features::kFeatureDim;
    double density_u = 0.05;
    double density_r = 0.05;
    double density_h = 0.2;
    SamplingParams sampling;
    /// Marks frame-rate weights as adapted to decoded-speech features.
    bool frame_net_adapted = false;

    static ModelConfig reference() { return {}; }

    /// Small network for fast tests; same densities as the reference.
    static ModelConfig tiny() {
        ModelConfig c;
        c.units = 32;
        c.gru_b_units = 8;
        c.embed_dim = 8;
        c.frame_hidden = 16;
        return c;
    }

    double mean_density() const noexcept { return (density_u + density_r + density_h) / 3.0; }

    void validate() const {
        auto fail = [](const std::string& m) { throw InvalidArgument("model config: " + m); };
        if (units == 0 || units % kBlockRows != 0) fail("GRU_A units must be a positive multiple of 16");
        if (gru_b_units == 0) fail("GRU_B units must be positive");
        if (embed_dim == 0) fail("embedding dimension must be positive");
        if (frame_hidden == 0) fail("frame hidden size must be positive");
        if (feature_dim != features::kFeatureDim) fail("feature dimension must be 38");
        for (double d : {density_u, density_r, density_h}) {
            if (!(d > 0.0 && d <= 1.0)) fail("densities must lie in (0, 1]");
        }
        if (!(sampling.beta_slope >= 0.0) || !std::isfinite(sampling.beta_slope)) {
            fail("beta slope must be finite and non-negative");
        }
        if (!(sampling.threshold >= 0.0 && sampling.threshold < 1.0)) {
            fail("sampling threshold must lie in [0, 1)");
        }
    }

    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct ModelLayers {
    FrameRateWeights frame;
    SampleRateWeights sample;
    DenseGru gru_b;
    DualFcWeights dual_fc;

    friend bool operator==(const ModelLayers&, const ModelLayers&) = default;
};

/// sqrt(d * N^2 + N): dense GRU size with the same parameter budget.
inline double equivalent_units(std::size_t n_a, double density) {
    const double n = double(n_a);
    return std::sqrt(density * n * n + n);
}

namespace detail {

inline void expect_shape(const DenseMatrix& m, std::size_t rows, std::size_t cols, const char* what) {
    if (m.rows != rows || m.cols != cols || m.data.size() != rows * cols) {
        throw InvalidArgument(std::string("model shape mismatch in ") + what + ": got " +
                              std::to_string(m.rows) + "x" + std::to_string(m.cols) + ", expected " +
                              std::to_string(rows) + "x" + std::to_string(cols));
    }
}

inline void expect_len(const std::vector<float>& v, std::size_t n, const char* what) {
    if (v.size() != n) {
        throw InvalidArgument(std::string("model shape mismatch in ") + what + ": length " +
                              std::to_string(v.size()) + ", expected " + std::to_string(n));
    }
}

inline void expect_layer(const DenseLayer& l, std::size_t out, std::size_t in, const char* what) {
    expect_shape(l.weights, out, in, what);
    expect_len(l.bias, out, what);
}

inline void expect_sparse(const BlockSparseMatrix& m, std::size_t n, double density, const char* what) {
    if (m.rows() != n || m.cols() != n) {
        throw InvalidArgument(std::string("model shape mismatch in ") + what);
    }
    const double one_block = double(kBlockRows) / (double(n) * double(n));
    if (std::abs(m.density() - density) > one_block + 1e-12) {
        throw InvalidArgument(std::string("density metadata inconsistent with stored blocks in ") +
                              what + ": stored " + std::to_string(m.density()) + ", declared " +
                              std::to_string(density));
    }
}

} // namespace detail

/// Immutable after construction; share as std::shared_ptr<const ModelWeights>.
class ModelWeights {
public:
    ModelWeights() = default;

    ModelWeights(ModelConfig config, ModelLayers layers, std::uint64_t checksum)
        : config_(config), layers_(std::move(layers)), checksum_(checksum) {
        config_.validate();
        validate_shapes();
        table_ = EmbeddingContribTable::build(layers_.sample);
        loaded_ = true;
    }

    bool empty() const noexcept { return !loaded_; }
    const ModelConfig& config() const noexcept { return config_; }
    const ModelLayers& layers() const noexcept { return layers_; }
    const EmbeddingContribTable& table() const noexcept { return table_; }
    std::uint64_t checksum() const noexcept { return checksum_; }

    /// Multiplicative weights evaluated per output sample: GRU_A recurrent
    /// nonzeros, GRU_B input and recurrent matrices, dual_fc matrices.
    std::size_t sample_rate_weight_count() const noexcept {
        if (!loaded_) return 0;
        const auto& s = layers_.sample;
        return s.w_u.nonzeros() + s.w_r.nonzeros() + s.w_h.nonzeros() + layers_.gru_b.input.size() +
               layers_.gru_b.recurrent.size() + layers_.dual_fc.w1.size() + layers_.dual_fc.w2.size();
    }

private:
    void validate_shapes() const {
        using namespace detail;
        const std::size_t n = config_.units;
        const std::size_t b = config_.gru_b_units;
        const std::size_t d = config_.embed_dim;
        const std::size_t h = config_.frame_hidden;
        const std::size_t f = config_.feature_dim;
        const auto& L = layers_;
        expect_layer(L.frame.conv1, h, kConvTaps * f, "frame conv1");
        expect_layer(L.frame.conv2, h, kConvTaps * h, "frame conv2");
        expect_layer(L.frame.dense1, h, h, "frame dense1");
        expect_layer(L.frame.dense2, h, h, "frame dense2");
        expect_layer(L.frame.gate_proj, 3 * n, h, "frame gate projection");
        expect_shape(L.sample.embedding, kOutputClasses, d, "embedding");
        expect_shape(L.sample.input, 3 * n, kInputSlots * d, "GRU_A input");
        expect_len(L.sample.bias, 3 * n, "GRU_A bias");
        expect_sparse(L.sample.w_u, n, config_.density_u, "GRU_A W_u");
        expect_sparse(L.sample.w_r, n, config_.density_r, "GRU_A W_r");
        expect_sparse(L.sample.w_h, n, config_.density_h, "GRU_A W_h");
        expect_shape(L.gru_b.input, 3 * b, n, "GRU_B input");
        expect_shape(L.gru_b.recurrent, 3 * b, b, "GRU_B recurrent");
        expect_len(L.gru_b.bias, 3 * b, "GRU_B bias");
        expect_shape(L.dual_fc.w1, kOutputClasses, b, "dual_fc W1");
        expect_shape(L.dual_fc.w2, kOutputClasses, b, "dual_fc W2");
        expect_len(L.dual_fc.a1, kOutputClasses, "dual_fc a1");
        expect_len(L.dual_fc.a2, kOutputClasses, "dual_fc a2");
    }

    ModelConfig config_;
    ModelLayers layers_;
    EmbeddingContribTable table_;
    std::uint64_t checksum_ = 0;
    bool loaded_ = false;
};

using ModelPtr = std::shared_ptr<const ModelWeights>;

} // namespace vocoder::nnet
