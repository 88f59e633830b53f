#pragma once

// The sparse sample-rate GRU (GRU_A). Inputs s[t-1], y[t] and e[t-1] are
// mu-law codes, so their embedding-times-input-matrix products are tabulated
// once per model; per sample only the three block-sparse recurrent matrices
// are multiplied:
//
//   u  = sigmoid(W_u h + v_u[s] + v_u[y] + v_u[e] + g_u + b_u)
//   r  = sigmoid(W_r h + v_r[s] + v_r[y] + v_r[e] + g_r + b_r)
//   h~ = tanh(r o (W_h h) + v_h[s] + v_h[y] + v_h[e] + g_h + b_h)
//   h  = u o h + (1 - u) o h~

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "vocoder/dsp/mulaw.hpp"
#include "vocoder/nnet/block_sparse.hpp"
#include "vocoder/nnet/frame_net.hpp"
#include "vocoder/nnet/layers.hpp"

namespace vocoder::nnet {

enum class InputSlot : std::size_t { kSample = 0, kPrediction = 1, kExcitation = 2 };
inline constexpr std::size_t kInputSlots = 3;

struct SampleRateWeights {
    DenseMatrix embedding;  // 256 x D, shared by the three inputs
    DenseMatrix input;      // 3N x 3D, column groups [s | y | e]
    std::vector<float> bias;  // 3N
    BlockSparseMatrix w_u;
    BlockSparseMatrix w_r;
    BlockSparseMatrix w_h;

    std::size_t units() const noexcept { return w_h.rows(); }
    std::size_t embed_dim() const noexcept { return embedding.cols; }

    friend bool operator==(const SampleRateWeights&, const SampleRateWeights&) = default;
};

/// v[slot][code] = input[:, slot block] * embedding[code], all three gates stacked.
class EmbeddingContribTable {
public:
    EmbeddingContribTable() = default;

    static EmbeddingContribTable build(const SampleRateWeights& w) {
        EmbeddingContribTable t;
        const std::size_t rows = 3 * w.units();
        const std::size_t d = w.embed_dim();
        t.width_ = rows;
        t.data_.assign(kInputSlots * kOutputClasses * rows, 0.0f);
        for (std::size_t slot = 0; slot < kInputSlots; ++slot) {
            for (std::size_t code = 0; code < kOutputClasses; ++code) {
                const auto emb = w.embedding.row(code);
                float* dst = t.data_.data() + (slot * kOutputClasses + code) * rows;
                for (std::size_t r = 0; r < rows; ++r) {
                    const float* wr = w.input.data.data() + r * w.input.cols + slot * d;
                    double acc = 0.0;
                    for (std::size_t k = 0; k < d; ++k) acc += double(wr[k]) * double(emb[k]);
                    dst[r] = static_cast<float>(acc);
                }
            }
        }
        return t;
    }

    std::span<const float> lookup(InputSlot slot, dsp::MuLawIndex code) const noexcept {
        const std::size_t off =
            (static_cast<std::size_t>(slot) * kOutputClasses + std::size_t(code.code())) * width_;
        return std::span<const float>(data_).subspan(off, width_);
    }

    std::size_t width() const noexcept { return width_; }

private:
    std::size_t width_ = 0;
    std::vector<float> data_;
};

struct GruState {
    std::vector<float> h;

    static GruState zeros(std::size_t n) { return GruState{std::vector<float>(n, 0.0f)}; }
    friend bool operator==(const GruState&, const GruState&) = default;
};

struct GruAWorkspace {
    std::vector<float> pre;
    std::vector<float> rec;
};

/// One GRU_A update of `h` in place.
inline void gru_a_step(std::span<float> h, dsp::MuLawIndex s_prev, dsp::MuLawIndex y,
                       dsp::MuLawIndex e_prev, const FrameContrib& frame,
                       const SampleRateWeights& w, const EmbeddingContribTable& table,
                       GruAWorkspace& ws) {
    const std::size_t n = w.units();
    ws.pre.assign(w.bias.begin(), w.bias.end());
    const auto vs = table.lookup(InputSlot::kSample, s_prev);
    const auto vy = table.lookup(InputSlot::kPrediction, y);
    const auto ve = table.lookup(InputSlot::kExcitation, e_prev);
    for (std::size_t i = 0; i < 3 * n; ++i) ws.pre[i] += vs[i] + vy[i] + ve[i] + frame.g[i];

    ws.rec.assign(3 * n, 0.0f);
    std::span<float> rec(ws.rec);
    w.w_u.accumulate(h, rec.subspan(0, n));
    w.w_r.accumulate(h, rec.subspan(n, n));
    w.w_h.accumulate(h, rec.subspan(2 * n, n));

    for (std::size_t i = 0; i < n; ++i) {
        const float u = sigmoid(rec[i] + ws.pre[i]);
        const float r = sigmoid(rec[n + i] + ws.pre[n + i]);
        const float cand = std::tanh(r * rec[2 * n + i] + ws.pre[2 * n + i]);
        h[i] = u * h[i] + (1.0f - u) * cand;
    }
}

inline GruState gru_a_step(const GruState& state, dsp::MuLawIndex s_prev, dsp::MuLawIndex y,
                           dsp::MuLawIndex e_prev, const FrameContrib& frame,
                           const SampleRateWeights& w, const EmbeddingContribTable& table) {
    check_dims(state.h.size(), w.units(), "gru_a_step state");
    check_dims(frame.g.size(), 3 * w.units(), "gru_a_step frame contribution");
    GruState next = state;
    GruAWorkspace ws;
    gru_a_step(next.h, s_prev, y, e_prev, frame, w, table, ws);
    return next;
}

} // namespace vocoder::nnet
