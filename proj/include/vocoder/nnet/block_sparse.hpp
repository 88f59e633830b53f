#pragma once

// Matrices whose nonzeros are 16x1 column blocks: 16 consecutive rows starting
// at a multiple of 16, one column wide. Storage is grouped by row block so a
// matvec is a sequence of 16-wide axpy updates.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vocoder/error.hpp"
#include "vocoder/nnet/matrix.hpp"

namespace vocoder::nnet {

inline constexpr std::size_t kBlockRows = 16;

struct SparseBlock {
    std::uint32_t row_start = 0;
    std::uint32_t col = 0;
    std::array<float, kBlockRows> values{};

    friend bool operator==(const SparseBlock&, const SparseBlock&) = default;
};

class BlockSparseMatrix {
public:
    BlockSparseMatrix() = default;

    /// An empty (all-zero) matrix of the given shape.
    BlockSparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {
        if (rows % kBlockRows != 0) {
            throw InvalidArgument("BlockSparseMatrix: rows must be a multiple of 16");
        }
        row_ptr_.assign(rows / kBlockRows + 1, 0);
    }

    /// Validates alignment, bounds and uniqueness; blocks may arrive in any order.
    static BlockSparseMatrix from_blocks(std::size_t rows, std::size_t cols,
                                         std::vector<SparseBlock> blocks) {
        BlockSparseMatrix m(rows, cols);
        for (const auto& b : blocks) {
            if (b.row_start % kBlockRows != 0) {
                throw InvalidArgument("BlockSparseMatrix: block row_start " +
                                      std::to_string(b.row_start) + " is not 16-aligned");
            }
            if (b.row_start + kBlockRows > rows || b.col >= cols) {
                throw InvalidArgument("BlockSparseMatrix: block (" + std::to_string(b.row_start) +
                                      ", " + std::to_string(b.col) + ") out of bounds");
            }
        }
        std::sort(blocks.begin(), blocks.end(), [](const SparseBlock& a, const SparseBlock& b) {
            return std::pair(a.row_start, a.col) < std::pair(b.row_start, b.col);
        });
        for (std::size_t i = 1; i < blocks.size(); ++i) {
            if (blocks[i].row_start == blocks[i - 1].row_start && blocks[i].col == blocks[i - 1].col) {
                throw InvalidArgument("BlockSparseMatrix: duplicate block (" +
                                      std::to_string(blocks[i].row_start) + ", " +
                                      std::to_string(blocks[i].col) + ")");
            }
        }
        m.cols_idx_.reserve(blocks.size());
        m.values_.reserve(blocks.size() * kBlockRows);
        for (const auto& b : blocks) {
            ++m.row_ptr_[b.row_start / kBlockRows + 1];
            m.cols_idx_.push_back(b.col);
            m.values_.insert(m.values_.end(), b.values.begin(), b.values.end());
        }
        std::partial_sum(m.row_ptr_.begin(), m.row_ptr_.end(), m.row_ptr_.begin());
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t block_count() const noexcept { return cols_idx_.size(); }
    std::size_t nonzeros() const noexcept { return values_.size(); }

    double density() const noexcept {
        const double total = double(rows_) * double(cols_);
        return total == 0.0 ? 0.0 : double(nonzeros()) / total;
    }

    /// Blocks in canonical (row_start, col) order.
    std::vector<SparseBlock> blocks() const {
        std::vector<SparseBlock> out;
        out.reserve(block_count());
        for (std::size_t rb = 0; rb + 1 < row_ptr_.size(); ++rb) {
            for (auto i = row_ptr_[rb]; i < row_ptr_[rb + 1]; ++i) {
                SparseBlock b;
                b.row_start = static_cast<std::uint32_t>(rb * kBlockRows);
                b.col = cols_idx_[i];
                std::copy_n(values_.begin() + std::ptrdiff_t(i * kBlockRows), kBlockRows,
                            b.values.begin());
                out.push_back(b);
            }
        }
        return out;
    }

    DenseMatrix to_dense() const {
        DenseMatrix d(rows_, cols_);
        for (const auto& b : blocks()) {
            for (std::size_t i = 0; i < kBlockRows; ++i) d(b.row_start + i, b.col) = b.values[i];
        }
        return d;
    }

    /// out += M x; no allocation, no dimension checks beyond debug asserts.
    void accumulate(std::span<const float> x, std::span<float> out) const noexcept {
        for (std::size_t rb = 0; rb + 1 < row_ptr_.size(); ++rb) {
            float acc[kBlockRows] = {};
            const float* v = values_.data() + std::size_t(row_ptr_[rb]) * kBlockRows;
#if defined(__GNUC__)
            // same per-row summation order as the scalar loop, four rows per register
            typedef float f4 __attribute__((vector_size(16)));
            f4 a[4] = {};
            for (auto i = row_ptr_[rb]; i < row_ptr_[rb + 1]; ++i, v += kBlockRows) {
                const float xi = x[cols_idx_[i]];
                f4 w[4];
                std::memcpy(w, v, sizeof w);
                for (int q = 0; q < 4; ++q) a[q] += w[q] * xi;
            }
            std::memcpy(acc, a, sizeof acc);
#else
            for (auto i = row_ptr_[rb]; i < row_ptr_[rb + 1]; ++i, v += kBlockRows) {
                const float xi = x[cols_idx_[i]];
                for (std::size_t r = 0; r < kBlockRows; ++r) acc[r] += v[r] * xi;
            }
#endif
            float* o = out.data() + rb * kBlockRows;
            for (std::size_t r = 0; r < kBlockRows; ++r) o[r] += acc[r];
        }
    }

    friend bool operator==(const BlockSparseMatrix&, const BlockSparseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::uint32_t> row_ptr_{0};
    std::vector<std::uint32_t> cols_idx_;
    std::vector<float> values_;
};

inline std::vector<float> sparse_matvec(const BlockSparseMatrix& m, std::span<const float> x) {
    check_dims(x.size(), m.cols(), "sparse_matvec");
    std::vector<float> out(m.rows(), 0.0f);
    m.accumulate(x, out);
    return out;
}

/// Number of blocks kept for a target density: floor(density * rows * cols / 16).
inline std::size_t blocks_for_density(std::size_t rows, std::size_t cols, double density) {
    return static_cast<std::size_t>(std::floor(density * double(rows) * double(cols) / double(kBlockRows)));
}

/// Keeps the 16x1 blocks with the largest L2 norm (ties broken by position).
inline BlockSparseMatrix prune_to_blocks(const DenseMatrix& dense, double target_density) {
    if (!(target_density > 0.0 && target_density <= 1.0)) {
        throw InvalidArgument("prune_to_blocks: target density must lie in (0, 1]");
    }
    if (dense.rows % kBlockRows != 0) {
        throw InvalidArgument("prune_to_blocks: rows must be a multiple of 16");
    }
    const std::size_t row_blocks = dense.rows / kBlockRows;
    const std::size_t total = row_blocks * dense.cols;
    std::vector<std::pair<double, std::size_t>> norms(total);
    for (std::size_t rb = 0; rb < row_blocks; ++rb) {
        for (std::size_t c = 0; c < dense.cols; ++c) {
            double s = 0.0;
            for (std::size_t i = 0; i < kBlockRows; ++i) {
                const double v = dense(rb * kBlockRows + i, c);
                s += v * v;
            }
            norms[rb * dense.cols + c] = {s, rb * dense.cols + c};
        }
    }
    const std::size_t keep = std::min(total, blocks_for_density(dense.rows, dense.cols, target_density));
    std::stable_sort(norms.begin(), norms.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<SparseBlock> blocks;
    blocks.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        const std::size_t rb = norms[i].second / dense.cols;
        const std::size_t c = norms[i].second % dense.cols;
        SparseBlock b;
        b.row_start = static_cast<std::uint32_t>(rb * kBlockRows);
        b.col = static_cast<std::uint32_t>(c);
        for (std::size_t r = 0; r < kBlockRows; ++r) b.values[r] = dense(rb * kBlockRows + r, c);
        blocks.push_back(b);
    }
    return BlockSparseMatrix::from_blocks(dense.rows, dense.cols, std::move(blocks));
}

} // namespace vocoder::nnet
