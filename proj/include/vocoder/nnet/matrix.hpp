#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "vocoder/error.hpp"

namespace vocoder::nnet {

/// Row-major float matrix.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;

    DenseMatrix() = default;
    DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0f) {}

    float& operator()(std::size_t r, std::size_t c) noexcept { return data[r * cols + c]; }
    float operator()(std::size_t r, std::size_t c) const noexcept { return data[r * cols + c]; }

    std::span<const float> row(std::size_t r) const noexcept {
        return std::span<const float>(data).subspan(r * cols, cols);
    }

    std::size_t size() const noexcept { return data.size(); }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;
};

inline void check_dims(std::size_t got, std::size_t want, const char* what) {
    if (got != want) {
        throw InvalidArgument(std::string(what) + ": dimension mismatch (" + std::to_string(got) +
                              " vs " + std::to_string(want) + ")");
    }
}

/// Dot product over fixed 8-lane partial sums: vectorizable, same order on every run.
inline float dot(const float* a, const float* b, std::size_t n) noexcept {
    float lane[8] = {};
    std::size_t c = 0;
    for (; c + 8 <= n; c += 8) {
        for (std::size_t k = 0; k < 8; ++k) lane[k] += a[c + k] * b[c + k];
    }
    for (; c < n; ++c) lane[c % 8] += a[c] * b[c];
    return ((lane[0] + lane[4]) + (lane[1] + lane[5])) + ((lane[2] + lane[6]) + (lane[3] + lane[7]));
}

/// out += m * x
inline void matvec_accumulate(const DenseMatrix& m, std::span<const float> x, std::span<float> out) {
    assert(x.size() == m.cols && out.size() == m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) out[r] += dot(m.data.data() + r * m.cols, x.data(), m.cols);
}

inline std::vector<float> matvec(const DenseMatrix& m, std::span<const float> x) {
    check_dims(x.size(), m.cols, "matvec");
    std::vector<float> out(m.rows, 0.0f);
    matvec_accumulate(m, x, out);
    return out;
}

} // namespace vocoder::nnet
