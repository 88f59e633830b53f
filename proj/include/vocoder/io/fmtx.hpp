#pragma once

// FMTX feature matrix: "FMTX" | u32 version (=1) | u32 rows | u32 cols |
// rows*cols f32, row-major, little-endian. Rows written by `vocoder features`
// hold the 38 conditioning values followed by the 16 derived LPC coefficients.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vocoder/error.hpp"
#include "vocoder/features/conditioning.hpp"
#include "vocoder/io/bytes.hpp"
#include "vocoder/io/file.hpp"
#include "vocoder/synth/synth.hpp"

namespace vocoder::io {

inline constexpr std::uint32_t kFmtxVersion = 1;
inline constexpr std::size_t kFmtxHeaderBytes = 16;
inline constexpr std::size_t kFeatureRowWidth = features::kFeatureDim + kLpcOrder;  // 54

struct FeatureMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<float> data;

    std::span<const float> row(std::size_t r) const noexcept {
        return std::span<const float>(data).subspan(r * cols, cols);
    }

    friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

inline std::vector<std::uint8_t> encode_fmtx(const FeatureMatrix& m) {
    if (m.data.size() != m.rows * m.cols) throw InvalidArgument("FMTX: data size does not match shape");
    ByteWriter w;
    w.put_tag("FMTX");
    w.put_u32(kFmtxVersion);
    w.put_u32(static_cast<std::uint32_t>(m.rows));
    w.put_u32(static_cast<std::uint32_t>(m.cols));
    w.put_f32s(m.data);
    return std::move(w).take();
}

inline FeatureMatrix decode_fmtx(std::span<const std::uint8_t> bytes) {
    ByteReader rd(bytes);
    rd.expect_tag("FMTX", "feature matrix header");
    const std::size_t at = rd.offset();
    if (rd.get_u32("FMTX version") != kFmtxVersion) throw FormatError("FMTX version mismatch", at);
    FeatureMatrix m;
    m.rows = rd.get_u32("FMTX rows");
    m.cols = rd.get_u32("FMTX cols");
    const std::size_t n = m.rows * m.cols;
    rd.require(n * 4, "FMTX payload");
    m.data.resize(n);
    for (auto& v : m.data) v = rd.get_f32("FMTX value");
    if (rd.remaining() != 0) throw FormatError("FMTX trailing bytes", rd.offset());
    return m;
}

inline FeatureMatrix read_fmtx(const std::filesystem::path& path) { return decode_fmtx(read_file(path)); }

inline void write_fmtx(const std::filesystem::path& path, const FeatureMatrix& m) {
    write_file_atomic(path, encode_fmtx(m));
}

inline FeatureMatrix to_feature_matrix(std::span<const features::ConditioningExtractor::Output> frames) {
    FeatureMatrix m;
    m.rows = frames.size();
    m.cols = kFeatureRowWidth;
    m.data.reserve(m.rows * m.cols);
    for (const auto& f : frames) {
        for (double v : f.conditioning.flatten()) m.data.push_back(static_cast<float>(v));
        for (double a : f.lpc.lpc.a) m.data.push_back(static_cast<float>(a));
    }
    return m;
}

/// Rows back to synthesis input. Values were stored as float32.
inline std::vector<synth::FrameInput> to_frame_inputs(const FeatureMatrix& m) {
    if (m.cols != kFeatureRowWidth) {
        throw FormatError("FMTX: expected " + std::to_string(kFeatureRowWidth) + " columns, got " +
                              std::to_string(m.cols),
                          12);
    }
    std::vector<synth::FrameInput> out(m.rows);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto row = m.row(r);
        std::array<double, features::kFeatureDim> flat{};
        for (std::size_t i = 0; i < flat.size(); ++i) {
            if (!std::isfinite(row[i])) {
                throw FormatError("FMTX: non-finite value", kFmtxHeaderBytes + 4 * (r * m.cols + i));
            }
            flat[i] = row[i];
        }
        out[r].conditioning = features::ConditioningVector::unflatten(flat);
        out[r].conditioning.pitch_gain = std::clamp(out[r].conditioning.pitch_gain, 0.0, 1.0);
        for (std::size_t i = 0; i < kLpcOrder; ++i) {
            const float a = row[features::kFeatureDim + i];
            if (!std::isfinite(a)) {
                throw FormatError("FMTX: non-finite value",
                                  kFmtxHeaderBytes + 4 * (r * m.cols + features::kFeatureDim + i));
            }
            out[r].lpc.lpc.a[i] = a;
        }
    }
    return out;
}

} // namespace vocoder::io
