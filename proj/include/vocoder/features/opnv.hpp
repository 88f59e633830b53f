#pragma once

// OPNV parameter dump, little-endian:
//   "OPNV" | u32 version (=1) | u32 frame_count |
//   frame_count x { 16 f32 lpc_q | 5 f32 ltp_gains | f32 pitch_period | 160 i16 pcm }

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vocoder/error.hpp"
#include "vocoder/features/frame.hpp"
#include "vocoder/io/bytes.hpp"
#include "vocoder/io/file.hpp"

namespace vocoder::features {

inline constexpr std::uint32_t kOpnvVersion = 1;
inline constexpr std::size_t kOpnvHeaderBytes = 12;
inline constexpr std::size_t kOpnvRecordBytes = 4 * (kLpcOrder + kLtpTaps + 1) + 2 * kFrameSize;
static_assert(kOpnvRecordBytes == 408);

inline std::vector<FrameFeatures> parse_feature_dump(std::span<const std::uint8_t> bytes) {
    io::ByteReader rd(bytes);
    rd.expect_tag("OPNV", "OPNV header");
    const std::size_t version_at = rd.offset();
    const auto version = rd.get_u32("OPNV version");
    if (version != kOpnvVersion) {
        throw FormatError("OPNV version mismatch: got " + std::to_string(version) +
                              ", expected " + std::to_string(kOpnvVersion),
                          version_at);
    }
    const auto count = rd.get_u32("OPNV frame_count");

    auto finite = [&](float v, const char* field) {
        if (!std::isfinite(v)) {
            throw FormatError(std::string("OPNV non-finite ") + field, rd.offset() - 4);
        }
        return double(v);
    };

    std::vector<FrameFeatures> frames;
    frames.reserve(std::min<std::size_t>(count, rd.remaining() / kOpnvRecordBytes + 1));
    for (std::uint32_t f = 0; f < count; ++f) {
        rd.require(kOpnvRecordBytes, "OPNV frame record " + std::to_string(f));
        FrameFeatures fr;
        for (auto& a : fr.lpc_q.a) a = finite(rd.get_f32("lpc_q"), "lpc_q");
        for (auto& g : fr.ltp_gains) g = finite(rd.get_f32("ltp_gains"), "ltp_gains");
        fr.pitch_period = clamp_pitch(finite(rd.get_f32("pitch_period"), "pitch_period"));
        for (auto& s : fr.decoded) s = rd.get_i16("decoded");
        frames.push_back(fr);
    }
    if (rd.remaining() != 0) {
        throw FormatError("OPNV trailing bytes after " + std::to_string(count) + " frames",
                          rd.offset());
    }
    return frames;
}

inline std::vector<FrameFeatures> load_feature_dump(const std::filesystem::path& path) {
    return parse_feature_dump(io::read_file(path));
}

inline std::vector<std::uint8_t> serialize_feature_dump(std::span<const FrameFeatures> frames) {
    io::ByteWriter w;
    w.put_tag("OPNV");
    w.put_u32(kOpnvVersion);
    w.put_u32(static_cast<std::uint32_t>(frames.size()));
    for (std::size_t f = 0; f < frames.size(); ++f) {
        const auto& fr = frames[f];
        if (!fr.lpc_q.finite() || !std::isfinite(fr.pitch_period) ||
            fr.pitch_period < kMinPitch || fr.pitch_period > kMaxPitch) {
            throw InvalidArgument("write_feature_dump: frame " + std::to_string(f) + " is invalid");
        }
        for (double a : fr.lpc_q.a) w.put_f32(static_cast<float>(a));
        for (double g : fr.ltp_gains) {
            if (!std::isfinite(g)) {
                throw InvalidArgument("write_feature_dump: non-finite LTP gain in frame " +
                                      std::to_string(f));
            }
            w.put_f32(static_cast<float>(g));
        }
        w.put_f32(static_cast<float>(fr.pitch_period));
        for (auto s : fr.decoded) w.put_i16(s);
    }
    return std::move(w).take();
}

/// Returns the number of bytes written.
inline std::size_t write_feature_dump(std::span<const FrameFeatures> frames,
                                      const std::filesystem::path& path) {
    const auto bytes = serialize_feature_dump(frames);
    io::write_file_atomic(path, bytes);
    return bytes.size();
}

} // namespace vocoder::features
