#pragma once

// 16-bit PCM mono 16 kHz RIFF/WAVE. The reader rejects anything else, naming
// the offending header field.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vocoder/dsp/audio.hpp"
#include "vocoder/error.hpp"
#include "vocoder/io/bytes.hpp"
#include "vocoder/io/file.hpp"

namespace vocoder::io {

inline std::int16_t to_pcm16(float x) noexcept {
    const double v = std::round(double(x) * 32768.0);
    return static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
}

inline std::vector<std::uint8_t> encode_wav(const AudioBuffer& audio) {
    const auto data_bytes = static_cast<std::uint32_t>(audio.size() * 2);
    ByteWriter w;
    w.put_tag("RIFF");
    w.put_u32(36 + data_bytes);
    w.put_tag("WAVE");
    w.put_tag("fmt ");
    w.put_u32(16);
    w.put_u16(1);  // PCM
    w.put_u16(1);  // mono
    w.put_u32(kSampleRate);
    w.put_u32(kSampleRate * 2);
    w.put_u16(2);
    w.put_u16(16);
    w.put_tag("data");
    w.put_u32(data_bytes);
    for (float s : audio.samples()) w.put_i16(to_pcm16(s));
    return std::move(w).take();
}

inline AudioBuffer decode_wav(std::span<const std::uint8_t> bytes) {
    ByteReader rd(bytes);
    rd.expect_tag("RIFF", "RIFF header");
    rd.get_u32("RIFF size");
    rd.expect_tag("WAVE", "WAVE form type");

    bool have_fmt = false;
    while (rd.remaining() >= 8) {
        const std::size_t chunk_at = rd.offset();
        const auto id = rd.get_tag(4, "chunk id");
        const auto size = rd.get_u32("chunk size");
        if (id == "fmt ") {
            if (size < 16) throw FormatError("WAV fmt chunk too small", chunk_at);
            auto field = [&](std::uint32_t got, std::uint32_t want, const char* name) {
                if (got != want) {
                    throw FormatError(std::string("unsupported WAV ") + name + " " +
                                          std::to_string(got) + " (need " + std::to_string(want) + ")",
                                      rd.offset());
                }
            };
            field(rd.get_u16("audio_format"), 1, "audio_format");
            field(rd.get_u16("num_channels"), 1, "num_channels");
            field(rd.get_u32("sample_rate"), kSampleRate, "sample_rate");
            rd.get_u32("byte_rate");
            rd.get_u16("block_align");
            field(rd.get_u16("bits_per_sample"), 16, "bits_per_sample");
            rd.skip(size - 16 + (size & 1), "fmt chunk padding");
            have_fmt = true;
        } else if (id == "data") {
            if (!have_fmt) throw FormatError("WAV data chunk before fmt chunk", chunk_at);
            if (size % 2 != 0) throw FormatError("WAV data size is not a whole number of samples", chunk_at + 4);
            rd.require(size, "WAV data");
            std::vector<float> samples(size / 2);
            for (auto& s : samples) s = float(rd.get_i16("sample")) / 32768.0f;
            return AudioBuffer(std::move(samples));
        } else {
            rd.skip(size + (size & 1), "WAV chunk " + id);
        }
    }
    throw FormatError("WAV file has no data chunk", rd.offset());
}

inline AudioBuffer read_wav(const std::filesystem::path& path) { return decode_wav(read_file(path)); }

inline void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
    write_file_atomic(path, encode_wav(audio));
}

} // namespace vocoder::io
