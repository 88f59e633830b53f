#pragma once

// Little-endian byte packing shared by the OPNV, LPNW, FMTX and WAV codecs.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vocoder/error.hpp"

namespace vocoder::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

class ByteWriter {
public:
    void put_tag(std::string_view tag) {
        buf_.insert(buf_.end(), tag.begin(), tag.end());
    }

    void put_u16(std::uint16_t v) { put_le(v); }
    void put_u32(std::uint32_t v) { put_le(v); }
    void put_u64(std::uint64_t v) { put_le(v); }
    void put_i16(std::int16_t v) { put_le(static_cast<std::uint16_t>(v)); }
    void put_f32(float v) { put_le(std::bit_cast<std::uint32_t>(v)); }

    void put_f32s(std::span<const float> values) {
        for (float v : values) put_f32(v);
    }

    std::size_t size() const noexcept { return buf_.size(); }
    const std::vector<std::uint8_t>& bytes() const noexcept { return buf_; }
    std::vector<std::uint8_t> take() && { return std::move(buf_); }

private:
    template <class U>
    void put_le(U v) {
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    std::vector<std::uint8_t> buf_;
};

/// Bounds-checked cursor; every failure reports the offset it stopped at.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

    void expect_tag(std::string_view tag, std::string_view what) {
        require(tag.size(), what);
        if (std::memcmp(data_.data() + pos_, tag.data(), tag.size()) != 0) {
            throw FormatError("bad magic, expected \"" + std::string(tag) + "\" for " +
                                  std::string(what),
                              pos_);
        }
        pos_ += tag.size();
    }

    std::string get_tag(std::size_t n, std::string_view what) {
        require(n, what);
        std::string out(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return out;
    }

    std::uint16_t get_u16(std::string_view what) { return get_le<std::uint16_t>(what); }
    std::uint32_t get_u32(std::string_view what) { return get_le<std::uint32_t>(what); }
    std::uint64_t get_u64(std::string_view what) { return get_le<std::uint64_t>(what); }
    std::int16_t get_i16(std::string_view what) {
        return static_cast<std::int16_t>(get_le<std::uint16_t>(what));
    }
    float get_f32(std::string_view what) {
        return std::bit_cast<float>(get_le<std::uint32_t>(what));
    }

    void skip(std::size_t n, std::string_view what) {
        require(n, what);
        pos_ += n;
    }

    void require(std::size_t n, std::string_view what) const {
        if (remaining() < n) {
            throw FormatError("truncated input while reading " + std::string(what), pos_);
        }
    }

private:
    template <class U>
    U get_le(std::string_view what) {
        require(sizeof(U), what);
        U v = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            v |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
        }
        pos_ += sizeof(U);
        return v;
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

} // namespace vocoder::io
