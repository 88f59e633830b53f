#pragma once

// Continuous mu-law (mu = 255) companding onto 8-bit codes centred at 128.
//
//   code(x) = clamp(round(128 + 127 * sign(x) * ln(1 + 255|x|) / ln 256), 0, 255)
//
// Negative inputs beyond -1 are not clipped before companding so that code 0
// (amplitude ~ -1.044) is reachable and every code survives encode(decode(c)).

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <string>

#include "vocoder/error.hpp"

namespace vocoder::dsp {

class MuLawIndex {
public:
    static constexpr int kLevels = 256;
    static constexpr int kCenter = 128;

    constexpr MuLawIndex() = default;

    constexpr explicit MuLawIndex(int code) : code_(static_cast<std::uint8_t>(code)) {
        if (code < 0 || code >= kLevels) {
            throw InvalidArgument("mu-law code out of range: " + std::to_string(code));
        }
    }

    constexpr int code() const noexcept { return code_; }

    friend constexpr auto operator<=>(MuLawIndex, MuLawIndex) = default;

private:
    std::uint8_t code_ = kCenter;
};

namespace detail {

inline const std::array<double, 256>& mulaw_table() {
    static const std::array<double, 256> table = [] {
        std::array<double, 256> t{};
        const double log256 = std::log(256.0);
        for (int c = 0; c < 256; ++c) {
            const int k = c - MuLawIndex::kCenter;
            const double mag = std::expm1(std::abs(k) * log256 / 127.0) / 255.0;
            t[static_cast<std::size_t>(c)] = k < 0 ? -mag : mag;
        }
        return t;
    }();
    return table;
}

} // namespace detail

inline MuLawIndex mulaw_encode(double x) {
    if (!std::isfinite(x)) throw InvalidArgument("mulaw_encode: non-finite input");
    static const double inv_log256 = 1.0 / std::log(256.0);
    const double mag = std::log1p(255.0 * std::min(std::abs(x), 1e6)) * inv_log256;
    const double raw = 128.0 + 127.0 * (x < 0.0 ? -mag : mag);
    const double code = std::clamp(std::round(raw), 0.0, 255.0);
    return MuLawIndex(static_cast<int>(code));
}

inline double mulaw_decode(MuLawIndex index) noexcept {
    return detail::mulaw_table()[static_cast<std::size_t>(index.code())];
}

} // namespace vocoder::dsp
