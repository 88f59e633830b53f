#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "vocoder/error.hpp"

namespace vocoder {

inline constexpr int kSampleRate = 16000;
inline constexpr std::size_t kLpcOrder = 16;
inline constexpr std::size_t kFrameSize = 160;   // 10 ms hop
inline constexpr std::size_t kWindowSize = 320;  // 20 ms analysis window
inline constexpr std::size_t kSpectrumBins = kWindowSize / 2 + 1;
inline constexpr std::size_t kNumBands = 18;
inline constexpr double kEmphasisAlpha = 0.85;

/// Mono 16 kHz samples. Construction rejects non-finite values; nominal range
/// is [-1, 1] but filtered intermediates may exceed it.
class AudioBuffer {
public:
    AudioBuffer() = default;

    explicit AudioBuffer(std::vector<float> samples) : samples_(std::move(samples)) {
        for (std::size_t i = 0; i < samples_.size(); ++i) {
            if (!std::isfinite(samples_[i])) {
                throw InvalidArgument("AudioBuffer: non-finite sample at index " +
                                      std::to_string(i));
            }
        }
    }

    static constexpr int sample_rate() noexcept { return kSampleRate; }

    std::span<const float> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    float operator[](std::size_t i) const noexcept { return samples_[i]; }

    std::vector<float> release() && { return std::move(samples_); }

    friend bool operator==(const AudioBuffer&, const AudioBuffer&) = default;

private:
    std::vector<float> samples_;
};

} // namespace vocoder
