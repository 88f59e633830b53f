#pragma once

#include <concepts>
#include <span>
#include <vector>

#include "vocoder/dsp/audio.hpp"
#include "vocoder/error.hpp"

namespace vocoder::dsp {

/// Filter output plus the memory to carry into the next block.
template <std::floating_point T>
struct Filtered {
    std::vector<T> samples;
    T state{};
};

namespace detail {
inline void check_alpha(double alpha, const char* who) {
    if (!(alpha >= 0.0 && alpha < 1.0)) {
        throw InvalidArgument(std::string(who) + ": alpha must lie in [0, 1)");
    }
}
} // namespace detail

/// out[t] = in[t] - alpha * in[t-1]; `state` is in[-1] and the returned state is
/// the last input sample.
template <std::floating_point T>
Filtered<T> preemphasis(std::span<const T> in, T alpha, T state) {
    detail::check_alpha(alpha, "preemphasis");
    Filtered<T> out{std::vector<T>(in.size()), state};
    T prev = state;
    for (std::size_t t = 0; t < in.size(); ++t) {
        out.samples[t] = in[t] - alpha * prev;
        prev = in[t];
    }
    out.state = prev;
    return out;
}

/// out[t] = in[t] + alpha * out[t-1]; `state` is out[-1].
template <std::floating_point T>
Filtered<T> deemphasis(std::span<const T> in, T alpha, T state) {
    detail::check_alpha(alpha, "deemphasis");
    Filtered<T> out{std::vector<T>(in.size()), state};
    T prev = state;
    for (std::size_t t = 0; t < in.size(); ++t) {
        prev = in[t] + alpha * prev;
        out.samples[t] = prev;
    }
    out.state = prev;
    return out;
}

inline std::pair<AudioBuffer, float> preemphasis(const AudioBuffer& signal, float alpha,
                                                 float state) {
    auto r = preemphasis<float>(signal.samples(), alpha, state);
    return {AudioBuffer(std::move(r.samples)), r.state};
}

inline std::pair<AudioBuffer, float> deemphasis(const AudioBuffer& signal, float alpha,
                                                float state) {
    auto r = deemphasis<float>(signal.samples(), alpha, state);
    return {AudioBuffer(std::move(r.samples)), r.state};
}

} // namespace vocoder::dsp
