// Re-synthesizes one second of a synthetic vowel-like signal with an untrained
// tiny model: dump -> conditioning features -> sample-rate network -> WAV.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "vocoder.hpp"

int main(int argc, char** argv) {
    using namespace vocoder;
    const char* out_path = argc > 1 ? argv[1] : "minimal_synthesis.wav";

    std::vector<features::FrameFeatures> frames(100);
    double phase = 0.0;
    for (auto& f : frames) {
        f.pitch_period = 100.0;
        f.ltp_gains = {0.1, 0.15, 0.3, 0.15, 0.1};
        for (auto& s : f.decoded) {
            phase += 2.0 * std::numbers::pi * 160.0 / kSampleRate;
            s = static_cast<std::int16_t>(6000.0 * (std::sin(phase) + 0.5 * std::sin(3.0 * phase)));
        }
    }

    const auto model = nnet::random_model(1, nnet::ModelConfig::tiny());
    std::vector<synth::FrameInput> inputs;
    for (const auto& o : features::extract_features(frames)) inputs.push_back({o.conditioning, o.lpc});

    const auto audio = synth::synthesize(inputs, *model, {.seed = 7});
    io::write_wav(out_path, audio);
    std::printf("wrote %zu samples to %s\n", audio.size(), out_path);
    return 0;
}
