#pragma once

// `vocoder` command-line surface. Kept in a header so the test suite can run
// commands in-process and inspect exit codes and output.
//
// Exit codes: 0 success, 1 I/O failure, 2 format or validation failure,
// 3 model could not be loaded (synth and bench only).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "vocoder.hpp"

namespace vocoder::cli {

enum ExitCode : int { kOk = 0, kIoFailure = 1, kFormatFailure = 2, kModelFailure = 3 };

inline void init_logging() {
    static const bool done = [] {
        auto logger = spdlog::stderr_logger_mt("vocoder");
        spdlog::set_default_logger(logger);
        spdlog::set_pattern("[%l] %v");
        const char* env = std::getenv("VOCODER_LOG");
        spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
        return true;
    }();
    (void)done;
}

inline std::string hex64(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

/// Maps library exceptions onto exit codes, printing the diagnostic to `err`.
template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kFormatFailure;
    } catch (const ChecksumError& e) {
        err << "error: " << e.what() << '\n';
        return kFormatFailure;
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kFormatFailure;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIoFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFormatFailure;
    }
}

// ---------------------------------------------------------------- features

struct FeaturesArgs {
    std::string input;
    std::string output;
    bool json_summary = false;
};

inline int cmd_features(const FeaturesArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto frames = features::load_feature_dump(a.input);
        spdlog::info("read {} frames from {}", frames.size(), a.input);
        const auto extracted = features::extract_features(frames);
        const auto matrix = io::to_feature_matrix(extracted);
        io::write_fmtx(a.output, matrix);
        if (a.json_summary) {
            std::vector<double> mean(matrix.cols, 0.0);
            std::vector<double> var(matrix.cols, 0.0);
            for (std::size_t r = 0; r < matrix.rows; ++r) {
                for (std::size_t c = 0; c < matrix.cols; ++c) mean[c] += matrix.row(r)[c];
            }
            for (auto& m : mean) m = matrix.rows ? m / double(matrix.rows) : 0.0;
            for (std::size_t r = 0; r < matrix.rows; ++r) {
                for (std::size_t c = 0; c < matrix.cols; ++c) {
                    const double d = matrix.row(r)[c] - mean[c];
                    var[c] += d * d;
                }
            }
            for (auto& v : var) v = matrix.rows ? v / double(matrix.rows) : 0.0;
            nlohmann::ordered_json j;
            j["frames"] = matrix.rows;
            j["columns"] = matrix.cols;
            j["conditioning_dim"] = features::kFeatureDim;
            j["lpc_order"] = kLpcOrder;
            j["mean"] = mean;
            j["variance"] = var;
            out << j.dump() << '\n';
        }
        return int(kOk);
    });
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string features;
    std::string model;
    std::string output;
    std::uint64_t seed = 0;
    double noise_scale = 0.0;
};

inline int cmd_synth(const SynthArgs& a, std::ostream& /*out*/, std::ostream& err) {
    nnet::ModelPtr model;
    try {
        model = nnet::load_model(a.model);
    } catch (const std::exception& e) {
        err << "error: cannot load model: " << e.what() << '\n';
        return kModelFailure;
    }
    return guarded(err, [&] {
        const auto inputs = io::to_frame_inputs(io::read_fmtx(a.features));
        synth::SynthOptions opt;
        opt.seed = a.seed;
        opt.noise_scale = a.noise_scale;
        const auto audio = synth::synthesize(inputs, *model, opt);
        io::write_wav(a.output, audio);
        spdlog::info("wrote {} samples to {}", audio.size(), a.output);
        return int(kOk);
    });
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string model;
    double seconds = 1.0;
    unsigned streams = 1;
    std::uint64_t seed = 0;
    bool json = false;
};

/// Random but well-formed synthesis input: Gaussian cepstra, LPC derived
/// through the regular cepstrum-to-LPC path.
inline std::vector<synth::FrameInput> random_frame_inputs(std::size_t frames, std::uint64_t seed) {
    nnet::Rng rng(seed);
    std::vector<synth::FrameInput> out(frames);
    for (auto& f : out) {
        for (std::size_t i = 0; i < kNumBands; ++i) {
            const double base = i == 0 ? -8.0 : 0.0;
            f.conditioning.cepstrum_decoded.c[i] = base + rng.gaussian(0.0, i == 0 ? 2.0 : 0.5);
            f.conditioning.cepstrum_lpc.c[i] = f.conditioning.cepstrum_decoded.c[i] + rng.gaussian(0.0, 0.1);
        }
        f.conditioning.pitch_period_norm = features::normalize_pitch(16.0 + 496.0 * rng.uniform());
        f.conditioning.pitch_gain = rng.uniform();
        f.lpc = features::lpc_from_conditioning(f.conditioning);
    }
    return out;
}

inline int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    if (!(a.seconds >= 0.0) || a.streams == 0) {
        err << "error: --seconds must be >= 0 and --streams >= 1\n";
        return kFormatFailure;
    }
    nnet::ModelPtr model;
    try {
        model = nnet::load_model(a.model);
    } catch (const std::exception& e) {
        err << "error: cannot load model: " << e.what() << '\n';
        return kModelFailure;
    }
    return guarded(err, [&] {
        const auto flops = nnet::flop_count(*model);
        const auto frames = static_cast<std::size_t>(std::llround(a.seconds * nnet::kFramesPerSecond));
        const double per_stream_seconds = double(frames) / nnet::kFramesPerSecond;

        std::vector<std::vector<synth::FrameInput>> inputs(a.streams);
        for (unsigned s = 0; s < a.streams; ++s) inputs[s] = random_frame_inputs(frames, a.seed + s);

        const auto t0 = std::chrono::steady_clock::now();
        if (frames > 0) {
            std::vector<std::thread> workers;
            std::vector<std::exception_ptr> errors(a.streams);
            for (unsigned s = 0; s < a.streams; ++s) {
                workers.emplace_back([&, s] {
                    try {
                        synth::SynthOptions opt;
                        opt.seed = a.seed + s;
                        (void)synth::synthesize(inputs[s], *model, opt);
                    } catch (...) {
                        errors[s] = std::current_exception();
                    }
                });
            }
            for (auto& w : workers) w.join();
            for (auto& e : errors) {
                if (e) std::rethrow_exception(e);
            }
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const double synthesized = per_stream_seconds * a.streams;
        const double rtf = (frames > 0 && wall > 0.0) ? synthesized / wall : 0.0;
        const double achieved = (frames > 0 && wall > 0.0) ? flops.total_per_second * synthesized / wall * 1e-9 : 0.0;

        if (a.json) {
            nlohmann::ordered_json j;
            j["streams"] = a.streams;
            j["seconds_per_stream"] = per_stream_seconds;
            j["synthesized_seconds"] = synthesized;
            j["wall_seconds"] = wall;
            j["real_time_factor"] = rtf;
            j["analytic_gflops"] = flops.gflops();
            j["achieved_gflop_per_s"] = achieved;
            j["sample_rate_weights"] = flops.sample_rate_weights;
            out << j.dump() << '\n';
        } else {
            out << std::fixed << std::setprecision(3)
                << "streams:               " << a.streams << '\n'
                << "synthesized seconds:   " << synthesized << '\n'
                << "wall seconds:          " << wall << '\n'
                << "real-time factor:      " << rtf << "x\n"
                << "analytic complexity:   " << flops.gflops() << " GFLOPS\n"
                << "achieved throughput:   " << achieved << " GFLOP/s\n";
        }
        return int(kOk);
    });
}

// ---------------------------------------------------------------- model-info

struct ModelInfoArgs {
    std::string model;
    bool json = false;
};

inline nlohmann::ordered_json model_info_json(const nnet::ModelWeights& m) {
    const auto& c = m.config();
    const auto& L = m.layers();
    const auto flops = nnet::flop_count(m);
    auto shape = [](std::size_t r, std::size_t k) { return std::vector<std::size_t>{r, k}; };

    nlohmann::ordered_json j;
    j["checksum"] = hex64(m.checksum());
    j["config"] = {{"gru_a_units", c.units},       {"gru_b_units", c.gru_b_units},
                   {"embedding_dim", c.embed_dim}, {"frame_hidden", c.frame_hidden},
                   {"feature_dim", c.feature_dim}, {"beta_slope", c.sampling.beta_slope},
                   {"sampling_threshold", c.sampling.threshold},
                   {"frame_net_adapted", c.frame_net_adapted}};
    j["layers"] = {
        {"frame_conv1", shape(L.frame.conv1.weights.rows, L.frame.conv1.weights.cols)},
        {"frame_conv2", shape(L.frame.conv2.weights.rows, L.frame.conv2.weights.cols)},
        {"frame_dense1", shape(L.frame.dense1.weights.rows, L.frame.dense1.weights.cols)},
        {"frame_dense2", shape(L.frame.dense2.weights.rows, L.frame.dense2.weights.cols)},
        {"frame_gate_projection", shape(L.frame.gate_proj.weights.rows, L.frame.gate_proj.weights.cols)},
        {"embedding", shape(L.sample.embedding.rows, L.sample.embedding.cols)},
        {"gru_a_input", shape(L.sample.input.rows, L.sample.input.cols)},
        {"gru_a_w_u", shape(L.sample.w_u.rows(), L.sample.w_u.cols())},
        {"gru_a_w_r", shape(L.sample.w_r.rows(), L.sample.w_r.cols())},
        {"gru_a_w_h", shape(L.sample.w_h.rows(), L.sample.w_h.cols())},
        {"gru_b_input", shape(L.gru_b.input.rows, L.gru_b.input.cols)},
        {"gru_b_recurrent", shape(L.gru_b.recurrent.rows, L.gru_b.recurrent.cols)},
        {"dual_fc_w1", shape(L.dual_fc.w1.rows, L.dual_fc.w1.cols)},
        {"dual_fc_w2", shape(L.dual_fc.w2.rows, L.dual_fc.w2.cols)}};
    j["densities"] = {{"w_u", L.sample.w_u.density()},
                      {"w_r", L.sample.w_r.density()},
                      {"w_h", L.sample.w_h.density()},
                      {"declared_mean", c.mean_density()},
                      {"stored_mean",
                       (L.sample.w_u.density() + L.sample.w_r.density() + L.sample.w_h.density()) / 3.0}};
    j["weights"] = {{"gru_a_recurrent_nonzeros",
                     L.sample.w_u.nonzeros() + L.sample.w_r.nonzeros() + L.sample.w_h.nonzeros()},
                    {"gru_b", L.gru_b.input.size() + L.gru_b.recurrent.size()},
                    {"dual_fc", L.dual_fc.w1.size() + L.dual_fc.w2.size()},
                    {"sample_rate_total", m.sample_rate_weight_count()}};
    const double eq = nnet::equivalent_units(c.units, c.mean_density());
    j["equivalent_units"] = {
        {"value", eq},
        {"formula", "sqrt(d*N^2 + N)"},
        {"note", "formula value; the figure 122 quoted for N=384, d=0.1 does not follow from the formula"}};
    nlohmann::ordered_json items = nlohmann::ordered_json::array();
    for (const auto& it : flops.items) {
        items.push_back({{"name", it.name}, {"flops_per_eval", it.per_eval}, {"rate_hz", it.rate}});
    }
    j["complexity"] = {{"gflops", flops.gflops()},
                       {"per_sample_flops", flops.per_sample},
                       {"per_frame_flops", flops.per_frame},
                       {"items", items}};
    return j;
}

inline int cmd_model_info(const ModelInfoArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto model = nnet::load_model(a.model);
        const auto j = model_info_json(*model);
        if (a.json) {
            out << j.dump() << '\n';
            return int(kOk);
        }
        out << "checksum:            " << j["checksum"].get<std::string>() << '\n';
        out << "layers:\n";
        for (const auto& [name, s] : j["layers"].items()) {
            out << "  " << std::left << std::setw(24) << name << s[0] << " x " << s[1] << '\n';
        }
        out << std::fixed << std::setprecision(4);
        out << "densities:           W_u " << j["densities"]["w_u"].get<double>() << ", W_r "
            << j["densities"]["w_r"].get<double>() << ", W_h " << j["densities"]["w_h"].get<double>()
            << ", mean " << j["densities"]["stored_mean"].get<double>() << '\n';
        out << "sample-rate weights: " << j["weights"]["sample_rate_total"].get<std::size_t>()
            << " (GRU_A recurrent " << j["weights"]["gru_a_recurrent_nonzeros"].get<std::size_t>()
            << ", GRU_B " << j["weights"]["gru_b"].get<std::size_t>() << ", dual_fc "
            << j["weights"]["dual_fc"].get<std::size_t>() << ")\n";
        out << std::setprecision(1);
        out << "equivalent units:    " << j["equivalent_units"]["value"].get<double>()
            << " (sqrt(d*N^2 + N); the figure 122 quoted for N=384, d=0.1 differs)\n";
        out << std::setprecision(3);
        out << "complexity:          " << j["complexity"]["gflops"].get<double>() << " GFLOPS\n";
        for (const auto& it : j["complexity"]["items"]) {
            out << "  " << std::left << std::setw(24) << it["name"].get<std::string>() << std::right
                << std::setw(12) << std::setprecision(0) << it["flops_per_eval"].get<double>()
                << " FLOP x " << it["rate_hz"].get<double>() << " Hz\n";
        }
        return int(kOk);
    });
}

// ---------------------------------------------------------------- make-test-model

struct MakeModelArgs {
    std::string output;
    std::uint64_t seed = 0;
    std::string config = "reference";
    long units = -1;  // override GRU_A size when >= 0
};

inline int cmd_make_test_model(const MakeModelArgs& a, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        nnet::ModelConfig cfg;
        if (a.config == "reference") {
            cfg = nnet::ModelConfig::reference();
        } else if (a.config == "tiny") {
            cfg = nnet::ModelConfig::tiny();
        } else {
            throw InvalidArgument("unknown --config '" + a.config + "' (expected reference or tiny)");
        }
        if (a.units >= 0) cfg.units = static_cast<std::uint32_t>(a.units);
        const auto model = nnet::random_model(a.seed, cfg);
        const auto bytes = nnet::save_model(*model, a.output);
        out << "wrote " << bytes << " bytes, checksum " << hex64(model->checksum()) << '\n';
        return int(kOk);
    });
}

// ---------------------------------------------------------------- dispatcher

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    init_logging();
    CLI::App app{"Neural LPC vocoder for codec parameter re-synthesis", "vocoder"};
    app.require_subcommand(1);

    FeaturesArgs fa;
    auto* features_cmd = app.add_subcommand("features", "Convert an OPNV dump to a feature matrix");
    features_cmd->add_option("input", fa.input, "OPNV parameter dump")->required();
    features_cmd->add_option("output", fa.output, "FMTX feature matrix to write")->required();
    features_cmd->add_flag("--json-summary", fa.json_summary, "Print frame count and feature statistics");

    SynthArgs sa;
    auto* synth_cmd = app.add_subcommand("synth", "Synthesize a WAV file from a feature matrix");
    synth_cmd->add_option("features", sa.features, "FMTX feature matrix")->required();
    synth_cmd->add_option("model", sa.model, "LPNW model file")->required();
    synth_cmd->add_option("output", sa.output, "WAV file to write")->required();
    synth_cmd->add_option("--seed", sa.seed, "Sampling seed (default 0)");
    synth_cmd->add_option("--noise-scale", sa.noise_scale, "Laplace scale of excitation noise (default 0)");

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Measure synthesis speed on random features");
    bench_cmd->add_option("model", ba.model, "LPNW model file")->required();
    bench_cmd->add_option("--seconds", ba.seconds, "Seconds of audio per stream (default 1)");
    bench_cmd->add_option("--streams", ba.streams, "Independent streams, one thread each (default 1)");
    bench_cmd->add_option("--seed", ba.seed, "Seed for features and sampling (default 0)");
    bench_cmd->add_flag("--json", ba.json, "Machine-readable report");

    ModelInfoArgs ia;
    auto* info_cmd = app.add_subcommand("model-info", "Print model shapes, densities and complexity");
    info_cmd->add_option("model", ia.model, "LPNW model file")->required();
    info_cmd->add_flag("--json", ia.json, "Machine-readable report");

    MakeModelArgs ma;
    auto* make_cmd = app.add_subcommand("make-test-model", "Write a deterministic random model");
    make_cmd->add_option("output", ma.output, "LPNW file to write")->required();
    make_cmd->add_option("--seed", ma.seed, "Seed (default 0)");
    make_cmd->add_option("--config", ma.config, "reference or tiny (default reference)");
    make_cmd->add_option("--units", ma.units, "Override GRU_A units");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kFormatFailure;
    }

    if (*features_cmd) return cmd_features(fa, out, err);
    if (*synth_cmd) return cmd_synth(sa, out, err);
    if (*bench_cmd) return cmd_bench(ba, out, err);
    if (*info_cmd) return cmd_model_info(ia, out, err);
    if (*make_cmd) return cmd_make_test_model(ma, out, err);
    return kFormatFailure;
}

} // namespace vocoder::cli
