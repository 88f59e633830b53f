#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;
using namespace vocoder;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "vocoder");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(int(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("vocoder_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    std::string write_dump(const std::string& name, std::size_t frames, std::uint64_t seed = 80) {
        const auto f = testkit::frames_from_signal(testkit::speech_like(frames * kFrameSize + 1, seed));
        features::write_feature_dump(std::span(f).first(frames), path(name));
        return path(name);
    }

    std::string make_model(const std::string& name, const std::string& config = "tiny", int seed = 1) {
        const auto r = run({"make-test-model", path(name), "--config", config, "--seed", std::to_string(seed)});
        EXPECT_EQ(r.code, 0) << r.err;
        return path(name);
    }

    fs::path dir_;
};

// ------------------------------------------------------------------ features

TEST_F(Cli, FeaturesWritesFrameBy54Matrix) {
    const auto dump = write_dump("in.opnv", 100);
    const auto r = run({"features", dump, path("out.fmtx"), "--json-summary"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = io::read_fmtx(path("out.fmtx"));
    EXPECT_EQ(m.rows, 100u);
    EXPECT_EQ(m.cols, 54u);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["frames"], 100);
    EXPECT_EQ(j["columns"], 54);
    EXPECT_EQ(j["mean"].size(), 54u);
    EXPECT_EQ(j["variance"].size(), 54u);
}

TEST_F(Cli, FeaturesMatrixMatchesLibrary) {
    const auto dump = write_dump("in.opnv", 12);
    ASSERT_EQ(run({"features", dump, path("out.fmtx")}).code, 0);
    const auto m = io::read_fmtx(path("out.fmtx"));
    const auto ex = features::extract_features(features::load_feature_dump(dump));
    for (std::size_t r = 0; r < m.rows; ++r) {
        const auto flat = ex[r].conditioning.flatten();
        for (std::size_t c = 0; c < 38; ++c) EXPECT_EQ(m.row(r)[c], float(flat[c]));
        for (std::size_t c = 0; c < 16; ++c) EXPECT_EQ(m.row(r)[38 + c], float(ex[r].lpc.lpc.a[c]));
    }
}

TEST_F(Cli, FeaturesZeroFrames) {
    const auto dump = write_dump("in.opnv", 0);
    ASSERT_EQ(run({"features", dump, path("out.fmtx")}).code, 0);
    const auto m = io::read_fmtx(path("out.fmtx"));
    EXPECT_EQ(m.rows, 0u);
    EXPECT_EQ(m.cols, 54u);
}

TEST_F(Cli, FeaturesCorruptMagic) {
    const auto dump = write_dump("in.opnv", 3);
    auto bytes = io::read_file(dump);
    bytes[1] = 'X';
    io::write_file_atomic(dump, bytes);
    const auto r = run({"features", dump, path("out.fmtx")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("OPNV"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(path("out.fmtx")));
}

TEST_F(Cli, FeaturesTruncatedReportsOffset) {
    const auto dump = write_dump("in.opnv", 3);
    auto bytes = io::read_file(dump);
    bytes.resize(bytes.size() - 5);
    io::write_file_atomic(dump, bytes);
    const auto r = run({"features", dump, path("out.fmtx")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("offset"), std::string::npos) << r.err;
}

TEST_F(Cli, FeaturesMissingInputIsIoFailure) {
    EXPECT_EQ(run({"features", path("nope.opnv"), path("out.fmtx")}).code, 1);
}

// ------------------------------------------------------------------ synth

TEST_F(Cli, SynthOneSecondDeterministic) {
    const auto dump = write_dump("in.opnv", 100);
    const auto model = make_model("m.lpnw");
    ASSERT_EQ(run({"features", dump, path("f.fmtx")}).code, 0);
    auto r = run({"synth", path("f.fmtx"), model, path("a.wav"), "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    r = run({"synth", path("f.fmtx"), model, path("b.wav"), "--seed", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto a = io::read_wav(path("a.wav"));
    EXPECT_EQ(a.size(), 16000u);
    EXPECT_EQ(io::read_file(path("a.wav")), io::read_file(path("b.wav")));
    ASSERT_EQ(run({"synth", path("f.fmtx"), model, path("c.wav"), "--seed", "4"}).code, 0);
    EXPECT_NE(io::read_file(path("a.wav")), io::read_file(path("c.wav")));
}

TEST_F(Cli, SynthWithNoise) {
    const auto dump = write_dump("in.opnv", 5);
    const auto model = make_model("m.lpnw");
    ASSERT_EQ(run({"features", dump, path("f.fmtx")}).code, 0);
    const auto r = run({"synth", path("f.fmtx"), model, path("a.wav"), "--noise-scale", "1.5"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(io::read_wav(path("a.wav")).size(), 800u);
    EXPECT_EQ(run({"synth", path("f.fmtx"), model, path("b.wav"), "--noise-scale", "-1"}).code, 2);
}

TEST_F(Cli, SynthMissingModelWritesNothing) {
    const auto dump = write_dump("in.opnv", 5);
    ASSERT_EQ(run({"features", dump, path("f.fmtx")}).code, 0);
    const auto r = run({"synth", path("f.fmtx"), path("missing.lpnw"), path("a.wav")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("model"), std::string::npos);
    EXPECT_FALSE(fs::exists(path("a.wav")));
}

TEST_F(Cli, SynthCorruptModelIsModelFailure) {
    const auto dump = write_dump("in.opnv", 2);
    const auto model = make_model("m.lpnw");
    auto bytes = io::read_file(model);
    bytes[200] ^= 0xff;
    io::write_file_atomic(model, bytes);
    ASSERT_EQ(run({"features", dump, path("f.fmtx")}).code, 0);
    const auto r = run({"synth", path("f.fmtx"), model, path("a.wav")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.err.find("checksum"), std::string::npos) << r.err;
}

TEST_F(Cli, SynthRejectsWrongWidthMatrix) {
    io::FeatureMatrix m{2, 10, std::vector<float>(20, 0.0f)};
    io::write_fmtx(path("bad.fmtx"), m);
    const auto model = make_model("m.lpnw");
    const auto r = run({"synth", path("bad.fmtx"), model, path("a.wav")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("54"), std::string::npos) << r.err;
}

// ------------------------------------------------------------------ bench

TEST_F(Cli, BenchReportsComplexityAndSpeed) {
    const auto model = make_model("ref.lpnw", "reference");
    const auto r = run({"bench", model, "--seconds", "0.1", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_GE(j["analytic_gflops"].get<double>(), 2.3);
    EXPECT_LE(j["analytic_gflops"].get<double>(), 3.5);
    EXPECT_GT(j["real_time_factor"].get<double>(), 0.0);
    EXPECT_NEAR(j["synthesized_seconds"].get<double>(), 0.1, 1e-12);
}

TEST_F(Cli, BenchZeroSecondsAndStreams) {
    const auto model = make_model("m.lpnw");
    auto r = run({"bench", model, "--seconds", "0"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("real-time factor"), std::string::npos);
    r = run({"bench", model, "--seconds", "0.05", "--streams", "2", "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["streams"], 2);
    EXPECT_EQ(run({"bench", model, "--streams", "0"}).code, 2);
    EXPECT_EQ(run({"bench", path("missing.lpnw")}).code, 3);
}

// ------------------------------------------------------------------ model-info

TEST_F(Cli, ModelInfoReference) {
    const auto model = make_model("ref.lpnw", "reference");
    auto r = run({"model-info", model, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["densities"]["w_h"].get<double>(), 0.2, 1e-3);
    EXPECT_NEAR(j["densities"]["w_u"].get<double>(), 0.05, 1e-3);
    EXPECT_NEAR(j["densities"]["w_r"].get<double>(), 0.05, 1e-3);
    EXPECT_NEAR(j["equivalent_units"]["value"].get<double>(), 123.0, 0.1);
    EXPECT_NE(j["equivalent_units"]["note"].get<std::string>().find("122"), std::string::npos);
    EXPECT_NEAR(j["weights"]["sample_rate_total"].get<double>(), 72000.0, 3600.0);
    EXPECT_EQ(j["layers"]["gru_a_w_h"], nlohmann::json::array({384, 384}));

    r = run({"model-info", model});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("equivalent units:    123.0"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("122"), std::string::npos);
}

TEST_F(Cli, ModelInfoTamperedFile) {
    const auto model = make_model("m.lpnw");
    auto bytes = io::read_file(model);
    bytes[bytes.size() / 2] ^= 0x01;
    io::write_file_atomic(model, bytes);
    const auto r = run({"model-info", model});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("checksum"), std::string::npos);
    EXPECT_EQ(run({"model-info", path("missing.lpnw")}).code, 1);
}

// ------------------------------------------------------------------ make-test-model

TEST_F(Cli, MakeTestModelDeterministic) {
    const auto a = run({"make-test-model", path("a.lpnw"), "--seed", "7", "--config", "tiny"});
    const auto b = run({"make-test-model", path("b.lpnw"), "--seed", "7", "--config", "tiny"});
    const auto c = run({"make-test-model", path("c.lpnw"), "--seed", "8", "--config", "tiny"});
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(a.out, c.out);
    EXPECT_EQ(io::read_file(path("a.lpnw")), io::read_file(path("b.lpnw")));
}

TEST_F(Cli, MakeTestModelRejectsBadConfig) {
    EXPECT_EQ(run({"make-test-model", path("a.lpnw"), "--units", "0"}).code, 2);
    EXPECT_EQ(run({"make-test-model", path("a.lpnw"), "--units", "40"}).code, 2);
    EXPECT_EQ(run({"make-test-model", path("a.lpnw"), "--config", "huge"}).code, 2);
    EXPECT_FALSE(fs::exists(path("a.lpnw")));
    const auto r = run({"make-test-model", path("u.lpnw"), "--config", "tiny", "--units", "48"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nnet::load_model(path("u.lpnw"))->config().units, 48u);
}

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"features"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

// ------------------------------------------------------------------ WAV

TEST(Wav, RoundTripAndHeader) {
    const AudioBuffer a(std::vector<float>{0.0f, 0.5f, -0.5f, -1.0f, 32767.0f / 32768.0f});
    const auto bytes = io::encode_wav(a);
    EXPECT_EQ(bytes.size(), 44u + 10u);
    EXPECT_EQ(io::decode_wav(bytes), a);
    EXPECT_EQ(io::to_pcm16(2.0f), 32767);
    EXPECT_EQ(io::to_pcm16(-2.0f), -32768);
}

std::string decode_error(std::vector<std::uint8_t> bytes) {
    try {
        io::decode_wav(bytes);
    } catch (const FormatError& e) {
        return e.what();
    }
    return {};
}

TEST(Wav, RejectsOtherFormatsNamingField) {
    const auto good = io::encode_wav(AudioBuffer(std::vector<float>(10, 0.1f)));
    auto stereo = good;
    stereo[22] = 2;
    EXPECT_NE(decode_error(stereo).find("num_channels"), std::string::npos);
    auto rate = good;
    rate[24] = 0x44;  // 44100 low byte
    rate[25] = 0xac;
    EXPECT_NE(decode_error(rate).find("sample_rate"), std::string::npos);
    auto bits = good;
    bits[34] = 8;
    EXPECT_NE(decode_error(bits).find("bits_per_sample"), std::string::npos);
    auto fmt = good;
    fmt[20] = 3;  // IEEE float
    EXPECT_NE(decode_error(fmt).find("audio_format"), std::string::npos);
    auto riff = good;
    riff[0] = 'X';
    EXPECT_NE(decode_error(riff).find("RIFF"), std::string::npos);
    auto nodata = std::vector<std::uint8_t>(good.begin(), good.begin() + 36);
    EXPECT_NE(decode_error(nodata).find("data"), std::string::npos);
}

TEST(Wav, SkipsUnknownChunks) {
    auto bytes = io::encode_wav(AudioBuffer(std::vector<float>{0.25f}));
    const std::vector<std::uint8_t> list{'L', 'I', 'S', 'T', 3, 0, 0, 0, 1, 2, 3, 0};
    bytes.insert(bytes.begin() + 36, list.begin(), list.end());
    EXPECT_EQ(io::decode_wav(bytes).samples()[0], 0.25f);
}

} // namespace
