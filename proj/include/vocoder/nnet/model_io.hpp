#pragma once

// LPNW model file, little-endian:
//
//   "LPNW" | u32 version (=1)
//   config: u32 units, gru_b_units, embed_dim, frame_hidden, feature_dim
//           f32 density_u, density_r, density_h, beta_slope, threshold
//           u32 flags (bit 0: frame-rate network adapted)
//   u32 section_count, then per section:
//     char[4] tag | u32 kind
//     kind 0 (dense):        u32 rows | u32 cols | rows*cols f32 (row-major)
//     kind 1 (block sparse): u32 rows | u32 cols | u32 blocks |
//                            blocks x { u32 row_start | u32 col | 16 f32 }
//   u64 FNV-1a checksum of every preceding byte

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "vocoder/error.hpp"
#include "vocoder/io/bytes.hpp"
#include "vocoder/io/file.hpp"
#include "vocoder/nnet/model.hpp"

namespace vocoder::nnet {

inline constexpr std::uint32_t kModelVersion = 1;

inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

namespace detail {

enum class SectionKind : std::uint32_t { kDense = 0, kBlockSparse = 1 };

inline void put_dense(io::ByteWriter& w, const char* tag, const DenseMatrix& m) {
    w.put_tag(tag);
    w.put_u32(std::uint32_t(SectionKind::kDense));
    w.put_u32(static_cast<std::uint32_t>(m.rows));
    w.put_u32(static_cast<std::uint32_t>(m.cols));
    w.put_f32s(m.data);
}

inline void put_vector(io::ByteWriter& w, const char* tag, const std::vector<float>& v) {
    w.put_tag(tag);
    w.put_u32(std::uint32_t(SectionKind::kDense));
    w.put_u32(1);
    w.put_u32(static_cast<std::uint32_t>(v.size()));
    w.put_f32s(v);
}

inline void put_sparse(io::ByteWriter& w, const char* tag, const BlockSparseMatrix& m) {
    w.put_tag(tag);
    w.put_u32(std::uint32_t(SectionKind::kBlockSparse));
    w.put_u32(static_cast<std::uint32_t>(m.rows()));
    w.put_u32(static_cast<std::uint32_t>(m.cols()));
    w.put_u32(static_cast<std::uint32_t>(m.block_count()));
    for (const auto& b : m.blocks()) {
        w.put_u32(b.row_start);
        w.put_u32(b.col);
        w.put_f32s(b.values);
    }
}

/// Section visitor shared by the writer and the reader so the tag list exists once.
template <class Layers, class Dense, class Vec, class Sparse>
void for_each_section(Layers& L, Dense&& dense, Vec&& vec, Sparse&& sparse) {
    dense("FC1W", L.frame.conv1.weights);
    vec("FC1B", L.frame.conv1.bias);
    dense("FC2W", L.frame.conv2.weights);
    vec("FC2B", L.frame.conv2.bias);
    dense("FD1W", L.frame.dense1.weights);
    vec("FD1B", L.frame.dense1.bias);
    dense("FD2W", L.frame.dense2.weights);
    vec("FD2B", L.frame.dense2.bias);
    dense("FGPW", L.frame.gate_proj.weights);
    vec("FGPB", L.frame.gate_proj.bias);
    dense("EMBD", L.sample.embedding);
    dense("GAIN", L.sample.input);
    vec("GABI", L.sample.bias);
    sparse("GAWU", L.sample.w_u);
    sparse("GAWR", L.sample.w_r);
    sparse("GAWH", L.sample.w_h);
    dense("GBIN", L.gru_b.input);
    dense("GBRC", L.gru_b.recurrent);
    vec("GBBI", L.gru_b.bias);
    dense("DFW1", L.dual_fc.w1);
    dense("DFW2", L.dual_fc.w2);
    vec("DFA1", L.dual_fc.a1);
    vec("DFA2", L.dual_fc.a2);
}

inline constexpr std::uint32_t kSectionCount = 23;

inline std::vector<std::uint8_t> serialize_unchecked(const ModelConfig& c, const ModelLayers& layers) {
    io::ByteWriter w;
    w.put_tag("LPNW");
    w.put_u32(kModelVersion);
    w.put_u32(c.units);
    w.put_u32(c.gru_b_units);
    w.put_u32(c.embed_dim);
    w.put_u32(c.frame_hidden);
    w.put_u32(c.feature_dim);
    w.put_f32(static_cast<float>(c.density_u));
    w.put_f32(static_cast<float>(c.density_r));
    w.put_f32(static_cast<float>(c.density_h));
    w.put_f32(static_cast<float>(c.sampling.beta_slope));
    w.put_f32(static_cast<float>(c.sampling.threshold));
    w.put_u32(c.frame_net_adapted ? 1u : 0u);
    w.put_u32(kSectionCount);
    for_each_section(
        layers, [&](const char* tag, const DenseMatrix& m) { put_dense(w, tag, m); },
        [&](const char* tag, const std::vector<float>& v) { put_vector(w, tag, v); },
        [&](const char* tag, const BlockSparseMatrix& m) { put_sparse(w, tag, m); });
    auto bytes = std::move(w).take();
    const auto sum = fnv1a64(bytes);
    for (std::size_t i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(sum >> (8 * i)));
    return bytes;
}

/// Config values go through float, as they do in the file.
inline ModelConfig canonical_config(ModelConfig c) {
    auto f = [](double v) { return double(static_cast<float>(v)); };
    c.density_u = f(c.density_u);
    c.density_r = f(c.density_r);
    c.density_h = f(c.density_h);
    c.sampling.beta_slope = f(c.sampling.beta_slope);
    c.sampling.threshold = f(c.sampling.threshold);
    return c;
}

inline std::uint64_t trailing_checksum(std::span<const std::uint8_t> bytes) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < 8; ++i) v |= std::uint64_t(bytes[bytes.size() - 8 + i]) << (8 * i);
    return v;
}

} // namespace detail

/// Builds an immutable model; the checksum is that of its serialized form.
inline ModelPtr make_model(const ModelConfig& config, ModelLayers layers) {
    const auto cfg = detail::canonical_config(config);
    const auto bytes = detail::serialize_unchecked(cfg, layers);
    return std::make_shared<const ModelWeights>(cfg, std::move(layers),
                                                detail::trailing_checksum(bytes));
}

inline std::vector<std::uint8_t> serialize_model(const ModelWeights& model) {
    return detail::serialize_unchecked(model.config(), model.layers());
}

inline ModelPtr parse_model(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 8 + 8) throw FormatError("model file too short", bytes.size());
    const auto body = bytes.first(bytes.size() - 8);
    const auto stored = detail::trailing_checksum(bytes);
    const auto actual = fnv1a64(body);

    io::ByteReader rd(body);
    rd.expect_tag("LPNW", "model header");
    const std::size_t version_at = rd.offset();
    const auto version = rd.get_u32("model version");
    if (version != kModelVersion) {
        throw FormatError("unsupported model version " + std::to_string(version), version_at);
    }
    if (stored != actual) {
        throw ChecksumError("model checksum mismatch: stored " + std::to_string(stored) +
                            ", computed " + std::to_string(actual));
    }

    ModelConfig c;
    c.units = rd.get_u32("units");
    c.gru_b_units = rd.get_u32("gru_b_units");
    c.embed_dim = rd.get_u32("embed_dim");
    c.frame_hidden = rd.get_u32("frame_hidden");
    c.feature_dim = rd.get_u32("feature_dim");
    c.density_u = rd.get_f32("density_u");
    c.density_r = rd.get_f32("density_r");
    c.density_h = rd.get_f32("density_h");
    c.sampling.beta_slope = rd.get_f32("beta_slope");
    c.sampling.threshold = rd.get_f32("threshold");
    const auto flags = rd.get_u32("flags");
    if (flags & ~1u) throw FormatError("unknown model flags", rd.offset() - 4);
    c.frame_net_adapted = (flags & 1u) != 0;
    const std::size_t config_end = rd.offset();
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw FormatError(e.what(), config_end);
    }

    const auto count = rd.get_u32("section count");
    struct Raw {
        detail::SectionKind kind;
        DenseMatrix dense;
        BlockSparseMatrix sparse;
        std::size_t offset;
    };
    std::map<std::string, Raw> sections;
    for (std::uint32_t s = 0; s < count; ++s) {
        const std::size_t at = rd.offset();
        auto tag = rd.get_tag(4, "section tag");
        const auto kind = rd.get_u32("section kind");
        const auto rows = rd.get_u32("section rows");
        const auto cols = rd.get_u32("section cols");
        Raw raw{detail::SectionKind(kind), {}, {}, at};
        if (kind == std::uint32_t(detail::SectionKind::kDense)) {
            const std::size_t n = std::size_t(rows) * cols;
            rd.require(n * 4, "dense section " + tag);
            raw.dense = DenseMatrix(rows, cols);
            for (auto& v : raw.dense.data) v = rd.get_f32("weight");
        } else if (kind == std::uint32_t(detail::SectionKind::kBlockSparse)) {
            const auto nblocks = rd.get_u32("block count");
            rd.require(std::size_t(nblocks) * (8 + 4 * kBlockRows), "sparse section " + tag);
            std::vector<SparseBlock> blocks(nblocks);
            for (auto& b : blocks) {
                b.row_start = rd.get_u32("block row");
                b.col = rd.get_u32("block col");
                for (auto& v : b.values) v = rd.get_f32("weight");
            }
            try {
                raw.sparse = BlockSparseMatrix::from_blocks(rows, cols, std::move(blocks));
            } catch (const InvalidArgument& e) {
                throw FormatError(std::string(e.what()) + " in section " + tag, at);
            }
        } else {
            throw FormatError("unknown section kind in " + tag, at + 4);
        }
        if (!sections.emplace(tag, std::move(raw)).second) {
            throw FormatError("duplicate section " + tag, at);
        }
    }
    if (rd.remaining() != 0) throw FormatError("trailing bytes after sections", rd.offset());

    ModelLayers layers;
    auto take = [&](const char* tag, detail::SectionKind kind) -> Raw& {
        auto it = sections.find(tag);
        if (it == sections.end()) throw FormatError(std::string("missing section ") + tag, rd.offset());
        if (it->second.kind != kind) throw FormatError(std::string("wrong kind for ") + tag, it->second.offset);
        return it->second;
    };
    detail::for_each_section(
        layers,
        [&](const char* tag, DenseMatrix& m) { m = std::move(take(tag, detail::SectionKind::kDense).dense); },
        [&](const char* tag, std::vector<float>& v) {
            auto& raw = take(tag, detail::SectionKind::kDense);
            if (raw.dense.rows != 1) throw FormatError(std::string("vector section ") + tag + " must have one row", raw.offset);
            v = std::move(raw.dense.data);
        },
        [&](const char* tag, BlockSparseMatrix& m) {
            m = std::move(take(tag, detail::SectionKind::kBlockSparse).sparse);
        });
    if (sections.size() != detail::kSectionCount) {
        throw FormatError("unexpected extra sections", rd.offset());
    }

    try {
        return std::make_shared<const ModelWeights>(c, std::move(layers), stored);
    } catch (const InvalidArgument& e) {
        throw FormatError(e.what(), rd.offset());
    }
}

inline ModelPtr load_model(const std::filesystem::path& path) {
    return parse_model(io::read_file(path));
}

/// Returns the number of bytes written.
inline std::size_t save_model(const ModelWeights& model, const std::filesystem::path& path) {
    const auto bytes = serialize_model(model);
    io::write_file_atomic(path, bytes);
    return bytes.size();
}

} // namespace vocoder::nnet
