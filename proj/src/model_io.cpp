#include "ctxsal/forest.hpp"
#include "ctxsal/io.hpp"

#include "byte_stream.hpp"

#include <cstring>
#include <string>

// Model file layout (all integers little-endian):
//   "CSRF" u32 version u32 section_count
//   per section: u8 kind (0 object, 1 context) u64 payload_length payload
//   payload: config, u32 feature_dim, f64 label_min, f64 label_max,
//            u8 has_whitening [f64 mean[D], f64 std[D]],
//            u32 tree_count, per tree u32 node_count then nodes
//            (i32 feature, f64 threshold, i32 left, i32 right, f64 value).

namespace ctxsal {
namespace {

constexpr char kModelMagic[4] = {'C', 'S', 'R', 'F'};
constexpr std::uint8_t kObjectSection = 0;
constexpr std::uint8_t kContextSection = 1;

void encode_forest(detail::ByteWriter& out, const ForestModel& m) {
  out.u32(static_cast<std::uint32_t>(m.config.n_trees));
  out.u32(static_cast<std::uint32_t>(m.config.max_depth));
  out.u32(static_cast<std::uint32_t>(m.config.min_samples_leaf));
  out.u32(static_cast<std::uint32_t>(m.config.features_per_split));
  out.u8(m.config.bootstrap ? 1 : 0);
  out.u64(m.config.seed);
  out.u32(static_cast<std::uint32_t>(m.feature_dim));
  out.f64(m.label_min);
  out.f64(m.label_max);
  out.u8(m.whitening ? 1 : 0);
  if (m.whitening) {
    for (Eigen::Index i = 0; i < m.whitening->dim(); ++i) out.f64(m.whitening->mean(i));
    for (Eigen::Index i = 0; i < m.whitening->dim(); ++i) out.f64(m.whitening->std(i));
  }
  out.u32(static_cast<std::uint32_t>(m.trees.size()));
  for (const auto& tree : m.trees) {
    out.u32(static_cast<std::uint32_t>(tree.nodes.size()));
    for (const auto& n : tree.nodes) {
      out.i32(n.feature);
      out.f64(n.threshold);
      out.i32(n.left);
      out.i32(n.right);
      out.f64(n.value);
    }
  }
}

void corrupt(const std::string& why) { throw Error(ErrorCode::CorruptModel, why); }

ForestModel decode_forest(detail::ByteReader& in) {
  ForestModel m;
  m.config.n_trees = static_cast<int>(in.u32());
  m.config.max_depth = static_cast<int>(in.u32());
  m.config.min_samples_leaf = static_cast<int>(in.u32());
  m.config.features_per_split = static_cast<int>(in.u32());
  m.config.bootstrap = in.u8() != 0;
  m.config.seed = in.u64();
  m.feature_dim = static_cast<int>(in.u32());
  m.label_min = in.f64();
  m.label_max = in.f64();
  if (m.feature_dim <= 0) corrupt("feature dimension must be positive");
  if (in.u8() != 0) {
    WhiteningStats stats;
    in.need(static_cast<std::size_t>(m.feature_dim) * 16);
    stats.mean.resize(m.feature_dim);
    stats.std.resize(m.feature_dim);
    for (int i = 0; i < m.feature_dim; ++i) stats.mean(i) = in.f64();
    for (int i = 0; i < m.feature_dim; ++i) stats.std(i) = in.f64();
    m.whitening = std::move(stats);
  }
  const auto tree_count = in.u32();
  if (tree_count == 0) corrupt("forest has no trees");
  for (std::uint32_t t = 0; t < tree_count; ++t) {
    const auto node_count = in.u32();
    constexpr std::size_t kNodeBytes = 4 + 8 + 4 + 4 + 8;
    in.need(static_cast<std::size_t>(node_count) * kNodeBytes);
    if (node_count == 0) corrupt("empty tree");
    RegressionTree tree;
    tree.nodes.resize(node_count);
    for (auto& n : tree.nodes) {
      n.feature = in.i32();
      n.threshold = in.f64();
      n.left = in.i32();
      n.right = in.i32();
      n.value = in.f64();
    }
    // Children must point strictly forward so traversal always terminates.
    for (std::uint32_t i = 0; i < node_count; ++i) {
      const auto& n = tree.nodes[i];
      if (n.is_leaf()) continue;
      if (n.feature >= m.feature_dim) corrupt("split feature out of range");
      const auto self = static_cast<std::int32_t>(i);
      if (n.left <= self || n.right <= self || n.left >= static_cast<std::int32_t>(node_count) ||
          n.right >= static_cast<std::int32_t>(node_count)) {
        corrupt("child index out of range");
      }
    }
    m.trees.push_back(std::move(tree));
  }
  if (!in.at_end()) corrupt("trailing bytes in forest section");
  return m;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const SaliencyModel& model) {
  detail::ByteWriter out;
  out.raw(kModelMagic, 4);
  out.u32(kModelVersion);
  out.u32(2);
  const std::pair<std::uint8_t, const ForestModel*> sections[] = {{kObjectSection, &model.object},
                                                                  {kContextSection, &model.context}};
  for (const auto& [kind, forest] : sections) {
    detail::ByteWriter payload;
    encode_forest(payload, *forest);
    out.u8(kind);
    out.u64(payload.size());
    out.append(payload.bytes());
  }
  return std::move(out.bytes());
}

SaliencyModel decode_model(const std::vector<std::uint8_t>& bytes) {
  detail::ByteReader in(bytes.data(), bytes.size(), ErrorCode::CorruptModel);
  char magic[4];
  in.raw(magic, 4);
  if (std::memcmp(magic, kModelMagic, 4) != 0) corrupt("bad magic");
  const auto version = in.u32();
  if (version != kModelVersion) corrupt("unsupported model version " + std::to_string(version));
  const auto sections = in.u32();
  SaliencyModel model;
  bool have_object = false;
  bool have_context = false;
  for (std::uint32_t s = 0; s < sections; ++s) {
    const auto kind = in.u8();
    const auto length = in.u64();
    if (length > in.remaining()) corrupt("truncated section");
    auto body = in.sub(static_cast<std::size_t>(length));
    if (kind == kObjectSection) {
      model.object = decode_forest(body);
      have_object = true;
    } else if (kind == kContextSection) {
      model.context = decode_forest(body);
      have_context = true;
    } else {
      corrupt("unknown section kind " + std::to_string(kind));
    }
  }
  if (!have_object || !have_context) corrupt("model needs both object and context sections");
  if (!in.at_end()) corrupt("trailing bytes after sections");
  return model;
}

void save_model(const SaliencyModel& model, const std::filesystem::path& path) {
  write_file_bytes(path, encode_model(model));
}

SaliencyModel load_model(const std::filesystem::path& path) {
  try {
    return decode_model(read_file_bytes(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::CorruptModel) throw;
    throw Error(ErrorCode::CorruptModel, path.string() + ": " + e.what());
  }
}

}  // namespace ctxsal
