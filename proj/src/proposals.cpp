#include "ctxsal/proposals.hpp"

#include "ctxsal/context_features.hpp"
#include "ctxsal/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string_view>
#include <unordered_map>

namespace ctxsal {

std::vector<BinaryMask> filter_proposals(std::vector<BinaryMask> masks, std::int64_t min_area, int max_count) {
  std::vector<BinaryMask> kept;
  for (auto& m : masks) {
    if (static_cast<int>(kept.size()) >= max_count) break;
    if (mask_area(m) >= min_area) kept.push_back(std::move(m));
  }
  return kept;
}

ProposalSet load_proposals(const fs::path& dir, std::int64_t min_area, int max_count,
                           std::optional<std::pair<int, int>> expected_size) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::MissingDirectory, dir.string());
  std::vector<std::pair<std::uint64_t, fs::path>> files;
  for (const auto& item : fs::directory_iterator(dir)) {
    if (!item.is_regular_file() || item.path().extension() != ".png") continue;
    const auto stem = item.path().stem().string();
    std::uint64_t k = 0;
    const auto [end, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), k);
    if (ec != std::errc() || end != stem.data() + stem.size() || stem.empty()) continue;
    files.emplace_back(k, item.path());
  }
  std::sort(files.begin(), files.end());

  ProposalSet set;
  set.image_id = dir.filename().string();
  set.source = ProposalSource::External;
  std::vector<BinaryMask> masks;
  for (const auto& [k, path] : files) {
    auto mask = read_mask_png(path);
    if (!expected_size) expected_size = std::pair{mask.width(), mask.height()};
    if (mask.width() != expected_size->first || mask.height() != expected_size->second) {
      throw Error(ErrorCode::DimensionMismatch, path.string() + " is " + std::to_string(mask.width()) + "x" +
                                                    std::to_string(mask.height()) + ", expected " +
                                                    std::to_string(expected_size->first) + "x" +
                                                    std::to_string(expected_size->second));
    }
    masks.push_back(std::move(mask));
  }
  set.masks = filter_proposals(std::move(masks), min_area, max_count);
  return set;
}

void save_proposals(const fs::path& dir, const std::vector<BinaryMask>& masks) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  for (std::size_t k = 0; k < masks.size(); ++k) {
    write_mask_png(dir / (std::to_string(k) + ".png"), masks[k]);
  }
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::int32_t find(std::int32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  std::int32_t join(std::int32_t a, std::int32_t b) {
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

  std::int32_t size(std::int32_t root) const { return size_[root]; }

 private:
  std::vector<std::int32_t> parent_;
  std::vector<std::int32_t> size_;
};

struct Edge {
  float weight;
  std::int32_t a;
  std::int32_t b;
};

std::string_view mask_bytes(const BinaryMask& m) {
  return {reinterpret_cast<const char*>(m.data()), static_cast<std::size_t>(m.pixel_count())};
}

}  // namespace

std::vector<std::int32_t> segment_graph(const FeatureFieldf& image, double k, int min_size, int& count) {
  const int w = image.width();
  const int h = image.height();
  const auto n = static_cast<std::size_t>(w) * h;
  const float* data = image.planes().data();
  const auto stride = static_cast<std::size_t>(image.planes().cols());
  auto weight = [&](std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (int c = 0; c < image.channels(); ++c) {
      const double d = 255.0 * (static_cast<double>(data[c * stride + a]) - data[c * stride + b]);
      acc += d * d;
    }
    return static_cast<float>(std::sqrt(acc));
  };

  std::vector<Edge> edges;
  edges.reserve(2 * n);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) edges.push_back({weight(i, i + 1), static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + 1)});
      if (y + 1 < h) edges.push_back({weight(i, i + w), static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + w)});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const Edge& l, const Edge& r) {
    if (l.weight != r.weight) return l.weight < r.weight;
    if (l.a != r.a) return l.a < r.a;
    return l.b < r.b;
  });

  DisjointSets sets(n);
  std::vector<double> threshold(n, k);
  for (const auto& e : edges) {
    auto a = sets.find(e.a);
    auto b = sets.find(e.b);
    if (a == b) continue;
    if (e.weight <= threshold[a] && e.weight <= threshold[b]) {
      const auto root = sets.join(a, b);
      threshold[root] = e.weight + k / sets.size(root);
    }
  }
  for (const auto& e : edges) {
    const auto a = sets.find(e.a);
    const auto b = sets.find(e.b);
    if (a != b && (sets.size(a) < min_size || sets.size(b) < min_size)) sets.join(a, b);
  }

  std::vector<std::int32_t> labels(n);
  std::unordered_map<std::int32_t, std::int32_t> relabel;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = sets.find(static_cast<std::int32_t>(i));
    const auto [it, inserted] = relabel.emplace(root, static_cast<std::int32_t>(relabel.size()));
    labels[i] = it->second;
  }
  count = static_cast<int>(relabel.size());
  return labels;
}

ProposalSet generate_builtin(const ImageBuffer& image, const BuiltinParams& params) {
  if (image.empty()) throw Error(ErrorCode::InvalidArgument, "cannot generate proposals for an empty image");
  const auto smoothed = smooth_field(rgb_features(image), params.smoothing_sigma);
  const int w = image.width();
  const int h = image.height();
  const auto n = static_cast<std::size_t>(w) * h;

  struct Scale {
    std::vector<std::int32_t> labels;
    int count = 0;
  };
  struct Pair {
    double distance;
    std::size_t scale;
    std::int32_t a;
    std::int32_t b;
  };
  std::vector<Scale> scales;
  std::vector<Pair> pairs;
  for (const double k : params.k_scales) {
    Scale s;
    s.labels = segment_graph(smoothed, k, params.min_segment_size, s.count);

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(smoothed.channels(), s.count);
    Eigen::VectorXd sizes = Eigen::VectorXd::Zero(s.count);
    for (std::size_t i = 0; i < n; ++i) {
      sums.col(s.labels[i]) += smoothed.planes().col(static_cast<Eigen::Index>(i)).cast<double>();
      sizes(s.labels[i]) += 1.0;
    }
    const Eigen::MatrixXd means = sums.array().rowwise() / sizes.transpose().array();

    std::vector<std::pair<std::int32_t, std::int32_t>> adjacent;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto i = static_cast<std::size_t>(y) * w + x;
        const auto l = s.labels[i];
        if (x + 1 < w && s.labels[i + 1] != l) adjacent.emplace_back(std::min(l, s.labels[i + 1]), std::max(l, s.labels[i + 1]));
        if (y + 1 < h && s.labels[i + w] != l) adjacent.emplace_back(std::min(l, s.labels[i + w]), std::max(l, s.labels[i + w]));
      }
    }
    std::sort(adjacent.begin(), adjacent.end());
    adjacent.erase(std::unique(adjacent.begin(), adjacent.end()), adjacent.end());
    for (const auto& [a, b] : adjacent) {
      pairs.push_back({(means.col(a) - means.col(b)).norm(), scales.size(), a, b});
    }
    scales.push_back(std::move(s));
  }

  // Seeded shuffle fixes the order among equally similar pairs.
  CounterRng rng(params.seed, 0);
  for (std::size_t i = pairs.size(); i > 1; --i) {
    std::swap(pairs[i - 1], pairs[rng.below(i)]);
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& l, const Pair& r) { return l.distance < r.distance; });

  ProposalSet set;
  set.source = ProposalSource::Builtin;
  std::unordered_multimap<std::size_t, std::size_t> seen;
  auto emit = [&](BinaryMask mask) {
    if (static_cast<int>(set.masks.size()) >= params.max_count) return;
    if (mask_area(mask) < params.min_area) return;
    const auto key = std::hash<std::string_view>{}(mask_bytes(mask));
    const auto [first, last] = seen.equal_range(key);
    for (auto it = first; it != last; ++it) {
      if (set.masks[it->second] == mask) return;
    }
    seen.emplace(key, set.masks.size());
    set.masks.push_back(std::move(mask));
  };
  auto segment_mask = [&](const Scale& s, std::int32_t a, std::int32_t b) {
    BinaryMask mask(w, h);
    bool* bits = mask.data();
    for (std::size_t i = 0; i < n; ++i) bits[i] = s.labels[i] == a || s.labels[i] == b;
    return mask;
  };

  for (const auto& s : scales) {
    for (std::int32_t label = 0; label < s.count; ++label) emit(segment_mask(s, label, label));
  }
  for (const auto& p : pairs) {
    if (static_cast<int>(set.masks.size()) >= params.max_count) break;
    emit(segment_mask(scales[p.scale], p.a, p.b));
  }
  return set;
}

}  // namespace ctxsal
