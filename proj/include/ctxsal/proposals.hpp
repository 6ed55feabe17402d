#pragma once

#include "ctxsal/io.hpp"
#include "ctxsal/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ctxsal {

enum class ProposalSource { External, Builtin };

struct ProposalSet {
  std::string image_id;
  std::vector<BinaryMask> masks;
  ProposalSource source = ProposalSource::External;
};

inline constexpr std::int64_t kDefaultMinArea = 4500;
inline constexpr int kDefaultMaxProposals = 256;

/// Keeps masks with area >= min_area in their original order, then keeps the
/// first max_count of them.
std::vector<BinaryMask> filter_proposals(std::vector<BinaryMask> masks, std::int64_t min_area, int max_count);

/// Reads `<k>.png` masks from `dir` in ascending k, filters, truncates.
/// When `expected_size` is given every mask must match it.
ProposalSet load_proposals(const fs::path& dir, std::int64_t min_area, int max_count,
                           std::optional<std::pair<int, int>> expected_size = std::nullopt);

/// Writes masks as `<k>.png`, k = 0, 1, ...
void save_proposals(const fs::path& dir, const std::vector<BinaryMask>& masks);

struct BuiltinParams {
  std::vector<double> k_scales{100.0, 300.0, 900.0};
  std::int64_t min_area = kDefaultMinArea;
  int max_count = kDefaultMaxProposals;
  std::uint64_t seed = 0;
  double smoothing_sigma = 0.8;
  int min_segment_size = 20;
};

/// Graph-based segmentation on an N4 pixel graph: edges taken in ascending
/// weight (Euclidean colour distance on the 0..255 scale) merge two
/// components when the weight does not exceed either component's internal
/// difference plus k/|component|. Components smaller than `min_size` are then
/// absorbed along the cheapest remaining edges. Labels are 0..count-1 in
/// raster order of first appearance.
std::vector<std::int32_t> segment_graph(const FeatureFieldf& image, double k, int min_size, int& count);

/// Stand-in proposal generator: segments at each scale become proposals,
/// followed by unions of adjacent segment pairs (most similar first) until
/// `max_count` is reached. Duplicate masks are dropped.
ProposalSet generate_builtin(const ImageBuffer& image, const BuiltinParams& params);

}  // namespace ctxsal
