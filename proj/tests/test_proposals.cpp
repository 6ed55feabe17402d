#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ctxsal/proposals.hpp"
#include "ctxsal/synth.hpp"
#include "test_support.hpp"

#include <deque>

using namespace ctxsal;
using namespace testing_support;

namespace {

bool four_connected(const BinaryMask& m) {
  const auto area = count_set(m);
  if (area == 0) return false;
  BinaryMask seen(m.width(), m.height());
  std::deque<Pixel> queue;
  for (int y = 0; y < m.height() && queue.empty(); ++y)
    for (int x = 0; x < m.width() && queue.empty(); ++x)
      if (m(x, y)) {
        queue.push_back({x, y});
        seen(x, y) = true;
      }
  std::int64_t reached = 0;
  while (!queue.empty()) {
    const auto p = queue.front();
    queue.pop_front();
    ++reached;
    const int dx[] = {1, -1, 0, 0};
    const int dy[] = {0, 0, 1, -1};
    for (int k = 0; k < 4; ++k) {
      const int x = p.x + dx[k];
      const int y = p.y + dy[k];
      if (m.in_bounds(x, y) && m(x, y) && !seen(x, y)) {
        seen(x, y) = true;
        queue.push_back({x, y});
      }
    }
  }
  return reached == area;
}

double jaccard(const BinaryMask& a, const BinaryMask& b) {
  const auto inter = intersection_area(a, b);
  return static_cast<double>(inter) / static_cast<double>(mask_area(a) + mask_area(b) - inter);
}

ImageBuffer square_image(int w, int h, int x0, int y0, int side) {
  ImageBuffer img(w, h, 3);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool in = x >= x0 && x < x0 + side && y >= y0 && y < y0 + side;
      img(x, y, 0) = in ? 0.9f : 0.2f;
      img(x, y, 1) = in ? 0.1f : 0.3f;
      img(x, y, 2) = in ? 0.2f : 0.6f;
    }
  return img;
}

}  // namespace

TEST_CASE("filter keeps order, drops small masks, then truncates") {
  std::vector<BinaryMask> masks;
  for (int k = 0; k < 10; ++k) masks.push_back(rect_mask(20, 20, 0, 0, k + 1, 1));
  const auto kept = filter_proposals(masks, 4, 3);
  REQUIRE(kept.size() == 3);
  CHECK(mask_area(kept[0]) == 4);
  CHECK(mask_area(kept[1]) == 5);
  CHECK(mask_area(kept[2]) == 6);
  CHECK(filter_proposals(masks, 100, 5).empty());
}

TEST_CASE("at most the first 256 surviving proposals are kept") {
  std::vector<BinaryMask> masks;
  for (int k = 0; k < 300; ++k) masks.push_back(rect_mask(8, 8, k % 8, 0, 1, 1 + k % 4));
  const auto kept = filter_proposals(masks, 1, kDefaultMaxProposals);
  REQUIRE(kept.size() == 256);
  for (int k = 0; k < 256; ++k) CHECK(kept[k] == masks[k]);
}

TEST_CASE("proposal directories load in numeric order") {
  TempDir dir("props");
  std::vector<BinaryMask> masks;
  for (int k = 0; k < 12; ++k) masks.push_back(rect_mask(16, 16, 0, 0, k + 1, 16));
  save_proposals(dir.path(), masks);
  CHECK(fs::exists(dir / "11.png"));
  const auto set = load_proposals(dir.path(), 1, 100);
  REQUIRE(set.masks.size() == 12);
  // "10.png" sorts before "2.png" lexically; numeric order must win.
  for (int k = 0; k < 12; ++k) CHECK(set.masks[k] == masks[k]);
  CHECK(load_proposals(dir.path(), 16 * 5, 2).masks[0] == masks[4]);
}

TEST_CASE("proposal loading errors") {
  TempDir dir("props_err");
  CHECK(load_proposals(dir.path(), 1, 10).masks.empty());
  try {
    load_proposals(dir / "missing", 1, 10);
    FAIL("expected MissingDirectory");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingDirectory);
  }
  save_proposals(dir.path(), {rect_mask(10, 10, 0, 0, 5, 5)});
  try {
    load_proposals(dir.path(), 1, 10, std::pair{12, 10});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("segmentation labels form a partition") {
  const auto img = synthesize_image(3, 0);
  int count = 0;
  const auto labels = segment_graph(rgb_features(img.image), 300, 20, count);
  REQUIRE(labels.size() == static_cast<std::size_t>(img.image.width() * img.image.height()));
  CHECK(count >= 1);
  CHECK(*std::min_element(labels.begin(), labels.end()) == 0);
  CHECK(*std::max_element(labels.begin(), labels.end()) == count - 1);
  // Labels appear in raster order of first appearance.
  int next = 0;
  for (const auto l : labels) {
    if (l == next) ++next;
    CHECK(l < next);
  }
}

TEST_CASE("uniform image yields a single whole-image proposal") {
  ImageBuffer img(40, 30, 3);
  img.data().setConstant(0.4f);
  BuiltinParams p;
  p.min_area = 10;
  const auto set = generate_builtin(img, p);
  REQUIRE(set.masks.size() == 1);
  CHECK(mask_area(set.masks[0]) == 1200);
  CHECK(set.source == ProposalSource::Builtin);
}

TEST_CASE("a flat square on a flat background is recovered") {
  const auto img = square_image(96, 80, 30, 20, 40);
  const auto truth = rect_mask(96, 80, 30, 20, 40, 40);
  BuiltinParams p;
  p.min_area = 100;
  const auto set = generate_builtin(img, p);
  double best = 0;
  for (const auto& m : set.masks) best = std::max(best, jaccard(m, truth));
  CHECK(best >= 0.9);
}

TEST_CASE("builtin proposals are deterministic, connected, filtered and unique") {
  BuiltinParams p;
  p.min_area = 96;
  p.max_count = 64;
  p.seed = 5;
  for (std::uint64_t i = 0; i < 4; ++i) {
    const auto img = synthesize_image(11, i);
    const auto a = generate_builtin(img.image, p);
    const auto b = generate_builtin(img.image, p);
    REQUIRE(a.masks.size() == b.masks.size());
    CHECK(a.masks.size() <= 64);
    for (std::size_t k = 0; k < a.masks.size(); ++k) {
      CHECK(a.masks[k] == b.masks[k]);
      CHECK(mask_area(a.masks[k]) >= 96);
      CHECK(four_connected(a.masks[k]));
      for (std::size_t j = 0; j < k; ++j) CHECK_FALSE(a.masks[j] == a.masks[k]);
    }
  }
}
