#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ctxsal/config.hpp"
#include "ctxsal/io.hpp"
#include "ctxsal/manifest.hpp"
#include "ctxsal/rng.hpp"
#include "ctxsal/synth.hpp"
#include "test_support.hpp"

#include <cstring>
#include <fstream>
#include <numbers>

using namespace ctxsal;
using namespace testing_support;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no ctxsal::Error thrown");
  return ErrorCode::Io;
}

void write_json(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("mask helpers") {
  auto a = rect_mask(10, 8, 1, 1, 4, 3);
  auto b = rect_mask(10, 8, 3, 2, 4, 4);
  CHECK(mask_area(a) == 12);
  CHECK(intersection_area(a, b) == 4);
  CHECK(a.in_bounds(9, 7));
  CHECK_FALSE(a.in_bounds(10, 0));
  CHECK(code_of([&] { intersection_area(a, BinaryMask(9, 8)); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("feature field layout is planar") {
  FeatureFieldd f(3, 2, 2);
  f(1, 2, 1) = 5.0;
  CHECK(f.planes()(1, 5) == 5.0);
  CHECK(f.pixel(2, 1)(1) == 5.0);
  CHECK_THROWS_AS(FeatureFieldd(3, 2, FeatureFieldd::Planes::Zero(2, 5)), Error);
}

TEST_CASE("rgb_features copies channels") {
  ImageBuffer img(4, 3, 3);
  img(2, 1, 0) = 0.25f;
  img(2, 1, 2) = 0.75f;
  const auto f = rgb_features(img);
  CHECK(f.channels() == 3);
  CHECK(f(0, 2, 1) == 0.25f);
  CHECK(f(2, 2, 1) == 0.75f);
}

TEST_CASE("image PNG round trip at 8 bits") {
  TempDir dir("img");
  ImageBuffer img(5, 4, 3);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x)
      for (int c = 0; c < 3; ++c) img(x, y, c) = static_cast<float>((x * 40 + y * 17 + c * 60) % 256) / 255.0f;
  write_image_png(dir / "a.png", img);
  const auto back = read_image(dir / "a.png");
  CHECK(back.width() == 5);
  CHECK(back.height() == 4);
  CHECK((back.data() - img.data()).abs().maxCoeff() < 1e-6);
  CHECK(read_image_size(dir / "a.png") == std::pair{5, 4});
}

TEST_CASE("binary PPM is read") {
  TempDir dir("ppm");
  {
    std::ofstream out(dir / "a.ppm", std::ios::binary);
    out << "P6\n# comment\n2 1\n255\n";
    const unsigned char px[] = {255, 0, 0, 0, 0, 255};
    out.write(reinterpret_cast<const char*>(px), sizeof px);
  }
  const auto img = read_image(dir / "a.ppm");
  CHECK(img.width() == 2);
  CHECK(img(0, 0, 0) == 1.0f);
  CHECK(img(1, 0, 2) == 1.0f);
  CHECK(img(1, 0, 0) == 0.0f);
}

TEST_CASE("mask PNG round trip and threshold at 128") {
  TempDir dir("mask");
  std::mt19937_64 rng(3);
  const auto m = random_noise_mask(rng, 17, 9, 0.4);
  write_mask_png(dir / "m.png", m);
  CHECK(read_mask_png(dir / "m.png") == m);

  GrayImage g{3, 1, {127, 128, 255}};
  write_gray_png(dir / "g.png", g);
  const auto t = read_mask_png(dir / "g.png");
  CHECK_FALSE(t(0, 0));
  CHECK(t(1, 0));
  CHECK(t(2, 0));
  CHECK(read_gray_png(dir / "g.png").pixels == g.pixels);
}

TEST_CASE("missing image reports MissingFile") {
  CHECK(code_of([] { read_image("/nonexistent/x.png"); }) == ErrorCode::MissingFile);
}

TEST_CASE("tensor header bytes and round trip") {
  FeatureFieldf f(3, 2, 2);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < 6; ++i) f.planes()(c, i) = static_cast<float>(c * 10 + i) + 0.5f;
  const auto bytes = encode_tensor(f);
  REQUIRE(bytes.size() == 20 + 12 * 4);
  CHECK(std::memcmp(bytes.data(), "CSFT", 4) == 0);
  const std::uint8_t header[] = {1, 0, 0, 0, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0};
  CHECK(std::memcmp(bytes.data() + 4, header, sizeof header) == 0);
  // First payload value 0.5f = 0x3f000000, little-endian.
  CHECK(bytes[20] == 0x00);
  CHECK(bytes[23] == 0x3f);
  const auto back = decode_tensor(bytes);
  CHECK(back.planes() == f.planes());
  CHECK(encode_tensor(back) == bytes);

  TempDir dir("tensor");
  write_tensor(dir / "t.csft", f);
  CHECK(read_file_bytes(dir / "t.csft") == bytes);
  CHECK(read_tensor(dir / "t.csft").planes() == f.planes());
}

TEST_CASE("corrupt tensors are rejected") {
  FeatureFieldf f(2, 2, 1);
  auto bytes = encode_tensor(f);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_tensor(truncated), Error);
  auto bad_version = bytes;
  bad_version[4] = 9;
  CHECK_THROWS_AS(decode_tensor(bad_version), Error);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_tensor(bad_magic), Error);
  f(0, 1, 1) = std::numeric_limits<float>::quiet_NaN();
  CHECK(code_of([&] { decode_tensor(encode_tensor(f)); }) == ErrorCode::NonFiniteInput);
}

TEST_CASE("manifest round trip with relative paths") {
  TempDir dir("manifest");
  fs::create_directories(dir / "images");
  write_image_png(dir / "images/a.png", ImageBuffer(6, 4, 3));
  write_mask_png(dir / "images/a_gt.png", BinaryMask(6, 4));
  write_json(dir / "m.json",
             R"({"images":[{"id":"a","image_path":"images/a.png","gt_path":"images/a_gt.png"}]})");
  const auto m = load_manifest(dir / "m.json");
  REQUIRE(m.size() == 1);
  CHECK(m.entries[0].width == 6);
  CHECK(m.entries[0].height == 4);
  CHECK(m.entries[0].builtin_proposals());
  CHECK(m.entries[0].rgb_features());
  save_manifest(dir / "m2.json", m);
  const auto again = load_manifest(dir / "m2.json");
  CHECK(fs::equivalent(again.entries[0].image_path, m.entries[0].image_path));
  std::ifstream in(dir / "m2.json");
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text.find("\"images/a.png\"") != std::string::npos);
}

TEST_CASE("manifest errors name the entry") {
  TempDir dir("manifest_err");
  write_image_png(dir / "a.png", ImageBuffer(6, 4, 3));
  write_mask_png(dir / "gt.png", BinaryMask(5, 4));
  write_json(dir / "missing.json", R"({"images":[{"id":"zz","image_path":"nope.png"}]})");
  try {
    load_manifest(dir / "missing.json");
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingFile);
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }
  write_json(dir / "dims.json", R"({"images":[{"id":"a","image_path":"a.png","gt_path":"gt.png"}]})");
  CHECK(code_of([&] { load_manifest(dir / "dims.json"); }) == ErrorCode::DimensionMismatch);
  write_json(dir / "dup.json",
             R"({"images":[{"id":"a","image_path":"a.png"},{"id":"a","image_path":"a.png"}]})");
  CHECK(code_of([&] { load_manifest(dir / "dup.json"); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([&] { load_manifest(dir / "absent.json"); }) == ErrorCode::MissingFile);
}

TEST_CASE("default configuration carries the published hyperparameters") {
  const RunConfig cfg;
  const auto j = to_json(cfg);
  CHECK(j.at("lambda").get<double>() == 40.0);
  CHECK(j.at("trees").get<int>() == 200);
  CHECK(j.at("min_area").get<int>() == 4500);
  CHECK(j.at("max_proposals").get<int>() == 256);
  CHECK(j.at("beta2").get<double>() == 0.3);
  const auto phis = j.at("orientations").get<std::vector<double>>();
  REQUIRE(phis.size() == 4);
  CHECK(phis[1] == std::numbers::pi / 4);
}

TEST_CASE("config merge and validation") {
  RunConfig cfg;
  merge_json(cfg, nlohmann::json{{"lambda", 10.0}, {"fusion", "max"}});
  CHECK(cfg.lambda == 10.0);
  CHECK(cfg.fusion == FusionMode::Max);
  CHECK_THROWS_AS(merge_json(cfg, nlohmann::json{{"lamda", 1.0}}), Error);
  RunConfig bad;
  bad.lambda = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  RunConfig round;
  merge_json(round, to_json(cfg));
  CHECK(to_json(round) == to_json(cfg));
  CHECK(cfg.forest_config(0).seed != cfg.forest_config(1).seed);
}

TEST_CASE("counter rng is reproducible and stream-separated") {
  CounterRng a(5, 0);
  CounterRng b(5, 0);
  CounterRng c(5, 1);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    CHECK(va == b.next());
    same += va == c.next();
  }
  CHECK(same == 0);
  CounterRng r(1, 2);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) ++hist[r.below(7)];
  for (const int h : hist) CHECK(h > 800);
}

TEST_CASE("synthetic images are deterministic with non-empty ground truth") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto a = synthesize_image(42, i);
    const auto b = synthesize_image(42, i);
    CHECK(a.image.data().isApprox(b.image.data(), 0.0f));
    CHECK(a.ground_truth == b.ground_truth);
    CHECK(mask_area(a.ground_truth) > 0);
    CHECK(a.image.data().minCoeff() >= 0.0f);
    CHECK(a.image.data().maxCoeff() <= 1.0f);
  }
}
