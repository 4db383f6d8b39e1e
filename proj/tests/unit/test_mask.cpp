#include <gtest/gtest.h>

#include <random>

#include "bloombench/error.hpp"
#include "bloombench/mask.hpp"
#include "bloombench/mask_io.hpp"
#include "test_support.hpp"

using namespace bloombench;
using namespace bloombench::testing;

namespace {

Mask from_rows(const std::vector<std::string>& rows) {
  Mask m(rows[0].size(), rows.size());
  for (std::size_t y = 0; y < rows.size(); ++y) {
    for (std::size_t x = 0; x < rows[y].size(); ++x) m.set(x, y, rows[y][x] == '#');
  }
  return m;
}

ErrorCode decode_error(const RleMask& rle) {
  try {
    decode_rle(rle);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorCode::IoError;
}

}  // namespace

TEST(Rle, EncodesRowMajorStartingWithFalseRun) {
  const auto m = from_rows({"##.", "..#"});
  const auto rle = encode_rle(m);
  EXPECT_EQ(rle.width, 3u);
  EXPECT_EQ(rle.height, 2u);
  EXPECT_EQ(rle.counts, (std::vector<std::uint64_t>{0, 2, 3, 1}));
  EXPECT_EQ(decode_rle(rle), m);
}

TEST(Rle, EmptyAndFullMasks) {
  EXPECT_EQ(encode_rle(Mask(4, 2)).counts, (std::vector<std::uint64_t>{8}));
  EXPECT_EQ(encode_rle(Mask(4, 2, true)).counts, (std::vector<std::uint64_t>{0, 8}));
}

TEST(Rle, RejectsBadRuns) {
  EXPECT_EQ(decode_error({2, 2, {1, 2}}), ErrorCode::RunSumMismatch);
  EXPECT_EQ(decode_error({2, 2, {1, 2, 3}}), ErrorCode::RunSumMismatch);
  EXPECT_EQ(decode_error({2, 2, {1, 0, 3}}), ErrorCode::MalformedRle);
}

TEST(Rle, RandomRoundTrip) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto m = random_mask_any_density(rng, 1 + rng() % 20, 1 + rng() % 20);
    EXPECT_EQ(decode_rle(encode_rle(m)), m);
  }
}

TEST(MaskIo, JsonRoundTrip) {
  TempDir tmp;
  const auto m = from_rows({"#..#", ".##."});
  write_rle_file(encode_rle(m), tmp / "m.json");
  EXPECT_EQ(read_text(tmp / "m.json"), "{\"width\":4,\"height\":2,\"counts\":[0,1,2,1,1,2,1]}\n");
  EXPECT_EQ(read_mask_file(tmp / "m.json"), m);
}

TEST(MaskIo, PngRoundTrip) {
  TempDir tmp;
  std::mt19937_64 rng(3);
  const auto m = random_mask(rng, 17, 9, 0.4);
  write_mask_png(m, tmp / "m.png");
  EXPECT_EQ(read_mask_file(tmp / "m.png"), m);
}

TEST(MaskIo, MalformedInputs) {
  TempDir tmp;
  write_text(tmp / "bad.json", "{\"width\":2}");
  EXPECT_THROW(read_mask_file(tmp / "bad.json"), Error);
  write_text(tmp / "bad.png", "not a png");
  try {
    read_mask_file(tmp / "bad.png");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::MalformedImage);
  }
}

TEST(MaskAlgebra, BooleanOps) {
  const auto a = from_rows({"##..", "#..."});
  const auto b = from_rows({".##.", "#..#"});
  EXPECT_EQ(mask_and(a, b), from_rows({".#..", "#..."}));
  EXPECT_EQ(mask_or(a, b), from_rows({"###.", "#..#"}));
  EXPECT_EQ(mask_not(a), from_rows({"..##", ".###"}));
  EXPECT_TRUE(is_subset(mask_and(a, b), a));
  EXPECT_FALSE(is_subset(a, b));
  EXPECT_THROW(mask_and(a, Mask(3, 2)), Error);
}

TEST(Morphology, MatchesDefinition) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 60; ++i) {
    const auto m = random_mask(rng, 1 + rng() % 24, 1 + rng() % 24, 0.3 + 0.4 * (i % 2));
    const std::size_t r = rng() % 4;
    EXPECT_EQ(dilate(m, r), oracle_dilate(m, r));
    EXPECT_EQ(erode(m, r), oracle_erode(m, r));
  }
}

TEST(Morphology, BorderIsBackground) {
  const auto full = Mask(5, 5, true);
  EXPECT_EQ(erode(full, 1), from_rows({".....", ".###.", ".###.", ".###.", "....."}));
  EXPECT_EQ(dilate(full, 3), full);
}

TEST(Morphology, ClosingFillsSinglePixelGap) {
  const auto m = from_rows({"......", ".####.", ".#.##.", ".####.", "......"});
  EXPECT_EQ(close(m, 1), from_rows({"......", ".####.", ".####.", ".####.", "......"}));
  EXPECT_EQ(open(from_rows({".....", ".#...", ".....", "....."}), 1), Mask(5, 4));
}

TEST(Components, EightConnectivityAndOrdering) {
  const auto m = from_rows({"#...##", ".#..##", "......", "#....."});
  const auto comps = connected_components(m);
  ASSERT_EQ(comps.size(), 3u);
  EXPECT_EQ(comps[0].area, 4u);
  EXPECT_EQ(comps[0].first_pixel, 4u);
  EXPECT_EQ(comps[0].box, (BoundingBox{4, 0, 5, 1}));
  EXPECT_EQ(comps[1].area, 2u);  // diagonal pair
  EXPECT_EQ(comps[1].first_pixel, 0u);
  EXPECT_EQ(comps[2].area, 1u);
  EXPECT_EQ(comps[2].first_pixel, 18u);
  for (std::size_t i = 0; i < comps.size(); ++i) EXPECT_EQ(comps[i].id, i);
}

TEST(Components, MatchFloodFillOracle) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const auto m = random_mask(rng, 1 + rng() % 30, 1 + rng() % 30, 0.45);
    const auto labeled = label_components(m);
    const auto oracle = oracle_components(m);
    ASSERT_EQ(labeled.components.size(), oracle.size());
    for (std::size_t c = 0; c < oracle.size(); ++c) {
      EXPECT_EQ(labeled.components[c].area, oracle[c].area);
      EXPECT_EQ(labeled.components[c].first_pixel, oracle[c].first_pixel);
      for (auto p : oracle[c].pixels) EXPECT_EQ(labeled.labels[p], static_cast<std::int32_t>(c));
    }
  }
}

TEST(FillHoles, FillsEnclosedBackgroundOnly) {
  const auto m = from_rows({"#####.", "#...#.", "#.#.#.", "#####.", "......"});
  EXPECT_EQ(fill_holes(m), from_rows({"#####.", "#####.", "#####.", "#####.", "......"}));
  // Enclosure is judged on 4-connected background.
  const auto leaky = from_rows({".#.", "#.#", ".#."});
  EXPECT_EQ(fill_holes(leaky), from_rows({".#.", "###", ".#."}));
  EXPECT_EQ(fill_holes(Mask(3, 3)), Mask(3, 3));
}

TEST(RemoveSmall, DropsComponentsBelowArea) {
  const auto m = from_rows({"##...", "##..#", "....."});
  EXPECT_EQ(remove_small_components(m, 2), from_rows({"##...", "##...", "....."}));
  EXPECT_EQ(remove_small_components(m, 1), m);
  EXPECT_EQ(remove_small_components(m, 5), Mask(5, 3));
}

TEST(PostProcess, DefaultPipeline) {
  PostProcessConfig cfg;
  EXPECT_EQ(cfg.closing_radius, 1u);
  EXPECT_EQ(cfg.min_component_area, 16u);
  EXPECT_TRUE(cfg.fill_holes);

  Mask m(12, 12);
  for (std::size_t y = 2; y < 9; ++y)
    for (std::size_t x = 2; x < 9; ++x) m.set(x, y);
  m.set(5, 5, false);
  m.set(11, 0);
  auto expected = Mask(12, 12);
  for (std::size_t y = 2; y < 9; ++y)
    for (std::size_t x = 2; x < 9; ++x) expected.set(x, y);
  EXPECT_EQ(postprocess(m, cfg), expected);
  EXPECT_EQ(postprocess(m, {0, 0, false}), m);
}
