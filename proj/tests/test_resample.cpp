#include <gtest/gtest.h>

#include <cmath>

#include "helpers.hpp"
#include "samsr/error.hpp"
#include "samsr/resample.hpp"

using namespace samsr;

namespace {

double cubic_weight(double x) {
  const double a = -0.5, t = std::fabs(x);
  if (t <= 1.0) return (a + 2.0) * t * t * t - (a + 3.0) * t * t + 1.0;
  if (t < 2.0) return a * t * t * t - 5.0 * a * t * t + 8.0 * a * t - 4.0 * a;
  return 0.0;
}

// Direct 2-D evaluation of the bicubic sample at output pixel (oy, ox).
double bicubic_oracle(const ImageTensor& img, std::size_t c, std::size_t f, std::size_t oy, std::size_t ox) {
  const double sy = (static_cast<double>(oy) + 0.5) / static_cast<double>(f) - 0.5;
  const double sx = (static_cast<double>(ox) + 0.5) / static_cast<double>(f) - 0.5;
  const long by = static_cast<long>(std::floor(sy)), bx = static_cast<long>(std::floor(sx));
  const long h = static_cast<long>(img.height()), w = static_cast<long>(img.width());
  double v = 0.0;
  for (long j = by - 1; j <= by + 2; ++j)
    for (long i = bx - 1; i <= bx + 2; ++i) {
      const long cy = std::clamp(j, 0L, h - 1), cx = std::clamp(i, 0L, w - 1);
      v += cubic_weight(sy - static_cast<double>(j)) * cubic_weight(sx - static_cast<double>(i)) *
           img.at(c, static_cast<std::size_t>(cy), static_cast<std::size_t>(cx));
    }
  return v;
}

}  // namespace

TEST(Bicubic, KernelValues) {
  EXPECT_EQ(catmull_rom(0.0), 1.0);
  EXPECT_EQ(catmull_rom(1.0), 0.0);
  EXPECT_EQ(catmull_rom(2.0), 0.0);
  EXPECT_EQ(catmull_rom(0.5), 0.5625);
  EXPECT_EQ(catmull_rom(-1.5), -0.0625);
}

TEST(Bicubic, CheckerboardMatchesPointwiseOracle) {
  ImageTensor board(1, 2, 2);
  board.at(0, 0, 0) = 1.0, board.at(0, 1, 1) = 1.0;
  const auto up = bicubic_upscale(board, 4);
  ASSERT_EQ(up.height(), 8u);
  for (std::size_t y = 0; y < 8; ++y)
    for (std::size_t x = 0; x < 8; ++x) EXPECT_NEAR(up.at(0, y, x), bicubic_oracle(board, 0, 4, y, x), 1e-12);
}

TEST(Bicubic, RandomMatchesPointwiseOracle) {
  const auto img = test::random_image(3, 5, 7, 21);
  for (std::size_t f : {2u, 3u, 4u}) {
    const auto up = bicubic_upscale(img, f);
    for (std::size_t c = 0; c < 3; ++c)
      for (std::size_t y = 0; y < up.height(); ++y)
        for (std::size_t x = 0; x < up.width(); ++x) EXPECT_NEAR(up.at(c, y, x), bicubic_oracle(img, c, f, y, x), 1e-12);
  }
}

TEST(Bicubic, ConstantsIdentityAndErrors) {
  const auto up = bicubic_upscale(ImageTensor(3, 3, 2, 0.5), 4);
  EXPECT_EQ(up.height(), 12u);
  EXPECT_EQ(up.width(), 8u);
  for (double v : up.values()) EXPECT_NEAR(v, 0.5, 1e-12);
  const auto img = test::random_image(1, 4, 4, 2);
  EXPECT_EQ(bicubic_upscale(img, 1), img);
  EXPECT_THROW(bicubic_upscale(img, 0), Error);
}

TEST(AvgPool, Examples) {
  const auto ones = avg_pool(MaskStack(1, 8, 8, std::vector<double>(64, 1.0), true), 4);
  EXPECT_EQ(std::vector<double>(ones.values().begin(), ones.values().end()), std::vector<double>(4, 1.0));
  std::vector<double> half(16, 0.0);
  for (int i = 0; i < 8; ++i) half[i] = 1.0;
  const auto pooled = avg_pool(MaskStack(1, 4, 4, half, true), 4);
  EXPECT_EQ(pooled.values()[0], 0.5);
  EXPECT_FALSE(pooled.binary());
  const auto s = test::random_stack(2, 4, 6, 1);
  const auto id = avg_pool(s, 1);
  for (std::size_t i = 0; i < s.values().size(); ++i) EXPECT_EQ(id.values()[i], s.values()[i]);
  EXPECT_THROW(avg_pool(s, 4), Error);
}

TEST(AvgPool, RangeAndConstants) {
  std::vector<double> c(2 * 8 * 8, 0.3);
  for (double v : test::values_of(avg_pool(MaskStack(2, 8, 8, c, false), 4))) EXPECT_NEAR(v, 0.3, 1e-12);
  std::vector<double> mixed(64);
  for (std::size_t i = 0; i < 64; ++i) mixed[i] = 0.1 * static_cast<double>(i % 7);
  const MaskStack in(1, 8, 8, mixed, false);
  const auto out = avg_pool(in, 4);
  for (std::size_t by = 0; by < 2; ++by)
    for (std::size_t bx = 0; bx < 2; ++bx) {
      double lo = 1e9, hi = -1e9;
      for (std::size_t y = 0; y < 4; ++y)
        for (std::size_t x = 0; x < 4; ++x) {
          lo = std::min(lo, in.at(0, by * 4 + y, bx * 4 + x));
          hi = std::max(hi, in.at(0, by * 4 + y, bx * 4 + x));
        }
      EXPECT_GE(out.at(0, by, bx), lo);
      EXPECT_LE(out.at(0, by, bx), hi);
    }
}

TEST(Threshold, StrictComparisonAndIdempotence) {
  const MaskStack s(1, 1, 4, {0.5, 0.51, 0.0, 1.0}, false);
  const auto t = threshold(s, 0.5);
  EXPECT_TRUE(t.binary());
  EXPECT_EQ(t.values()[0], 0.0);
  EXPECT_EQ(t.values()[1], 1.0);
  EXPECT_EQ(t.values()[2], 0.0);
  EXPECT_EQ(t.values()[3], 1.0);
  const MaskStack relaxed(t.count(), t.height(), t.width(), std::vector<double>(t.values().begin(), t.values().end()), false);
  EXPECT_EQ(threshold(relaxed, 0.5), t);
  for (double v : test::values_of(threshold(MaskStack(2, 3, 3, false), 0.3))) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(threshold(s, 0.0), Error);
  EXPECT_THROW(threshold(s, 1.0), Error);
}

TEST(DownsampleMean, BlockMeans) {
  ImageTensor img(1, 2, 4);
  for (std::size_t i = 0; i < 8; ++i) img.values()[i] = static_cast<double>(i);
  const auto d = downsample_mean(img, 2);
  EXPECT_EQ(d.values()[0], (0 + 1 + 4 + 5) / 4.0);
  EXPECT_EQ(d.values()[1], (2 + 3 + 6 + 7) / 4.0);
  EXPECT_THROW(downsample_mean(img, 3), Error);
}
