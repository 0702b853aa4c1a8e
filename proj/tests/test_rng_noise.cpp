#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>

#include "helpers.hpp"
#include "samsr/error.hpp"
#include "samsr/parallel.hpp"
#include "samsr/rng.hpp"
#include "samsr/sam_noise.hpp"

using namespace samsr;

TEST(Philox, KnownAnswerVectors) {
  using A4 = std::array<std::uint32_t, 4>;
  EXPECT_EQ(philox4x32({0, 0, 0, 0}, {0, 0}), (A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
  EXPECT_EQ(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}),
            (A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
  EXPECT_EQ(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}),
            (A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, PureAndIndexAddressed) {
  std::vector<double> buf(101);
  fill_normal(77, buf);
  for (std::size_t i = 0; i < buf.size(); ++i) EXPECT_EQ(buf[i], normal_at(77, i));
  EXPECT_NE(normal_at(77, 0), normal_at(78, 0));
  EXPECT_NE(derive_stream(1, 2), derive_stream(2, 1));
  const NoiseSeed s{5};
  EXPECT_EQ(s.substream(3), derive_stream(5, 3));
  EXPECT_EQ(s.child(3).master, derive_stream(5, 3));
}

TEST(Rng, NormalAndUniformMoments) {
  const std::size_t n = 200000;
  std::vector<double> z(n);
  fill_normal(12345, z);
  const auto mo = moments(z);
  EXPECT_NEAR(mo.mean, 0.0, 0.01);
  EXPECT_NEAR(mo.stddev, 1.0, 0.01);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform_at(9, i);
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Moments, CompensatedPopulation) {
  const std::vector<double> v = {1e8 + 1, 1e8 + 2, 1e8 + 3, 1e8 + 4};
  const auto m = moments(v);
  EXPECT_EQ(m.mean, 1e8 + 2.5);
  EXPECT_NEAR(m.stddev, std::sqrt(1.25), 1e-9);
}

TEST(MaskedNoise, ExactNormalization) {
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto masks = test::random_stack(1 + i % 5, 9, 7, i);
    const auto eps = sample_masked_noise(masks, i % 2 ? 3 : 1, NoiseSeed{i});
    const auto m = moments(eps.values());
    EXPECT_LE(std::abs(m.mean), 1e-9);
    EXPECT_LE(std::abs(m.stddev * m.stddev - 1.0), 1e-9);
  }
}

TEST(MaskedNoise, SingleFullMaskIsStandardizedField) {
  const MaskStack full(1, 4, 5, std::vector<double>(20, 1.0), true);
  const NoiseSeed seed{3};
  const auto n = sample_masked_noise_detailed(full, 1, seed);
  EXPECT_FALSE(n.fallback);
  std::vector<double> z(20);
  fill_normal(seed.substream(0), z);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(n.raw.values()[i], z[i]);
  const auto m = moments(z);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(n.eps.values()[i], (z[i] - m.mean) / m.stddev);
}

TEST(MaskedNoise, ZeroCoverageSharesOneValue) {
  const auto masks = test::stack_with_coverage({2, 1, 1, 0, 3, 0}, 2, 3);
  const auto n = sample_masked_noise_detailed(masks, 3, NoiseSeed{8});
  const double expected = -n.mean / n.stddev;
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(n.eps.at(c, 1, 0), expected);
    EXPECT_EQ(n.eps.at(c, 1, 2), expected);
  }
}

TEST(MaskedNoise, CoverageSetsVariance) {
  const auto masks = test::stack_with_coverage({2, 1, 1, 0}, 2, 2);
  const int seeds = 4000;
  std::vector<double> sum(4, 0.0), sq(4, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto n = sample_masked_noise_detailed(masks, 1, NoiseSeed{static_cast<std::uint64_t>(s)});
    for (std::size_t i = 0; i < 4; ++i) {
      sum[i] += n.raw.values()[i];
      sq[i] += n.raw.values()[i] * n.raw.values()[i];
    }
  }
  const double want[4] = {2, 1, 1, 0};
  for (std::size_t i = 0; i < 4; ++i) {
    const double mean = sum[i] / seeds, var = sq[i] / seeds - mean * mean;
    if (want[i] == 0) EXPECT_EQ(var, 0.0);
    else EXPECT_NEAR(var / want[i], 1.0, 0.08) << "pixel " << i;
  }
}

TEST(MaskedNoise, FallbackCases) {
  const NoiseSeed seed{21};
  const auto none = sample_masked_noise_detailed(MaskStack(0, 3, 4), 3, seed);
  EXPECT_TRUE(none.fallback);
  EXPECT_EQ(none.eps, standard_noise(3, 3, 4, seed));
  std::vector<double> z(36);
  fill_normal(seed.substream(0), z);
  const auto m = moments(z);
  for (std::size_t i = 0; i < 36; ++i) EXPECT_EQ(none.eps.values()[i], (z[i] - m.mean) / m.stddev);

  const auto empty = sample_masked_noise_detailed(MaskStack(2, 3, 4), 1, seed);
  EXPECT_TRUE(empty.fallback);
  EXPECT_EQ(empty.eps, standard_noise(1, 3, 4, seed));

  for (double v : test::values_of(standard_noise(1, 1, 1, seed))) EXPECT_EQ(v, 0.0);
}

TEST(MaskedNoise, RejectsNonBinaryAndBadChannels) {
  EXPECT_THROW(sample_masked_noise(MaskStack(1, 2, 2, {0.5, 0, 0, 0}, false), 1, NoiseSeed{}), Error);
  EXPECT_THROW(sample_masked_noise(MaskStack(1, 2, 2), 2, NoiseSeed{}), Error);
}

TEST(MaskedNoise, IndependentOfThreadCount) {
  const auto masks = test::random_stack(12, 16, 16, 5);
  ::setenv("SAMSR_THREADS", "1", 1);
  const auto a = sample_masked_noise(masks, 3, NoiseSeed{99});
  ::setenv("SAMSR_THREADS", "7", 1);
  const auto b = sample_masked_noise(masks, 3, NoiseSeed{99});
  ::unsetenv("SAMSR_THREADS");
  EXPECT_EQ(a, b);
}

TEST(MaskedNoise, PermutationOnlyReassignsStreams) {
  const auto masks = test::random_stack(5, 8, 8, 17);
  const NoiseSeed seed{4};
  const std::vector<std::size_t> perm = {3, 0, 4, 1, 2};
  MaskStack permuted(0, 8, 8);
  std::vector<std::uint64_t> streams;
  for (std::size_t k : perm) {
    permuted.push_back(masks.mask(k));
    streams.push_back(k);
  }
  const auto a = sample_masked_noise_detailed(masks, 1, seed);
  const auto b = sample_masked_noise_with_streams(permuted, 1, seed, streams);
  for (std::size_t i = 0; i < a.raw.size(); ++i) EXPECT_NEAR(a.raw.values()[i], b.raw.values()[i], 1e-12);
  for (std::size_t i = 0; i < a.eps.size(); ++i) EXPECT_NEAR(a.eps.values()[i], b.eps.values()[i], 1e-12);
}

TEST(Parallel, ThreadCountFromEnvironment) {
  ::setenv("SAMSR_THREADS", "3", 1);
  EXPECT_EQ(thread_count(), 3u);
  ::setenv("SAMSR_THREADS", "zero", 1);
  EXPECT_THROW(thread_count(), Error);
  ::setenv("SAMSR_THREADS", "0", 1);
  EXPECT_THROW(thread_count(), Error);
  ::unsetenv("SAMSR_THREADS");
  EXPECT_GE(thread_count(), 1u);
}

TEST(Parallel, CoversEveryIndexAndRethrows) {
  ::setenv("SAMSR_THREADS", "4", 1);
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), [&](std::size_t i) { hit[i] += 1; });
  EXPECT_EQ(std::accumulate(hit.begin(), hit.end(), 0), 1000);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) {
                 if (i == 6) fail_numeric("boom");
               }),
               Error);
  ::unsetenv("SAMSR_THREADS");
}
