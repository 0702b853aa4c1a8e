#pragma once

#include <cstdint>
#include <span>

#include "samsr/rng.hpp"
#include "samsr/tensor.hpp"

namespace samsr {

// Result of the mask-structured noise synthesis. `raw` is the pre-normalization
// sum N_sum; `fallback` is set when the masked sum was degenerate (no masks or
// zero spread) and a plain standardized Gaussian field was emitted instead.
struct MaskedNoise {
  ImageTensor eps;
  ImageTensor raw;
  double mean = 0.0;
  double stddev = 0.0;
  bool fallback = false;
};

// eps' = (N_sum - mu) / sigma with N_sum = sum_m F_a^m * Z_m, Z_m drawn
// independently per channel from substream m of `seed`. mu and sigma are
// global over all C*H*W elements (population convention). The same mask
// value gates every channel.
MaskedNoise sample_masked_noise_detailed(const MaskStack& masks, std::size_t channels, const NoiseSeed& seed);
ImageTensor sample_masked_noise(const MaskStack& masks, std::size_t channels, const NoiseSeed& seed);

// Same, with an explicit substream index per mask (masks.count() entries).
MaskedNoise sample_masked_noise_with_streams(const MaskStack& masks, std::size_t channels, const NoiseSeed& seed,
                                             std::span<const std::uint64_t> substreams);

// Unmasked standard-normal field from substream 0, standardized. This is the
// degenerate-case fallback and the uniform-schedule baseline noise. A single
// element field (sigma = 0 by definition) standardizes to 0.
ImageTensor standard_noise(std::size_t channels, std::size_t height, std::size_t width, const NoiseSeed& seed);

struct MomentPair {
  double mean = 0.0;
  double stddev = 0.0;  // population
};

// Compensated two-pass mean and population standard deviation.
MomentPair moments(std::span<const double> values);

}  // namespace samsr
