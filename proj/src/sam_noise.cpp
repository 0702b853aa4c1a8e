#include "samsr/sam_noise.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "samsr/error.hpp"
#include "samsr/parallel.hpp"
#include "samsr/simd/kernels.hpp"

namespace samsr {

namespace {

double kahan_sum(std::span<const double> v, auto&& term) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = term(x) - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

ImageTensor standardized(const ImageTensor& raw, const MomentPair& mp) {
  ImageTensor out(raw.channels(), raw.height(), raw.width());
  simd::active().standardize(raw.values().data(), mp.mean, mp.stddev, out.values().data(), raw.size());
  return out;
}

}  // namespace

MomentPair moments(std::span<const double> values) {
  if (values.empty()) return {};
  const double n = static_cast<double>(values.size());
  const double mean = kahan_sum(values, [](double x) { return x; }) / n;
  const double var = kahan_sum(values, [mean](double x) { return (x - mean) * (x - mean); }) / n;
  return {mean, std::sqrt(var)};
}

ImageTensor standard_noise(std::size_t channels, std::size_t height, std::size_t width, const NoiseSeed& seed) {
  ImageTensor raw(channels, height, width);
  fill_normal(seed.substream(0), raw.values());
  const MomentPair mp = moments(raw.values());
  if (!(mp.stddev > 0.0)) return ImageTensor(channels, height, width, 0.0);
  return standardized(raw, mp);
}

MaskedNoise sample_masked_noise_with_streams(const MaskStack& masks, std::size_t channels, const NoiseSeed& seed,
                                             std::span<const std::uint64_t> substreams) {
  if (!masks.binary()) fail_usage("sample_masked_noise: mask stack must be binary");
  if (channels != 1 && channels != 3) fail_usage("sample_masked_noise: channels must be 1 or 3");
  if (substreams.size() != masks.count()) fail_usage("sample_masked_noise: one substream per mask required");

  const std::size_t h = masks.height(), w = masks.width(), plane = masks.plane();
  const std::size_t M = masks.count();
  MaskedNoise out{ImageTensor(channels, h, w), ImageTensor(channels, h, w)};

  if (M > 0) {
    // Per-mask fields are generated independently (index-derived streams) and
    // accumulated in mask order, so the sum does not depend on worker count.
    std::vector<std::vector<double>> z(M, std::vector<double>(channels * plane));
    parallel_for(M, [&](std::size_t m) { fill_normal(seed.substream(substreams[m]), z[m]); });

    const auto& k = simd::active();
    std::vector<double> comp(channels * plane, 0.0);
    double* sum = out.raw.values().data();
    for (std::size_t m = 0; m < M; ++m) {
      const double* mk = masks.mask(m).data();
      for (std::size_t c = 0; c < channels; ++c)
        k.masked_kahan_add(mk, z[m].data() + c * plane, sum + c * plane, comp.data() + c * plane, plane);
    }
    const MomentPair mp = moments(out.raw.values());
    if (mp.stddev > 0.0) {
      out.mean = mp.mean;
      out.stddev = mp.stddev;
      out.eps = standardized(out.raw, mp);
      return out;
    }
  }

  out.fallback = true;
  ImageTensor base(channels, h, w);
  fill_normal(seed.substream(0), base.values());
  const MomentPair mp = moments(base.values());
  out.raw = base;
  out.mean = mp.mean;
  out.stddev = mp.stddev;
  out.eps = mp.stddev > 0.0 ? standardized(base, mp) : ImageTensor(channels, h, w, 0.0);
  return out;
}

MaskedNoise sample_masked_noise_detailed(const MaskStack& masks, std::size_t channels, const NoiseSeed& seed) {
  std::vector<std::uint64_t> streams(masks.count());
  std::iota(streams.begin(), streams.end(), std::uint64_t{0});
  return sample_masked_noise_with_streams(masks, channels, seed, streams);
}

ImageTensor sample_masked_noise(const MaskStack& masks, std::size_t channels, const NoiseSeed& seed) {
  return sample_masked_noise_detailed(masks, channels, seed).eps;
}

}  // namespace samsr
