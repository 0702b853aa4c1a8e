#include "samsr/synthetic.hpp"

#include <algorithm>

#include "samsr/error.hpp"
#include "samsr/resample.hpp"

namespace samsr {

ImageTensor synthetic_scene(std::size_t channels, std::size_t size, const NoiseSeed& seed) {
  const std::uint64_t s = seed.substream(0);
  std::uint64_t draw = 0;
  auto u = [&] { return uniform_at(s, draw++); };
  auto coord = [&] { return std::min(size - 1, static_cast<std::size_t>(u() * static_cast<double>(size))); };

  ImageTensor img(channels, size, size);
  const double bg = 0.1 + 0.3 * u();
  for (double& v : img.values()) v = bg;
  const std::size_t rects = 1 + static_cast<std::size_t>(u() * 3.0);
  for (std::size_t r = 0; r < rects; ++r) {
    std::size_t y0 = coord(), y1 = coord(), x0 = coord(), x1 = coord();
    if (y0 > y1) std::swap(y0, y1);
    if (x0 > x1) std::swap(x0, x1);
    const double level = 0.5 + 0.45 * u();
    for (std::size_t c = 0; c < channels; ++c) {
      const double tint = channels == 1 ? 1.0 : 0.8 + 0.2 * u();
      for (std::size_t y = y0; y <= y1; ++y)
        for (std::size_t x = x0; x <= x1; ++x) img.at(c, y, x) = level * tint;
    }
  }
  return img;
}

std::vector<TrainingPair> synthetic_pairs(std::size_t n, std::size_t channels, std::size_t size, std::size_t scale,
                                          const NoiseSeed& seed) {
  if (scale == 0 || size % scale != 0) fail_usage("synthetic_pairs: size must be a multiple of scale");
  std::vector<TrainingPair> pairs;
  pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ImageTensor x0 = synthetic_scene(channels, size, seed.child(i));
    ImageTensor y = bicubic_upscale(downsample_mean(x0, scale), scale);
    pairs.push_back({std::move(x0), std::move(y)});
  }
  return pairs;
}

}  // namespace samsr
