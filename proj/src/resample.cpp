#include "samsr/resample.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "samsr/error.hpp"

namespace samsr {

double catmull_rom(double x) noexcept {
  constexpr double a = -0.5;
  const double t = std::abs(x);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

namespace {

struct Taps {
  std::array<std::size_t, 4> index;
  std::array<double, 4> weight;
};

// Four clamped source taps for every output coordinate along one axis.
std::vector<Taps> build_taps(std::size_t src_len, std::size_t factor) {
  std::vector<Taps> taps(src_len * factor);
  const auto last = static_cast<std::ptrdiff_t>(src_len) - 1;
  for (std::size_t o = 0; o < taps.size(); ++o) {
    const double src = (static_cast<double>(o) + 0.5) / static_cast<double>(factor) - 0.5;
    const double base = std::floor(src);
    const double frac = src - base;
    for (int k = 0; k < 4; ++k) {
      const auto i = static_cast<std::ptrdiff_t>(base) - 1 + k;
      taps[o].index[k] = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(i, 0, last));
      taps[o].weight[k] = catmull_rom(frac - static_cast<double>(k - 1));
    }
  }
  return taps;
}

}  // namespace

ImageTensor bicubic_upscale(const ImageTensor& img, std::size_t factor) {
  if (factor == 0) fail_usage("bicubic_upscale: factor must be >= 1");
  if (factor == 1) return img;
  const std::size_t h = img.height(), w = img.width();
  const std::size_t oh = h * factor, ow = w * factor;
  const auto tx = build_taps(w, factor);
  const auto ty = build_taps(h, factor);

  ImageTensor out(img.channels(), oh, ow);
  std::vector<double> rows(h * ow);
  for (std::size_t c = 0; c < img.channels(); ++c) {
    const auto src = img.plane(c);
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < ow; ++x) {
        const Taps& t = tx[x];
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += t.weight[k] * src[y * w + t.index[k]];
        rows[y * ow + x] = acc;
      }
    auto dst = out.plane(c);
    for (std::size_t y = 0; y < oh; ++y) {
      const Taps& t = ty[y];
      for (std::size_t x = 0; x < ow; ++x) {
        double acc = 0.0;
        for (int k = 0; k < 4; ++k) acc += t.weight[k] * rows[t.index[k] * ow + x];
        dst[y * ow + x] = acc;
      }
    }
  }
  return out;
}

MaskStack avg_pool(const MaskStack& stack, std::size_t window) {
  if (window == 0) fail_usage("avg_pool: window must be >= 1");
  if (stack.height() % window != 0 || stack.width() % window != 0)
    fail_usage("avg_pool: stack dimensions " + std::to_string(stack.height()) + "x" + std::to_string(stack.width()) +
               " not divisible by window " + std::to_string(window));
  const std::size_t oh = stack.height() / window, ow = stack.width() / window, w = stack.width();
  const double n = static_cast<double>(window * window);
  std::vector<double> out(stack.count() * oh * ow);
  for (std::size_t m = 0; m < stack.count(); ++m) {
    const auto src = stack.mask(m);
    for (std::size_t oy = 0; oy < oh; ++oy)
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double sum = 0.0, lo = src[oy * window * w + ox * window], hi = lo;
        for (std::size_t dy = 0; dy < window; ++dy)
          for (std::size_t dx = 0; dx < window; ++dx) {
            const double v = src[(oy * window + dy) * w + ox * window + dx];
            sum += v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        // Rounding in the sum must not push the mean outside the block range.
        out[(m * oh + oy) * ow + ox] = std::clamp(sum / n, lo, hi);
      }
  }
  return MaskStack(stack.count(), oh, ow, std::move(out), false);
}

ImageTensor downsample_mean(const ImageTensor& img, std::size_t factor) {
  if (factor == 0) fail_usage("downsample_mean: factor must be >= 1");
  if (img.height() % factor != 0 || img.width() % factor != 0)
    fail_usage("downsample_mean: image size not divisible by " + std::to_string(factor));
  const std::size_t oh = img.height() / factor, ow = img.width() / factor;
  ImageTensor out(img.channels(), oh, ow);
  const double n = static_cast<double>(factor * factor);
  for (std::size_t c = 0; c < img.channels(); ++c)
    for (std::size_t oy = 0; oy < oh; ++oy)
      for (std::size_t ox = 0; ox < ow; ++ox) {
        double sum = 0.0;
        for (std::size_t dy = 0; dy < factor; ++dy)
          for (std::size_t dx = 0; dx < factor; ++dx) sum += img.at(c, oy * factor + dy, ox * factor + dx);
        out.at(c, oy, ox) = sum / n;
      }
  return out;
}

MaskStack threshold(const MaskStack& stack, double t) {
  if (!(t > 0.0 && t < 1.0)) fail_usage("threshold: T must lie in (0,1)");
  std::vector<double> out(stack.values().size());
  std::transform(stack.values().begin(), stack.values().end(), out.begin(), [t](double v) { return v > t ? 1.0 : 0.0; });
  return MaskStack(stack.count(), stack.height(), stack.width(), std::move(out), true);
}

}  // namespace samsr
