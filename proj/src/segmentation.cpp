#include "samsr/segmentation.hpp"

#include <algorithm>
#include <cmath>

#include "samsr/error.hpp"
#include "samsr/image_io.hpp"
#include "samsr/resample.hpp"

namespace samsr {

void SegmenterConfig::validate() const {
  if (quant_levels < 2) fail_usage("segmenter: quant_levels must be >= 2");
  if (max_masks < 1) fail_usage("segmenter: max_masks must be >= 1");
  if (!(threshold_T > 0.0 && threshold_T < 1.0)) fail_usage("segmenter: threshold_T must lie in (0,1)");
  if (mode == SegmenterMode::Load && mask_dir.empty()) fail_usage("segmenter: load mode needs mask_dir");
}

std::vector<double> luminance(const ImageTensor& img) {
  if (img.channels() == 1) {
    auto v = img.values();
    return {v.begin(), v.end()};
  }
  const auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i];
  return out;
}

std::vector<std::size_t> quantize_bands(const ImageTensor& img, std::size_t levels) {
  const auto lum = luminance(img);
  std::vector<std::size_t> bands(lum.size());
  const double l = static_cast<double>(levels);
  for (std::size_t i = 0; i < lum.size(); ++i) {
    const double v = std::clamp(lum[i], 0.0, 1.0);
    bands[i] = std::min(static_cast<std::size_t>(std::floor(v * l)), levels - 1);
  }
  return bands;
}

MaskStack toy_segment(const ImageTensor& img_hr, const SegmenterConfig& cfg) {
  cfg.validate();
  const std::size_t h = img_hr.height(), w = img_hr.width(), n = h * w;
  const auto bands = quantize_bands(img_hr, cfg.quant_levels);

  struct Region {
    std::size_t seed;
    std::vector<std::size_t> pixels;
  };
  std::vector<Region> regions;
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    Region r{s, {}};
    seen[s] = true;
    stack.assign(1, s);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      r.pixels.push_back(p);
      const std::size_t y = p / w, x = p % w;
      auto visit = [&](std::size_t q) {
        if (!seen[q] && bands[q] == bands[s]) {
          seen[q] = true;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    if (r.pixels.size() >= cfg.min_region_px) regions.push_back(std::move(r));
  }
  std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
    if (a.pixels.size() != b.pixels.size()) return a.pixels.size() > b.pixels.size();
    return a.seed < b.seed;
  });
  if (regions.size() > cfg.max_masks) regions.resize(cfg.max_masks);

  std::vector<double> data(regions.size() * n, 0.0);
  for (std::size_t m = 0; m < regions.size(); ++m)
    for (std::size_t p : regions[m].pixels) data[m * n + p] = 1.0;
  return MaskStack(regions.size(), h, w, std::move(data), true);
}

MaskStack conform_loaded_masks(const MaskStack& loaded, std::size_t height, std::size_t width, double threshold_T) {
  if (loaded.count() == 0) return MaskStack(0, height, width);
  if (loaded.height() == height && loaded.width() == width) {
    if (!loaded.binary()) fail_usage("loaded masks at H x W must be binary");
    return loaded;
  }
  if (loaded.height() == kSegmentScale * height && loaded.width() == kSegmentScale * width)
    return threshold(avg_pool(loaded, kSegmentScale), threshold_T);
  fail_usage("mask size " + std::to_string(loaded.height()) + "x" + std::to_string(loaded.width()) +
             " matches neither " + std::to_string(height) + "x" + std::to_string(width) + " nor " +
             std::to_string(kSegmentScale * height) + "x" + std::to_string(kSegmentScale * width));
}

MaskStack mask_pipeline(const ImageTensor& lr, const SegmenterConfig& cfg) {
  cfg.validate();
  if (cfg.mode == SegmenterMode::Load) {
    MaskStack loaded = load_mask_dir(cfg.mask_dir);
    if (loaded.count() > cfg.max_masks) {
      MaskStack capped(0, loaded.height(), loaded.width());
      for (std::size_t m = 0; m < cfg.max_masks; ++m) capped.push_back(loaded.mask(m));
      loaded = std::move(capped);
    }
    return conform_loaded_masks(loaded, lr.height(), lr.width(), cfg.threshold_T);
  }
  const ImageTensor hr = bicubic_upscale(lr, kSegmentScale);
  const MaskStack fd = toy_segment(hr, cfg);
  return threshold(avg_pool(fd, kSegmentScale), cfg.threshold_T);
}

}  // namespace samsr
