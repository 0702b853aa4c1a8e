#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "samsr/tensor.hpp"

namespace samsr {

enum class SegmenterMode { Load, Toy };

struct SegmenterConfig {
  SegmenterMode mode = SegmenterMode::Toy;
  std::filesystem::path mask_dir;  // Load mode only
  std::size_t quant_levels = 8;
  std::size_t min_region_px = 16;
  std::size_t max_masks = 256;
  double threshold_T = 0.5;

  void validate() const;
};

// Upscale factor between the LR image and the segmenter input.
inline constexpr std::size_t kSegmentScale = 4;

// 0.299 R + 0.587 G + 0.114 B, or the single channel for grayscale.
std::vector<double> luminance(const ImageTensor& img);

// Per-pixel band index floor(lum * levels), lum clamped to [0,1].
std::vector<std::size_t> quantize_bands(const ImageTensor& img, std::size_t levels);

// Deterministic stand-in for a promptless segmenter: one binary mask per
// 4-connected component of the quantized luminance. Components smaller than
// min_region_px are dropped; the rest are ordered by size (descending) then
// by first scanline position, and truncated to max_masks. Masks are disjoint.
MaskStack toy_segment(const ImageTensor& img_hr, const SegmenterConfig& cfg);

// LR image -> binary F_a at the LR resolution:
// threshold(avg_pool(segment(bicubic_upscale(lr, 4)), 4), T).
// Load mode reads the stack from cfg.mask_dir instead of segmenting; masks
// at 4H x 4W go through pool + threshold, masks at H x W are used as-is.
MaskStack mask_pipeline(const ImageTensor& lr, const SegmenterConfig& cfg);

// Shapes masks already loaded from disk to an H x W image the same way
// mask_pipeline does in load mode.
MaskStack conform_loaded_masks(const MaskStack& loaded, std::size_t height, std::size_t width, double threshold_T);

}  // namespace samsr
