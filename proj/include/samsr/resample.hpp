#pragma once

#include "samsr/tensor.hpp"

namespace samsr {

// Catmull-Rom cubic kernel (a = -0.5).
double catmull_rom(double x) noexcept;

// Separable bicubic upscaling by an integer factor. Sample centres are
// aligned at half-pixel offsets, src = (dst + 0.5) / factor - 0.5, and
// out-of-range taps clamp to the edge.
ImageTensor bicubic_upscale(const ImageTensor& img, std::size_t factor);

// Non-overlapping window x window block mean. Output is never flagged binary.
MaskStack avg_pool(const MaskStack& stack, std::size_t window);

// Image block mean over non-overlapping factor x factor windows.
ImageTensor downsample_mean(const ImageTensor& img, std::size_t factor);

// out = 1 where in > threshold (strict), else 0.
MaskStack threshold(const MaskStack& stack, double threshold);

}  // namespace samsr
