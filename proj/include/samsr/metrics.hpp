#pragma once

#include "samsr/tensor.hpp"

namespace samsr {

inline constexpr double kPsnrCap = 99.0;

struct MetricReport {
  double psnr = 0.0;
  double ssim = 0.0;
};

// Peak 1 on [0,1]-clamped inputs. Exact matches return kPsnrCap.
double psnr(const ImageTensor& a, const ImageTensor& b);

// Mean local SSIM over the luminance plane: 11x11 Gaussian window
// (sigma 1.5), valid positions only, C1 = 0.01^2, C2 = 0.03^2.
double ssim(const ImageTensor& a, const ImageTensor& b);

MetricReport evaluate_metrics(const ImageTensor& a, const ImageTensor& b);

}  // namespace samsr
