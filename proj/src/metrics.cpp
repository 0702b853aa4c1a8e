#include "samsr/metrics.hpp"

#include <array>
#include <algorithm>
#include <cmath>

#include "samsr/error.hpp"
#include "samsr/segmentation.hpp"

namespace samsr {

namespace {

constexpr std::size_t kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWin * kWin> gaussian_window() {
  std::array<double, kWin> g{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kWin; ++i) {
    const double d = static_cast<double>(i) - 5.0;
    g[i] = std::exp(-(d * d) / (2.0 * kSigma * kSigma));
    sum += g[i];
  }
  std::array<double, kWin * kWin> w{};
  for (std::size_t i = 0; i < kWin; ++i)
    for (std::size_t j = 0; j < kWin; ++j) w[i * kWin + j] = (g[i] / sum) * (g[j] / sum);
  return w;
}

}  // namespace

double psnr(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) fail_usage("psnr: image shapes differ");
  const auto ca = a.clamped(0.0, 1.0), cb = b.clamped(0.0, 1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    const double d = ca.values()[i] - cb.values()[i];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(ca.size());
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) fail_usage("ssim: image shapes differ");
  const std::size_t h = a.height(), w = a.width();
  if (h < kWin || w < kWin) fail_usage("ssim: images smaller than the 11x11 window");
  const auto la = luminance(a.clamped(0.0, 1.0));
  const auto lb = luminance(b.clamped(0.0, 1.0));
  static const auto win = gaussian_window();

  double total = 0.0;
  const std::size_t oh = h - kWin + 1, ow = w - kWin + 1;
  for (std::size_t y = 0; y < oh; ++y)
    for (std::size_t x = 0; x < ow; ++x) {
      double ma = 0.0, mb = 0.0, saa = 0.0, sbb = 0.0, sab = 0.0;
      for (std::size_t i = 0; i < kWin; ++i)
        for (std::size_t j = 0; j < kWin; ++j) {
          const double g = win[i * kWin + j];
          const double va = la[(y + i) * w + x + j], vb = lb[(y + i) * w + x + j];
          ma += g * va;
          mb += g * vb;
          saa += g * (va * va);
          sbb += g * (vb * vb);
          sab += g * (va * vb);
        }
      const double mab = ma * mb;
      const double var_a = saa - ma * ma, var_b = sbb - mb * mb, cov = sab - mab;
      const double num = (2.0 * mab + kC1) * (2.0 * cov + kC2);
      const double den = ((ma * ma + mb * mb) + kC1) * ((var_a + var_b) + kC2);
      total += num / den;
    }
  return total / static_cast<double>(oh * ow);
}

MetricReport evaluate_metrics(const ImageTensor& a, const ImageTensor& b) { return {psnr(a, b), ssim(a, b)}; }

}  // namespace samsr
