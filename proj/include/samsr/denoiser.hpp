#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <span>
#include <vector>

#include "samsr/tensor.hpp"

namespace samsr {

// f(x_t, y, t) -> prediction of x_0 for t >= 1. Training also calls t = 0,
// the inverse direction that maps a clean estimate back to x_T.
// Implementations must be deterministic and safe for concurrent const calls.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  virtual ImageTensor operator()(const ImageTensor& x_t, const ImageTensor& y, std::size_t t) const = 0;

  virtual std::vector<double> parameters() const { return {}; }
  virtual void set_parameters(std::span<const double> params);
  std::size_t parameter_count() const { return parameters().size(); }

  virtual std::unique_ptr<Denoiser> clone() const = 0;
};

// Test double that always answers with the true x_0.
class OracleDenoiser final : public Denoiser {
 public:
  explicit OracleDenoiser(ImageTensor x0) : x0_(std::move(x0)) {}

  ImageTensor operator()(const ImageTensor& x_t, const ImageTensor& y, std::size_t t) const override;
  std::unique_ptr<Denoiser> clone() const override { return std::make_unique<OracleDenoiser>(*this); }

  const ImageTensor& target() const noexcept { return x0_; }

 private:
  ImageTensor x0_;
};

// Desk-scale student/teacher. For every output channel c, with s = t / T:
//
//   out_c = (b_c + bt_c s) + (ax_c + axt_c s) x_t[c] + (ay_c + ayt_c s) y[c]
//         + sum over the 2C input planes (x_t channels, then y channels) of a
//           3x3 convolution with clamp-to-edge padding.
//
// Parameter layout per output channel (6 + 18 C values, channels in order):
//   [b, bt, ax, axt, ay, ayt, w(plane 0, 3x3 row-major), ..., w(plane 2C-1)]
// Total C (6 + 18 C): 24 for grayscale, 180 for RGB.
class ToyDenoiser final : public Denoiser {
 public:
  ToyDenoiser(std::size_t channels, std::size_t steps);
  ToyDenoiser(std::size_t channels, std::size_t steps, std::vector<double> params);

  static std::size_t parameter_count_for(std::size_t channels) { return channels * (6 + 18 * channels); }

  ImageTensor operator()(const ImageTensor& x_t, const ImageTensor& y, std::size_t t) const override;

  std::vector<double> parameters() const override { return params_; }
  void set_parameters(std::span<const double> params) override;
  std::unique_ptr<Denoiser> clone() const override { return std::make_unique<ToyDenoiser>(*this); }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t steps() const noexcept { return steps_; }

  // Parameters that make the map return y exactly (ay = 1, all else 0).
  static std::vector<double> passthrough_y(std::size_t channels);

 private:
  std::size_t channels_;
  std::size_t steps_;
  std::vector<double> params_;
};

// Parameter file: magic "SMRP", then little-endian u32 channels, u32 T,
// u32 count, followed by `count` little-endian doubles.
inline constexpr char kParamMagic[4] = {'S', 'M', 'R', 'P'};
void save_toy_denoiser(const ToyDenoiser& den, const std::filesystem::path& path);
ToyDenoiser load_toy_denoiser(const std::filesystem::path& path);

}  // namespace samsr
