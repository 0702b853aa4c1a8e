#include "samsr/denoiser.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "samsr/error.hpp"
#include "samsr/image_io.hpp"
#include "samsr/simd/kernels.hpp"

namespace samsr {

void Denoiser::set_parameters(std::span<const double> params) {
  if (!params.empty()) fail_usage("this denoiser has no trainable parameters");
}

ImageTensor OracleDenoiser::operator()(const ImageTensor& x_t, const ImageTensor&, std::size_t) const {
  if (x_t.shape() != x0_.shape()) fail_usage("OracleDenoiser: input shape differs from the stored x0");
  return x0_;
}

ToyDenoiser::ToyDenoiser(std::size_t channels, std::size_t steps)
    : ToyDenoiser(channels, steps, std::vector<double>(parameter_count_for(channels), 0.0)) {}

ToyDenoiser::ToyDenoiser(std::size_t channels, std::size_t steps, std::vector<double> params)
    : channels_(channels), steps_(steps) {
  if (channels != 1 && channels != 3) fail_usage("ToyDenoiser: channels must be 1 or 3");
  if (steps < 1) fail_usage("ToyDenoiser: steps must be >= 1");
  set_parameters(params);
}

void ToyDenoiser::set_parameters(std::span<const double> params) {
  if (params.size() != parameter_count_for(channels_))
    fail_usage("ToyDenoiser: expected " + std::to_string(parameter_count_for(channels_)) + " parameters, got " +
               std::to_string(params.size()));
  params_.assign(params.begin(), params.end());
}

std::vector<double> ToyDenoiser::passthrough_y(std::size_t channels) {
  std::vector<double> p(parameter_count_for(channels), 0.0);
  for (std::size_t c = 0; c < channels; ++c) p[c * (6 + 18 * channels) + 4] = 1.0;
  return p;
}

namespace {

// Clamp-to-edge padding by one pixel on every side.
void pad_plane(std::span<const double> src, std::size_t h, std::size_t w, std::vector<double>& dst) {
  const std::size_t pw = w + 2;
  dst.resize((h + 2) * pw);
  for (std::size_t py = 0; py < h + 2; ++py) {
    const std::size_t sy = py == 0 ? 0 : (py > h ? h - 1 : py - 1);
    double* row = dst.data() + py * pw;
    std::memcpy(row + 1, src.data() + sy * w, w * sizeof(double));
    row[0] = row[1];
    row[w + 1] = row[w];
  }
}

}  // namespace

ImageTensor ToyDenoiser::operator()(const ImageTensor& x_t, const ImageTensor& y, std::size_t t) const {
  if (x_t.shape() != y.shape()) fail_usage("ToyDenoiser: x_t and y shapes differ");
  if (x_t.channels() != channels_) fail_usage("ToyDenoiser: channel count differs from the model");
  const std::size_t h = x_t.height(), w = x_t.width(), pw = w + 2;
  const double s = static_cast<double>(t) / static_cast<double>(steps_);
  const auto& k = simd::active();

  std::vector<std::vector<double>> padded(2 * channels_);
  for (std::size_t c = 0; c < channels_; ++c) {
    pad_plane(x_t.plane(c), h, w, padded[c]);
    pad_plane(y.plane(c), h, w, padded[channels_ + c]);
  }

  ImageTensor out(channels_, h, w);
  const std::size_t stride = 6 + 18 * channels_;
  for (std::size_t c = 0; c < channels_; ++c) {
    const double* p = params_.data() + c * stride;
    auto acc = out.plane(c);
    std::fill(acc.begin(), acc.end(), p[0] + p[1] * s);
    k.axpy(acc.data(), x_t.plane(c).data(), p[2] + p[3] * s, h * w);
    k.axpy(acc.data(), y.plane(c).data(), p[4] + p[5] * s, h * w);
    const double* wts = p + 6;
    for (std::size_t i = 0; i < 2 * channels_; ++i) {
      const double* src = padded[i].data();
      for (std::size_t dy = 0; dy < 3; ++dy)
        for (std::size_t dx = 0; dx < 3; ++dx) {
          const double wv = wts[i * 9 + dy * 3 + dx];
          if (wv == 0.0) continue;
          for (std::size_t r = 0; r < h; ++r) k.axpy(acc.data() + r * w, src + (r + dy) * pw + dx, wv, w);
        }
    }
  }
  out.require_finite("ToyDenoiser");
  return out;
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

}  // namespace

void save_toy_denoiser(const ToyDenoiser& den, const std::filesystem::path& path) {
  std::vector<std::uint8_t> out(kParamMagic, kParamMagic + 4);
  const auto params = den.parameters();
  put_u32(out, static_cast<std::uint32_t>(den.channels()));
  put_u32(out, static_cast<std::uint32_t>(den.steps()));
  put_u32(out, static_cast<std::uint32_t>(params.size()));
  const auto* raw = reinterpret_cast<const std::uint8_t*>(params.data());
  out.insert(out.end(), raw, raw + params.size() * sizeof(double));
  write_file_atomic(path, out);
}

ToyDenoiser load_toy_denoiser(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  if (bytes.size() < 16 || std::memcmp(bytes.data(), kParamMagic, 4) != 0)
    fail_io(path.string() + ": not a denoiser parameter file");
  const std::size_t channels = get_u32(bytes.data() + 4), steps = get_u32(bytes.data() + 8);
  const std::size_t count = get_u32(bytes.data() + 12);
  if (bytes.size() != 16 + count * sizeof(double)) fail_io(path.string() + ": truncated parameter file");
  std::vector<double> params(count);
  std::memcpy(params.data(), bytes.data() + 16, count * sizeof(double));
  return ToyDenoiser(channels, steps, std::move(params));
}

}  // namespace samsr
