#include "samsr/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "samsr/error.hpp"

namespace samsr {

namespace {

void check_dims(std::size_t h, std::size_t w, const char* what) {
  if (h == 0 || w == 0) fail_usage(std::string(what) + ": height and width must be >= 1");
}

}  // namespace

ImageTensor::ImageTensor(std::size_t channels, std::size_t height, std::size_t width, double fill)
    : shape_{channels, height, width} {
  check_dims(height, width, "ImageTensor");
  if (channels != 1 && channels != 3) fail_usage("ImageTensor: channels must be 1 or 3");
  if (!std::isfinite(fill)) fail_numeric("ImageTensor: non-finite fill value");
  data_.assign(shape_.size(), fill);
}

ImageTensor::ImageTensor(Shape shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  check_dims(shape.height, shape.width, "ImageTensor");
  if (shape.channels != 1 && shape.channels != 3) fail_usage("ImageTensor: channels must be 1 or 3");
  if (data_.size() != shape.size())
    fail_usage("ImageTensor: data length " + std::to_string(data_.size()) + " != " + std::to_string(shape.size()));
  require_finite("ImageTensor");
}

void ImageTensor::require_finite(const char* context) const {
  for (double v : data_) {
    if (!std::isfinite(v)) fail_numeric(std::string(context) + ": non-finite value");
  }
}

ImageTensor ImageTensor::clamped(double lo, double hi) const {
  ImageTensor out = *this;
  for (double& v : out.data_) v = std::clamp(v, lo, hi);
  return out;
}

MaskStack::MaskStack(std::size_t count, std::size_t height, std::size_t width, bool binary)
    : count_(count), height_(height), width_(width), binary_(binary), data_(count * height * width, 0.0) {
  check_dims(height, width, "MaskStack");
}

MaskStack::MaskStack(std::size_t count, std::size_t height, std::size_t width, std::vector<double> data, bool binary)
    : count_(count), height_(height), width_(width), binary_(binary), data_(std::move(data)) {
  check_dims(height, width, "MaskStack");
  if (data_.size() != count * height * width) fail_usage("MaskStack: data length does not match M x H x W");
  for (double v : data_) {
    if (!std::isfinite(v)) fail_numeric("MaskStack: non-finite value");
    if (binary_ && v != 0.0 && v != 1.0) fail_usage("MaskStack: binary stack holds a value outside {0,1}");
  }
}

void MaskStack::push_back(std::span<const double> mask) {
  if (mask.size() != plane()) fail_usage("MaskStack::push_back: mask size does not match H x W");
  for (double v : mask) {
    if (!std::isfinite(v)) fail_numeric("MaskStack::push_back: non-finite value");
    if (v != 0.0 && v != 1.0) binary_ = false;
  }
  data_.insert(data_.end(), mask.begin(), mask.end());
  ++count_;
}

std::vector<double> MaskStack::coverage() const {
  std::vector<double> cov(plane(), 0.0);
  for (std::size_t m = 0; m < count_; ++m) {
    auto mk = mask(m);
    for (std::size_t i = 0; i < cov.size(); ++i) cov[i] += mk[i];
  }
  return cov;
}

}  // namespace samsr
