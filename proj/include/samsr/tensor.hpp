#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace samsr {

struct Shape {
  std::size_t channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;

  std::size_t plane() const noexcept { return height * width; }
  std::size_t size() const noexcept { return channels * height * width; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

// C x H x W raster of doubles, row-major per channel. Images use [0,1];
// diffusion states and noise fields are unbounded but always finite.
class ImageTensor {
 public:
  ImageTensor() = default;
  ImageTensor(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0);
  ImageTensor(Shape shape, std::vector<double> data);

  const Shape& shape() const noexcept { return shape_; }
  std::size_t channels() const noexcept { return shape_.channels; }
  std::size_t height() const noexcept { return shape_.height; }
  std::size_t width() const noexcept { return shape_.width; }
  std::size_t size() const noexcept { return data_.size(); }

  std::span<const double> values() const noexcept { return data_; }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> plane(std::size_t c) const noexcept {
    return std::span<const double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }
  std::span<double> plane(std::size_t c) noexcept {
    return std::span<double>(data_).subspan(c * shape_.plane(), shape_.plane());
  }

  double at(std::size_t c, std::size_t y, std::size_t x) const noexcept {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }
  double& at(std::size_t c, std::size_t y, std::size_t x) noexcept {
    return data_[(c * shape_.height + y) * shape_.width + x];
  }

  // Throws a numeric Error naming `context` if any value is NaN/Inf.
  void require_finite(const char* context) const;

  ImageTensor clamped(double lo = 0.0, double hi = 1.0) const;

  friend bool operator==(const ImageTensor&, const ImageTensor&) = default;

 private:
  Shape shape_{};
  std::vector<double> data_ = std::vector<double>(1, 0.0);
};

// M x H x W stack of masks. `binary` marks that every value is 0 or 1.
class MaskStack {
 public:
  MaskStack() = default;
  MaskStack(std::size_t count, std::size_t height, std::size_t width, bool binary = true);
  MaskStack(std::size_t count, std::size_t height, std::size_t width, std::vector<double> data, bool binary);

  std::size_t count() const noexcept { return count_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t plane() const noexcept { return height_ * width_; }
  bool binary() const noexcept { return binary_; }

  std::span<const double> values() const noexcept { return data_; }
  std::span<const double> mask(std::size_t m) const noexcept {
    return std::span<const double>(data_).subspan(m * plane(), plane());
  }
  std::span<double> mask(std::size_t m) noexcept { return std::span<double>(data_).subspan(m * plane(), plane()); }
  double at(std::size_t m, std::size_t y, std::size_t x) const noexcept {
    return data_[(m * height_ + y) * width_ + x];
  }

  // Appends one H x W mask; a non-binary value clears the binary flag.
  void push_back(std::span<const double> mask);

  // Per-pixel number of masks with value 1 (sum over the stack).
  std::vector<double> coverage() const;

  friend bool operator==(const MaskStack&, const MaskStack&) = default;

 private:
  std::size_t count_ = 0;
  std::size_t height_ = 1;
  std::size_t width_ = 1;
  bool binary_ = true;
  std::vector<double> data_;
};

}  // namespace samsr
