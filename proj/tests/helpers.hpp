#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <unistd.h>
#include <algorithm>
#include <string>
#include <vector>

#include "samsr/tensor.hpp"

namespace samsr::test {

inline ImageTensor random_image(std::size_t c, std::size_t h, std::size_t w, std::uint64_t seed, double lo = 0.0,
                                double hi = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  ImageTensor img(c, h, w);
  for (double& v : img.values()) v = u(gen);
  return img;
}

// Each mask independently covers each pixel with probability `density`.
inline MaskStack random_stack(std::size_t m, std::size_t h, std::size_t w, std::uint64_t seed, double density = 0.4) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution b(density);
  std::vector<double> data(m * h * w);
  for (double& v : data) v = b(gen) ? 1.0 : 0.0;
  return MaskStack(m, h, w, std::move(data), true);
}

// Stack whose per-pixel coverage equals `counts` (row-major H x W).
inline MaskStack stack_with_coverage(const std::vector<int>& counts, std::size_t h, std::size_t w) {
  int top = 0;
  for (int c : counts) top = std::max(top, c);
  MaskStack s(0, h, w);
  for (int m = 0; m < top; ++m) {
    std::vector<double> mask(h * w);
    for (std::size_t i = 0; i < h * w; ++i) mask[i] = counts[i] > m ? 1.0 : 0.0;
    s.push_back(mask);
  }
  return s;
}

// Left half `a`, right half `b`.
inline ImageTensor half_half(std::size_t c, std::size_t h, std::size_t w, double a, double b) {
  ImageTensor img(c, h, w);
  for (std::size_t ch = 0; ch < c; ++ch)
    for (std::size_t y = 0; y < h; ++y)
      for (std::size_t x = 0; x < w; ++x) img.at(ch, y, x) = x < w / 2 ? a : b;
  return img;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("samsr_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Copies the values so a range-for over a temporary stays valid.
template <class T>
std::vector<double> values_of(const T& t) {
  return {t.values().begin(), t.values().end()};
}

}  // namespace samsr::test
