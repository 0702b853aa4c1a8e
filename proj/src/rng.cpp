#include "samsr/rng.hpp"

#include <cmath>
#include <numbers>

namespace samsr {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

std::array<std::uint32_t, 4> block(std::uint64_t stream, std::uint64_t b) noexcept {
  return philox4x32({static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32), 0u, 0u},
                    {static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)});
}

inline std::uint64_t bits53(std::uint32_t hi, std::uint32_t lo) noexcept {
  return ((std::uint64_t(hi) << 32) | lo) >> 11;
}

// Both Box-Muller outputs from one Philox block.
std::array<double, 2> normal_pair(std::uint64_t stream, std::uint64_t b) noexcept {
  const auto r = block(stream, b);
  const double u1 = static_cast<double>(bits53(r[0], r[1]) + 1) * kTwoPow53Inv;  // (0,1]
  const double u2 = static_cast<double>(bits53(r[2], r[3])) * kTwoPow53Inv;      // [0,1)
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(parent) ^ splitmix64(index + 0x632BE59BD9B4E019ull));
}

double normal_at(std::uint64_t stream, std::uint64_t index) noexcept {
  return normal_pair(stream, index >> 1)[index & 1u];
}

void fill_normal(std::uint64_t stream, std::span<double> out) noexcept {
  const std::size_t n = out.size();
  for (std::size_t b = 0; 2 * b < n; ++b) {
    const auto z = normal_pair(stream, b);
    out[2 * b] = z[0];
    if (2 * b + 1 < n) out[2 * b + 1] = z[1];
  }
}

double uniform_at(std::uint64_t stream, std::uint64_t index) noexcept {
  const auto r = block(stream, index);
  return static_cast<double>(bits53(r[0], r[1])) * kTwoPow53Inv;
}

}  // namespace samsr
