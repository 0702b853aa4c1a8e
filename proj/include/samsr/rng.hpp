#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace samsr {

// Philox4x32-10 counter-based generator (Salmon et al., Random123).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) noexcept;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Independent 64-bit stream key for (parent, index); order-free by construction.
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t index) noexcept;

struct NoiseSeed {
  std::uint64_t master = 0;

  // Substream for mask m (or any other indexed consumer).
  std::uint64_t substream(std::uint64_t m) const noexcept { return derive_stream(master, m); }
  NoiseSeed child(std::uint64_t index) const noexcept { return NoiseSeed{derive_stream(master, index)}; }
};

// Standard normal variate number `index` of `stream` (Box-Muller over Philox;
// element 2b and 2b+1 share one Philox block). Pure in (stream, index).
double normal_at(std::uint64_t stream, std::uint64_t index) noexcept;

// out[i] = normal_at(stream, i) for all i.
void fill_normal(std::uint64_t stream, std::span<double> out) noexcept;

// Uniform in [0,1) with 53 random bits; pure in (stream, index).
double uniform_at(std::uint64_t stream, std::uint64_t index) noexcept;

}  // namespace samsr
