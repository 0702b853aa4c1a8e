#include <atomic>
#include <cstdlib>
#include <string_view>

#include "samsr/error.hpp"
#include "samsr/simd/kernels.hpp"

namespace samsr::simd {

#if !defined(__x86_64__) && !defined(_M_X64) && !defined(__aarch64__)
const KernelTable* avx2_kernels() { return nullptr; }
const KernelTable* neon_kernels() { return nullptr; }
#endif

namespace {

const KernelTable* pick() {
  const char* env = std::getenv("SAMSR_SIMD");
  const std::string_view want = env ? env : "auto";
  if (want == "scalar") return &scalar_kernels();
  if (want == "avx2" || want == "neon") {
    const KernelTable* t = want == "avx2" ? avx2_kernels() : neon_kernels();
    if (!t) fail_usage("SAMSR_SIMD=" + std::string(want) + " is not available on this machine");
    return t;
  }
  if (want != "auto") fail_usage("SAMSR_SIMD must be one of auto, scalar, avx2, neon");
  if (const KernelTable* t = avx2_kernels()) return t;
  if (const KernelTable* t = neon_kernels()) return t;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{pick()};
  return current;
}

}  // namespace

std::vector<const KernelTable*> available_kernels() {
  std::vector<const KernelTable*> out{&scalar_kernels()};
  if (const KernelTable* t = avx2_kernels()) out.push_back(t);
  if (const KernelTable* t = neon_kernels()) out.push_back(t);
  return out;
}

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_active(const KernelTable& table) { slot().store(&table, std::memory_order_release); }

}  // namespace samsr::simd
