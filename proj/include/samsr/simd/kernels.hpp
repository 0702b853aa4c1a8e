#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace samsr::simd {

// Element-wise kernels for the pixel-wise diffusion arithmetic. Every
// variant evaluates the same expression tree per element with plain IEEE
// multiply/add/divide/sqrt (no FMA), so all variants are bit-identical to
// the scalar reference. Reductions stay scalar on purpose: vector lanes
// would reorder the sum.
struct KernelTable {
  std::string_view name;

  // acc[i] += a * x[i]
  void (*axpy)(double* acc, const double* x, double a, std::size_t n);

  // eta_out[i] = min(eta * (1 + m * w[i]), eta_cap); kappa_out[i] = kappa * (1 - m * w[i])
  void (*adjust)(const double* w, double eta, double kappa, double m, double eta_cap, double* eta_out,
                 double* kappa_out, std::size_t n);

  // k = ((1 - a) + sqrt(a*b)) - sqrt(a/b); m = sqrt(a/b); j = a - sqrt(a*b)
  // with a = eta_prev[i], b = eta_t[i].
  void (*reverse_coeffs)(const double* eta_prev, const double* eta_t, double* k, double* m, double* j, std::size_t n);

  // out[i] = kappa[i] * sqrt(eta[i])
  void (*noise_scale)(const double* kappa, const double* eta, double* out, std::size_t n);

  // out[i] = y[i] + scale[i] * eps[i]
  void (*forward_init)(const double* y, const double* scale, const double* eps, double* out, std::size_t n);

  // out[i] = (x0[i] + eta[i] * (y[i] - x0[i])) + scale[i] * eps[i]
  void (*forward_marginal)(const double* x0, const double* y, const double* eta, const double* scale,
                           const double* eps, double* out, std::size_t n);

  // out[i] = (k[i] * x0hat[i] + m[i] * xt[i]) + j[i] * y[i]
  void (*reverse_step)(const double* k, const double* m, const double* j, const double* x0hat, const double* xt,
                       const double* y, double* out, std::size_t n);

  // Kahan step adding mask[i] * z[i] into (sum, comp).
  void (*masked_kahan_add)(const double* mask, const double* z, double* sum, double* comp, std::size_t n);

  // out[i] = (x[i] - mu) / sigma
  void (*standardize)(const double* x, double mu, double sigma, double* out, std::size_t n);
};

const KernelTable& scalar_kernels();

// Null when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

// Every variant usable on this machine, scalar first.
std::vector<const KernelTable*> available_kernels();

// The table used by the library. Chosen once: the widest available variant,
// unless SAMSR_SIMD names one of "scalar", "avx2", "neon".
const KernelTable& active();

// Overrides the active table (tests and benchmarks).
void set_active(const KernelTable& table);

}  // namespace samsr::simd
