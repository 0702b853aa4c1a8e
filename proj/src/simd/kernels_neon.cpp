#include <arm_neon.h>

#include <algorithm>
#include <cmath>

#include "samsr/simd/kernels.hpp"

// AArch64 only (Advanced SIMD is mandatory there, so no runtime probe).
// vmulq/vaddq are used instead of vfmaq to keep scalar rounding.

namespace samsr::simd {

namespace {

constexpr std::size_t kLanes = 2;

void axpy(double* acc, const double* x, double a, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), vmulq_f64(va, vld1q_f64(x + i))));
  for (; i < n; ++i) acc[i] = acc[i] + a * x[i];
}

void adjust(const double* w, double eta, double kappa, double m, double eta_cap, double* eta_out, double* kappa_out,
            std::size_t n) {
  const float64x2_t veta = vdupq_n_f64(eta), vkappa = vdupq_n_f64(kappa), vm = vdupq_n_f64(m);
  const float64x2_t vcap = vdupq_n_f64(eta_cap), one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t mw = vmulq_f64(vm, vld1q_f64(w + i));
    vst1q_f64(eta_out + i, vminq_f64(vmulq_f64(veta, vaddq_f64(one, mw)), vcap));
    vst1q_f64(kappa_out + i, vmulq_f64(vkappa, vsubq_f64(one, mw)));
  }
  for (; i < n; ++i) {
    const double mw = m * w[i];
    eta_out[i] = std::min(eta * (1.0 + mw), eta_cap);
    kappa_out[i] = kappa * (1.0 - mw);
  }
}

void reverse_coeffs(const double* eta_prev, const double* eta_t, double* k, double* m, double* j, std::size_t n) {
  const float64x2_t one = vdupq_n_f64(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t a = vld1q_f64(eta_prev + i), b = vld1q_f64(eta_t + i);
    const float64x2_t geo = vsqrtq_f64(vmulq_f64(a, b));
    const float64x2_t ratio = vsqrtq_f64(vdivq_f64(a, b));
    vst1q_f64(k + i, vsubq_f64(vaddq_f64(vsubq_f64(one, a), geo), ratio));
    vst1q_f64(m + i, ratio);
    vst1q_f64(j + i, vsubq_f64(a, geo));
  }
  for (; i < n; ++i) {
    const double a = eta_prev[i], b = eta_t[i];
    const double geo = std::sqrt(a * b);
    const double ratio = std::sqrt(a / b);
    k[i] = ((1.0 - a) + geo) - ratio;
    m[i] = ratio;
    j[i] = a - geo;
  }
}

void noise_scale(const double* kappa, const double* eta, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vmulq_f64(vld1q_f64(kappa + i), vsqrtq_f64(vld1q_f64(eta + i))));
  for (; i < n; ++i) out[i] = kappa[i] * std::sqrt(eta[i]);
}

void forward_init(const double* y, const double* scale, const double* eps, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    vst1q_f64(out + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(vld1q_f64(scale + i), vld1q_f64(eps + i))));
  for (; i < n; ++i) out[i] = y[i] + scale[i] * eps[i];
}

void forward_marginal(const double* x0, const double* y, const double* eta, const double* scale, const double* eps,
                      double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t vx0 = vld1q_f64(x0 + i);
    const float64x2_t drift = vmulq_f64(vld1q_f64(eta + i), vsubq_f64(vld1q_f64(y + i), vx0));
    const float64x2_t noise = vmulq_f64(vld1q_f64(scale + i), vld1q_f64(eps + i));
    vst1q_f64(out + i, vaddq_f64(vaddq_f64(vx0, drift), noise));
  }
  for (; i < n; ++i) out[i] = (x0[i] + eta[i] * (y[i] - x0[i])) + scale[i] * eps[i];
}

void reverse_step(const double* k, const double* m, const double* j, const double* x0hat, const double* xt,
                  const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t a = vmulq_f64(vld1q_f64(k + i), vld1q_f64(x0hat + i));
    const float64x2_t b = vmulq_f64(vld1q_f64(m + i), vld1q_f64(xt + i));
    const float64x2_t c = vmulq_f64(vld1q_f64(j + i), vld1q_f64(y + i));
    vst1q_f64(out + i, vaddq_f64(vaddq_f64(a, b), c));
  }
  for (; i < n; ++i) out[i] = (k[i] * x0hat[i] + m[i] * xt[i]) + j[i] * y[i];
}

void masked_kahan_add(const double* mask, const double* z, double* sum, double* comp, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const float64x2_t s = vld1q_f64(sum + i);
    const float64x2_t v = vsubq_f64(vmulq_f64(vld1q_f64(mask + i), vld1q_f64(z + i)), vld1q_f64(comp + i));
    const float64x2_t t = vaddq_f64(s, v);
    vst1q_f64(comp + i, vsubq_f64(vsubq_f64(t, s), v));
    vst1q_f64(sum + i, t);
  }
  for (; i < n; ++i) {
    const double v = mask[i] * z[i] - comp[i];
    const double t = sum[i] + v;
    comp[i] = (t - sum[i]) - v;
    sum[i] = t;
  }
}

void standardize(const double* x, double mu, double sigma, double* out, std::size_t n) {
  const float64x2_t vmu = vdupq_n_f64(mu), vs = vdupq_n_f64(sigma);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) vst1q_f64(out + i, vdivq_f64(vsubq_f64(vld1q_f64(x + i), vmu), vs));
  for (; i < n; ++i) out[i] = (x[i] - mu) / sigma;
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{
      "neon",       axpy,         adjust,           reverse_coeffs,   noise_scale,
      forward_init, forward_marginal, reverse_step, masked_kahan_add, standardize,
  };
  return &table;
}

const KernelTable* avx2_kernels() { return nullptr; }

}  // namespace samsr::simd
