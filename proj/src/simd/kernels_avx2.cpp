#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "samsr/simd/kernels.hpp"

// Built without -mavx2: each function carries its own target attribute and
// is only reached after the runtime CPU check in avx2_kernels().
#define SAMSR_AVX2 __attribute__((target("avx2")))

namespace samsr::simd {

namespace {

constexpr std::size_t kLanes = 4;

SAMSR_AVX2 void axpy(double* acc, const double* x, double a, std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(acc + i), _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(acc + i, r);
  }
  for (; i < n; ++i) acc[i] = acc[i] + a * x[i];
}

SAMSR_AVX2 void adjust(const double* w, double eta, double kappa, double m, double eta_cap, double* eta_out,
                       double* kappa_out, std::size_t n) {
  const __m256d veta = _mm256_set1_pd(eta), vkappa = _mm256_set1_pd(kappa), vm = _mm256_set1_pd(m);
  const __m256d vcap = _mm256_set1_pd(eta_cap), one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d mw = _mm256_mul_pd(vm, _mm256_loadu_pd(w + i));
    _mm256_storeu_pd(eta_out + i, _mm256_min_pd(_mm256_mul_pd(veta, _mm256_add_pd(one, mw)), vcap));
    _mm256_storeu_pd(kappa_out + i, _mm256_mul_pd(vkappa, _mm256_sub_pd(one, mw)));
  }
  for (; i < n; ++i) {
    const double mw = m * w[i];
    eta_out[i] = std::min(eta * (1.0 + mw), eta_cap);
    kappa_out[i] = kappa * (1.0 - mw);
  }
}

SAMSR_AVX2 void reverse_coeffs(const double* eta_prev, const double* eta_t, double* k, double* m, double* j,
                               std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_loadu_pd(eta_prev + i), b = _mm256_loadu_pd(eta_t + i);
    const __m256d geo = _mm256_sqrt_pd(_mm256_mul_pd(a, b));
    const __m256d ratio = _mm256_sqrt_pd(_mm256_div_pd(a, b));
    _mm256_storeu_pd(k + i, _mm256_sub_pd(_mm256_add_pd(_mm256_sub_pd(one, a), geo), ratio));
    _mm256_storeu_pd(m + i, ratio);
    _mm256_storeu_pd(j + i, _mm256_sub_pd(a, geo));
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

SAMSR_AVX2 void noise_scale(const double* kappa, const double* eta, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(kappa + i), _mm256_sqrt_pd(_mm256_loadu_pd(eta + i))));
  for (; i < n; ++i) out[i] = kappa[i] * std::sqrt(eta[i]);
}

SAMSR_AVX2 void forward_init(const double* y, const double* scale, const double* eps, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d s = _mm256_mul_pd(_mm256_loadu_pd(scale + i), _mm256_loadu_pd(eps + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_loadu_pd(y + i), s));
  }
  for (; i < n; ++i) out[i] = y[i] + scale[i] * eps[i];
}

SAMSR_AVX2 void forward_marginal(const double* x0, const double* y, const double* eta, const double* scale,
                                 const double* eps, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d vx0 = _mm256_loadu_pd(x0 + i);
    const __m256d drift = _mm256_mul_pd(_mm256_loadu_pd(eta + i), _mm256_sub_pd(_mm256_loadu_pd(y + i), vx0));
    const __m256d noise = _mm256_mul_pd(_mm256_loadu_pd(scale + i), _mm256_loadu_pd(eps + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_add_pd(vx0, drift), noise));
  }
  for (; i < n; ++i) out[i] = (x0[i] + eta[i] * (y[i] - x0[i])) + scale[i] * eps[i];
}

SAMSR_AVX2 void reverse_step(const double* k, const double* m, const double* j, const double* x0hat, const double* xt,
                             const double* y, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d a = _mm256_mul_pd(_mm256_loadu_pd(k + i), _mm256_loadu_pd(x0hat + i));
    const __m256d b = _mm256_mul_pd(_mm256_loadu_pd(m + i), _mm256_loadu_pd(xt + i));
    const __m256d c = _mm256_mul_pd(_mm256_loadu_pd(j + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_add_pd(_mm256_add_pd(a, b), c));
  }
  for (; i < n; ++i) out[i] = (k[i] * x0hat[i] + m[i] * xt[i]) + j[i] * y[i];
}

SAMSR_AVX2 void masked_kahan_add(const double* mask, const double* z, double* sum, double* comp, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d s = _mm256_loadu_pd(sum + i);
    const __m256d v =
        _mm256_sub_pd(_mm256_mul_pd(_mm256_loadu_pd(mask + i), _mm256_loadu_pd(z + i)), _mm256_loadu_pd(comp + i));
    const __m256d t = _mm256_add_pd(s, v);
    _mm256_storeu_pd(comp + i, _mm256_sub_pd(_mm256_sub_pd(t, s), v));
    _mm256_storeu_pd(sum + i, t);
  }
  for (; i < n; ++i) {
    const double v = mask[i] * z[i] - comp[i];
    const double t = sum[i] + v;
    comp[i] = (t - sum[i]) - v;
    sum[i] = t;
  }
}

SAMSR_AVX2 void standardize(const double* x, double mu, double sigma, double* out, std::size_t n) {
  const __m256d vmu = _mm256_set1_pd(mu), vs = _mm256_set1_pd(sigma);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    _mm256_storeu_pd(out + i, _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(x + i), vmu), vs));
  for (; i < n; ++i) out[i] = (x[i] - mu) / sigma;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{
      "avx2",       axpy,         adjust,           reverse_coeffs,   noise_scale,
      forward_init, forward_marginal, reverse_step, masked_kahan_add, standardize,
  };
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

const KernelTable* neon_kernels() { return nullptr; }

}  // namespace samsr::simd
