#include <algorithm>
#include <cmath>

#include "samsr/simd/kernels.hpp"

namespace samsr::simd {

namespace {

void axpy(double* acc, const double* x, double a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + a * x[i];
}

void adjust(const double* w, double eta, double kappa, double m, double eta_cap, double* eta_out, double* kappa_out,
            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double mw = m * w[i];
    eta_out[i] = std::min(eta * (1.0 + mw), eta_cap);
    kappa_out[i] = kappa * (1.0 - mw);
  }
}

void reverse_coeffs(const double* eta_prev, const double* eta_t, double* k, double* m, double* j, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = eta_prev[i], b = eta_t[i];
    const double geo = std::sqrt(a * b);
    const double ratio = std::sqrt(a / b);
    k[i] = ((1.0 - a) + geo) - ratio;
    m[i] = ratio;
    j[i] = a - geo;
  }
}

void noise_scale(const double* kappa, const double* eta, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = kappa[i] * std::sqrt(eta[i]);
}

void forward_init(const double* y, const double* scale, const double* eps, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = y[i] + scale[i] * eps[i];
}

void forward_marginal(const double* x0, const double* y, const double* eta, const double* scale, const double* eps,
                      double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (x0[i] + eta[i] * (y[i] - x0[i])) + scale[i] * eps[i];
}

void reverse_step(const double* k, const double* m, const double* j, const double* x0hat, const double* xt,
                  const double* y, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (k[i] * x0hat[i] + m[i] * xt[i]) + j[i] * y[i];
}

void masked_kahan_add(const double* mask, const double* z, double* sum, double* comp, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = mask[i] * z[i] - comp[i];
    const double t = sum[i] + v;
    comp[i] = (t - sum[i]) - v;
    sum[i] = t;
  }
}

void standardize(const double* x, double mu, double sigma, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (x[i] - mu) / sigma;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      "scalar",     axpy,         adjust,           reverse_coeffs,   noise_scale,
      forward_init, forward_marginal, reverse_step, masked_kahan_add, standardize,
  };
  return table;
}

}  // namespace samsr::simd
