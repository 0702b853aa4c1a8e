#include "samsr/diffusion.hpp"

#include <cmath>
#include <string>

#include "samsr/error.hpp"
#include "samsr/sam_noise.hpp"
#include "samsr/simd/kernels.hpp"

namespace samsr {

namespace {

void require_same(const ImageTensor& a, const ImageTensor& b, const char* what) {
  if (a.shape() != b.shape()) fail_usage(std::string(what) + ": tensor shapes differ");
}

void require_fields(const ImageTensor& img, std::size_t plane, const char* what) {
  if (img.height() * img.width() != plane) fail_usage(std::string(what) + ": schedule built for a different size");
}

}  // namespace

ImageTensor forward_init(const ImageTensor& y, const ImageTensor& eps, const PixelSchedule& sched) {
  require_same(y, eps, "forward_init");
  require_fields(y, sched.plane(), "forward_init");
  const auto& k = simd::active();
  ImageTensor out(y.channels(), y.height(), y.width());
  for (std::size_t c = 0; c < y.channels(); ++c)
    k.forward_init(y.plane(c).data(), sched.init_scale.data(), eps.plane(c).data(), out.plane(c).data(),
                   sched.plane());
  out.require_finite("forward_init");
  return out;
}

ImageTensor forward_marginal(const ImageTensor& x0, const ImageTensor& y, std::size_t t, const ImageTensor& eps,
                             const PixelSchedule& sched) {
  require_same(x0, y, "forward_marginal");
  require_same(x0, eps, "forward_marginal");
  require_fields(y, sched.plane(), "forward_marginal");
  if (t < 1 || t > sched.T) fail_usage("forward_marginal: step out of range");
  const auto& k = simd::active();
  const auto& eta = sched.eta_at(t);
  std::vector<double> scale(sched.plane());
  k.noise_scale(sched.kappa.data(), eta.data(), scale.data(), scale.size());
  ImageTensor out(y.channels(), y.height(), y.width());
  for (std::size_t c = 0; c < y.channels(); ++c)
    k.forward_marginal(x0.plane(c).data(), y.plane(c).data(), eta.data(), scale.data(), eps.plane(c).data(),
                       out.plane(c).data(), sched.plane());
  out.require_finite("forward_marginal");
  return out;
}

ImageTensor reverse_step(const ImageTensor& x_t, const ImageTensor& x0_hat, const ImageTensor& y,
                         const ReverseCoeffs& coeffs) {
  require_same(x_t, x0_hat, "reverse_step");
  require_same(x_t, y, "reverse_step");
  const std::size_t plane = x_t.height() * x_t.width();
  if (coeffs.k.size() != plane) fail_usage("reverse_step: coefficient fields do not match the image");
  const auto& k = simd::active();
  ImageTensor out(y.channels(), y.height(), y.width());
  for (std::size_t c = 0; c < y.channels(); ++c)
    k.reverse_step(coeffs.k.data(), coeffs.m.data(), coeffs.j.data(), x0_hat.plane(c).data(), x_t.plane(c).data(),
                   y.plane(c).data(), out.plane(c).data(), plane);
  out.require_finite("reverse_step");
  return out;
}

ImageTensor reverse_chain(const Denoiser& den, const ImageTensor& x_T, const ImageTensor& y,
                          const PixelSchedule& sched, const TrajectoryObserver& observer) {
  ImageTensor x = x_T;
  for (std::size_t t = sched.T; t >= 2; --t) {
    if (observer) observer(t, x);
    x = reverse_step(x, den(x, y, t), y, sched.step(t));
  }
  if (observer) observer(1, x);
  ImageTensor x0_hat = den(x, y, 1);
  if (observer) observer(0, x0_hat);
  return x0_hat;
}

ImageTensor sample(const ImageTensor& y, const MaskStack& masks, const Denoiser& den, const ScheduleConfig& cfg,
                   const NoiseSeed& seed, std::size_t steps, const TrajectoryObserver& observer) {
  cfg.validate();
  if (steps != 1 && steps != cfg.T) fail_usage("sample: steps must be 1 or T (" + std::to_string(cfg.T) + ")");
  if (masks.height() != y.height() || masks.width() != y.width())
    fail_usage("sample: mask stack size differs from the image");
  const PixelSchedule sched = build_pixel_schedule(cfg, compute_weight_map(masks));
  const ImageTensor eps = sample_masked_noise(masks, y.channels(), seed);
  const ImageTensor x_T = forward_init(y, eps, sched);
  if (steps == cfg.T) return reverse_chain(den, x_T, y, sched, observer);
  if (observer) observer(cfg.T, x_T);
  ImageTensor x0_hat = den(x_T, y, cfg.T);
  if (observer) observer(0, x0_hat);
  return x0_hat;
}

ImageTensor sample_uniform_baseline(const ImageTensor& y, const Denoiser& den, const ScheduleConfig& cfg,
                                    const NoiseSeed& seed, std::size_t steps, const TrajectoryObserver& observer) {
  cfg.validate();
  if (steps != 1 && steps != cfg.T) fail_usage("sample: steps must be 1 or T (" + std::to_string(cfg.T) + ")");
  const std::vector<double> eta = build_schedule(cfg);
  const ImageTensor eps = standard_noise(y.channels(), y.height(), y.width(), seed);

  ImageTensor x(y.channels(), y.height(), y.width());
  const double scale = cfg.kappa * std::sqrt(eta.back());
  for (std::size_t i = 0; i < x.size(); ++i) x.values()[i] = y.values()[i] + scale * eps.values()[i];

  const std::size_t T = cfg.T;
  if (steps == 1) {
    if (observer) observer(T, x);
    ImageTensor x0_hat = den(x, y, T);
    if (observer) observer(0, x0_hat);
    return x0_hat;
  }
  for (std::size_t t = T; t >= 2; --t) {
    if (observer) observer(t, x);
    const double a = eta[t - 2], b = eta[t - 1];
    const double geo = std::sqrt(a * b);
    const double mt = std::sqrt(a / b);
    const double kt = ((1.0 - a) + geo) - mt;
    const double jt = a - geo;
    const ImageTensor pred = den(x, y, t);
    ImageTensor next(y.channels(), y.height(), y.width());
    for (std::size_t i = 0; i < x.size(); ++i)
      next.values()[i] = (kt * pred.values()[i] + mt * x.values()[i]) + jt * y.values()[i];
    x = std::move(next);
  }
  if (observer) observer(1, x);
  ImageTensor x0_hat = den(x, y, 1);
  if (observer) observer(0, x0_hat);
  return x0_hat;
}

}  // namespace samsr
