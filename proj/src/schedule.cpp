#include "samsr/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "samsr/error.hpp"
#include "samsr/simd/kernels.hpp"

namespace samsr {

void ScheduleConfig::validate() const {
  if (T < 1) fail_usage("schedule: T must be >= 1");
  if (!(eta_1 > 0.0 && eta_1 < eta_T && eta_T <= 1.0)) fail_usage("schedule: need 0 < eta_1 < eta_T <= 1");
  if (!(kappa > 0.0)) fail_usage("schedule: kappa must be > 0");
  if (!(m_hyper >= 0.0 && m_hyper < 1.0)) fail_usage("schedule: m_hyper must lie in [0,1)");
  if (!(p > 0.0)) fail_usage("schedule: p must be > 0");
}

std::vector<double> build_schedule(const ScheduleConfig& cfg) {
  cfg.validate();
  if (cfg.T == 1) return {cfg.eta_T};
  std::vector<double> eta(cfg.T);
  const double s1 = std::sqrt(cfg.eta_1);
  const double ratio = std::sqrt(cfg.eta_T) / s1;
  for (std::size_t t = 1; t <= cfg.T; ++t) {
    const double frac = static_cast<double>(t - 1) / static_cast<double>(cfg.T - 1);
    const double s = s1 * std::pow(ratio, std::pow(frac, cfg.p));
    eta[t - 1] = s * s;
  }
  // Pin the endpoints exactly; the closed form can be off by an ulp there.
  eta.front() = cfg.eta_1;
  eta.back() = cfg.eta_T;
  return eta;
}

SemanticWeightMap compute_weight_map(const MaskStack& masks) {
  if (!masks.binary()) fail_usage("compute_weight_map: mask stack must be binary");
  SemanticWeightMap w{masks.height(), masks.width(), masks.coverage()};
  const double peak = w.values.empty() ? 0.0 : *std::max_element(w.values.begin(), w.values.end());
  if (peak > 0.0)
    for (double& v : w.values) v /= peak;
  return w;
}

AdjustedFields adjust(double eta_t, double kappa, const SemanticWeightMap& w, double m_hyper, bool clamp) {
  const std::size_t n = w.values.size();
  AdjustedFields f{std::vector<double>(n), std::vector<double>(n)};
  const double cap = clamp ? kEtaClampCap : std::numeric_limits<double>::infinity();
  simd::active().adjust(w.values.data(), eta_t, kappa, m_hyper, cap, f.eta.data(), f.kappa.data(), n);
  return f;
}

ReverseCoeffs reverse_coeffs(const std::vector<double>& eta_prev, const std::vector<double>& eta_t) {
  if (eta_prev.size() != eta_t.size()) fail_usage("reverse_coeffs: field size mismatch");
  for (std::size_t i = 0; i < eta_t.size(); ++i)
    if (!(eta_prev[i] > 0.0 && eta_t[i] > 0.0)) fail_numeric("reverse_coeffs: eta fields must be strictly positive");
  const std::size_t n = eta_t.size();
  ReverseCoeffs c{std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
  simd::active().reverse_coeffs(eta_prev.data(), eta_t.data(), c.k.data(), c.m.data(), c.j.data(), n);
  return c;
}

PixelSchedule build_pixel_schedule(const ScheduleConfig& cfg, const SemanticWeightMap& w) {
  PixelSchedule s;
  s.T = cfg.T;
  s.height = w.height;
  s.width = w.width;
  s.base_eta = build_schedule(cfg);
  s.eta.reserve(cfg.T);
  for (std::size_t t = 1; t <= cfg.T; ++t) {
    AdjustedFields f = adjust(s.base_eta[t - 1], cfg.kappa, w, cfg.m_hyper, cfg.clamp_eta);
    s.eta.push_back(std::move(f.eta));
    // kappa_new carries no step index; every step yields the same field.
    if (t == 1) s.kappa = std::move(f.kappa);
  }
  for (std::size_t t = 2; t <= cfg.T; ++t) s.coeffs.push_back(reverse_coeffs(s.eta[t - 2], s.eta[t - 1]));
  s.init_scale.resize(s.plane());
  simd::active().noise_scale(s.kappa.data(), s.eta.back().data(), s.init_scale.data(), s.plane());
  return s;
}

}  // namespace samsr
