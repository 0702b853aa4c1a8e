#pragma once

#include <cstddef>
#include <vector>

#include "samsr/tensor.hpp"

namespace samsr {

struct ScheduleConfig {
  std::size_t T = 15;
  double eta_1 = 0.0016;
  double eta_T = 0.9999;
  double p = 0.3;  // warp exponent of the sqrt-eta geometric progression
  double kappa = 2.0;
  double m_hyper = 0.2;
  bool clamp_eta = false;

  void validate() const;
};

// Cap applied to adjusted eta when clamp_eta is on.
inline constexpr double kEtaClampCap = 1.0 - 1e-6;

// Base schedule eta_1..eta_T (index 0 holds eta_1):
// sqrt(eta_t) = sqrt(eta_1) * (sqrt(eta_T)/sqrt(eta_1))^(((t-1)/(T-1))^p).
// T = 1 yields the single value eta_T.
std::vector<double> build_schedule(const ScheduleConfig& cfg);

// H x W semantic weights in [0,1]: mask coverage divided by its maximum.
struct SemanticWeightMap {
  std::size_t height = 1;
  std::size_t width = 1;
  std::vector<double> values;
};

// W = coverage / max coverage; W = 0 everywhere when nothing is covered.
SemanticWeightMap compute_weight_map(const MaskStack& masks);

struct AdjustedFields {
  std::vector<double> eta;
  std::vector<double> kappa;
};

// eta_new = eta_t * (1 + m W), kappa_new = kappa * (1 - m W); eta_new capped at
// 1 - 1e-6 when clamp is set.
AdjustedFields adjust(double eta_t, double kappa, const SemanticWeightMap& w, double m_hyper, bool clamp);

struct ReverseCoeffs {
  std::vector<double> k, m, j;
};

// Pointwise reverse-step weights combining x0_hat, x_t and y; k + m + j = 1.
ReverseCoeffs reverse_coeffs(const std::vector<double>& eta_prev, const std::vector<double>& eta_t);

// Per-pixel schedule for one image. eta[t-1] holds the field for step t
// (t = 1..T); coeffs[t-2] holds the reverse weights for step t (t = 2..T).
struct PixelSchedule {
  std::size_t T = 1;
  std::size_t height = 1;
  std::size_t width = 1;
  std::vector<double> base_eta;
  std::vector<std::vector<double>> eta;
  std::vector<double> kappa;
  std::vector<ReverseCoeffs> coeffs;
  // kappa_new * sqrt(eta_T_new), the noise amplitude of the initial state.
  std::vector<double> init_scale;

  std::size_t plane() const noexcept { return height * width; }
  const ReverseCoeffs& step(std::size_t t) const { return coeffs.at(t - 2); }
  const std::vector<double>& eta_at(std::size_t t) const { return eta.at(t - 1); }
};

PixelSchedule build_pixel_schedule(const ScheduleConfig& cfg, const SemanticWeightMap& w);

}  // namespace samsr
