#pragma once

#include <cstddef>
#include <functional>

#include "samsr/denoiser.hpp"
#include "samsr/rng.hpp"
#include "samsr/schedule.hpp"
#include "samsr/tensor.hpp"

namespace samsr {

// x_T = y + kappa_new * sqrt(eta_T_new) * eps, per channel.
ImageTensor forward_init(const ImageTensor& y, const ImageTensor& eps, const PixelSchedule& sched);

// x_t = x0 + eta_t_new (y - x0) + kappa_new sqrt(eta_t_new) eps, 1 <= t <= T.
ImageTensor forward_marginal(const ImageTensor& x0, const ImageTensor& y, std::size_t t, const ImageTensor& eps,
                             const PixelSchedule& sched);

// x_{t-1} = k x0_hat + m x_t + j y, pointwise.
ImageTensor reverse_step(const ImageTensor& x_t, const ImageTensor& x0_hat, const ImageTensor& y,
                         const ReverseCoeffs& coeffs);

// Called with (t, x_t) for every state from x_T down to x_1, then with
// (0, x0_hat) for the final prediction.
using TrajectoryObserver = std::function<void(std::size_t t, const ImageTensor& state)>;

// Full reverse chain from x_T: x_{t-1} = k_t f(x_t, y, t) + m_t x_t + j_t y for
// t = T..2, then x0_hat = f(x_1, y, 1).
ImageTensor reverse_chain(const Denoiser& den, const ImageTensor& x_T, const ImageTensor& y,
                          const PixelSchedule& sched, const TrajectoryObserver& observer = {});

// Semantic sampler: weights and noise from the masks, x_T per the pixel-wise
// schedule, then either the full chain (steps == T) or one call
// f(x_T, y, T) (steps == 1).
ImageTensor sample(const ImageTensor& y, const MaskStack& masks, const Denoiser& den, const ScheduleConfig& cfg,
                   const NoiseSeed& seed, std::size_t steps, const TrajectoryObserver& observer = {});

// Uniform-schedule baseline with global eta_t and kappa and plain
// standardized Gaussian noise, written with scalar arithmetic only.
ImageTensor sample_uniform_baseline(const ImageTensor& y, const Denoiser& den, const ScheduleConfig& cfg,
                                    const NoiseSeed& seed, std::size_t steps,
                                    const TrajectoryObserver& observer = {});

}  // namespace samsr
