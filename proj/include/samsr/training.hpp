#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "samsr/denoiser.hpp"
#include "samsr/rng.hpp"
#include "samsr/schedule.hpp"
#include "samsr/segmentation.hpp"
#include "samsr/tensor.hpp"

namespace samsr {

struct TrainingConfig {
  double lambda_sc = 1.0;
  double learning_rate = 1e-2;
  std::size_t iterations = 200;
  std::size_t batch_size = 16;
  double fd_epsilon = 1e-4;
  NoiseSeed seed{};
  ScheduleConfig schedule{};
  SegmenterConfig segmenter{};

  void validate() const;
};

struct LossReport {
  double l_distill = 0.0;
  double l_inverse = 0.0;
  double l_gt = 0.0;
  double l_sc = 0.0;
  double total = 0.0;
};

struct TrainingPair {
  ImageTensor x0;
  ImageTensor y;
};

double mse(const ImageTensor& a, const ImageTensor& b);
double mse(std::span<const double> a, std::span<const double> b);

// Full T-step reverse chain driven by the teacher; returns its x0_hat.
ImageTensor teacher_rollout(const Denoiser& teacher, const ImageTensor& x_T, const ImageTensor& y,
                            const PixelSchedule& sched);

// Weight map of an image as seen by the segmentation pipeline (toy segmenter
// on the [0,1]-clamped image; load mode makes no sense for predictions).
SemanticWeightMap semantic_weights(const ImageTensor& img, const SegmenterConfig& seg);

// MSE between the weight maps of the two images.
double semantic_consistency_loss(const ImageTensor& x0_hat, const ImageTensor& x0, const SegmenterConfig& seg);

// Everything in one loss evaluation that does not depend on the student:
// the noisy start x_T, the teacher's x0_hat and the ground-truth weights.
struct LossContext {
  ImageTensor x0;
  ImageTensor y;
  ImageTensor x_T;
  ImageTensor teacher_x0;
  SemanticWeightMap w_x0;
  std::size_t T = 1;
};

LossContext prepare_loss_context(const Denoiser& teacher, const TrainingPair& pair, const MaskStack& masks_y,
                                 const SemanticWeightMap& w_x0, const TrainingConfig& cfg, const NoiseSeed& seed);

// The four losses for one context. `detached_x_T_hat` is f_student(x0, y, 0)
// evaluated once at the base parameters and held fixed. With `with_sc` off
// the semantic term is skipped (l_sc = 0).
LossReport evaluate_losses(const Denoiser& student, const LossContext& ctx, const ImageTensor& detached_x_T_hat,
                           double lambda_sc, const SegmenterConfig& seg, bool with_sc = true);

// One complete evaluation (noise from cfg.seed).
LossReport compute_losses(const Denoiser& student, const Denoiser& teacher, const ImageTensor& x0, const ImageTensor& y,
                          const TrainingConfig& cfg);

// Central differences over every parameter of `base`; probes run through
// parallel_for and each writes only its own gradient entry.
std::vector<double> finite_difference_gradient(const Denoiser& base,
                                               const std::function<double(const Denoiser&)>& loss, double epsilon);

using TeacherFactory = std::function<std::shared_ptr<const Denoiser>(const TrainingPair&)>;
TeacherFactory oracle_teacher();
TeacherFactory fixed_teacher(std::shared_ptr<const Denoiser> teacher);

struct TrainingResult {
  ToyDenoiser student;
  std::vector<LossReport> history;  // batch-mean losses before each update
};

// Distillation loop. L_SC is piecewise constant in the parameters, so the
// descent direction uses its almost-everywhere derivative (zero): probes
// difference only the three smooth losses, while the history reports the
// full total. The student starts from the teacher's parameters when
// the teacher is a ToyDenoiser, from zeros otherwise.
TrainingResult train(const TrainingConfig& cfg, std::span<const TrainingPair> dataset, const TeacherFactory& teacher,
                     const std::function<void(std::size_t, const LossReport&)>& on_iteration = {});

struct PretrainResult {
  ToyDenoiser teacher;
  std::vector<double> history;
};

// Fits a ToyDenoiser teacher by minimizing MSE(f(x_t, y, t), x0) over
// forward-process states at a pseudo-random step per item and iteration.
PretrainResult pretrain_teacher(const TrainingConfig& cfg, std::span<const TrainingPair> dataset,
                                const std::function<void(std::size_t, double)>& on_iteration = {});

// Indices of the batch used at `iteration` (round-robin over the dataset).
std::vector<std::size_t> batch_indices(std::size_t iteration, std::size_t batch_size, std::size_t dataset_size);

}  // namespace samsr
