#include "samsr/training.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "samsr/diffusion.hpp"
#include "samsr/error.hpp"
#include "samsr/parallel.hpp"
#include "samsr/sam_noise.hpp"

namespace samsr {

void TrainingConfig::validate() const {
  if (!(lambda_sc >= 0.0)) fail_usage("training: lambda_sc must be >= 0");
  if (!(fd_epsilon > 0.0)) fail_usage("training: fd_epsilon must be > 0");
  if (iterations < 1) fail_usage("training: iterations must be >= 1");
  if (batch_size < 1) fail_usage("training: batch_size must be >= 1");
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) fail_usage("training: learning_rate must be >= 0");
  schedule.validate();
  segmenter.validate();
}

double mse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) fail_usage("mse: operands differ in size");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

double mse(const ImageTensor& a, const ImageTensor& b) {
  if (a.shape() != b.shape()) fail_usage("mse: tensor shapes differ");
  return mse(a.values(), b.values());
}

ImageTensor teacher_rollout(const Denoiser& teacher, const ImageTensor& x_T, const ImageTensor& y,
                            const PixelSchedule& sched) {
  return reverse_chain(teacher, x_T, y, sched);
}

SemanticWeightMap semantic_weights(const ImageTensor& img, const SegmenterConfig& seg) {
  SegmenterConfig toy = seg;
  toy.mode = SegmenterMode::Toy;
  return compute_weight_map(mask_pipeline(img.clamped(0.0, 1.0), toy));
}

double semantic_consistency_loss(const ImageTensor& x0_hat, const ImageTensor& x0, const SegmenterConfig& seg) {
  if (x0_hat.shape() != x0.shape()) fail_usage("semantic_consistency_loss: shapes differ");
  return mse(semantic_weights(x0_hat, seg).values, semantic_weights(x0, seg).values);
}

namespace {

void finalize(LossReport& r, double lambda_sc) { r.total = r.l_distill + r.l_inverse + r.l_gt + lambda_sc * r.l_sc; }

LossReport batch_mean(const std::vector<LossReport>& items, double lambda_sc) {
  LossReport r;
  for (const auto& it : items) {
    r.l_distill += it.l_distill;
    r.l_inverse += it.l_inverse;
    r.l_gt += it.l_gt;
    r.l_sc += it.l_sc;
  }
  const double n = static_cast<double>(items.size());
  r.l_distill /= n;
  r.l_inverse /= n;
  r.l_gt /= n;
  r.l_sc /= n;
  finalize(r, lambda_sc);
  return r;
}

void require_finite_loss(double v, std::size_t iteration) {
  if (!std::isfinite(v)) fail_numeric("training diverged: non-finite loss at iteration " + std::to_string(iteration));
}

}  // namespace

LossContext prepare_loss_context(const Denoiser& teacher, const TrainingPair& pair, const MaskStack& masks_y,
                                 const SemanticWeightMap& w_x0, const TrainingConfig& cfg, const NoiseSeed& seed) {
  if (pair.x0.shape() != pair.y.shape()) fail_usage("training pair: x0 and y shapes differ");
  const PixelSchedule sched = build_pixel_schedule(cfg.schedule, compute_weight_map(masks_y));
  const ImageTensor eps = sample_masked_noise(masks_y, pair.y.channels(), seed);
  // x_T = y + eps with eps ~ N(0, kappa_new^2 eta_T_new), realized as the
  // pixel-wise scaling of the standardized mask noise.
  ImageTensor x_T = forward_init(pair.y, eps, sched);
  ImageTensor teacher_x0 = teacher_rollout(teacher, x_T, pair.y, sched);
  return LossContext{pair.x0, pair.y, std::move(x_T), std::move(teacher_x0), w_x0, cfg.schedule.T};
}

LossReport evaluate_losses(const Denoiser& student, const LossContext& ctx, const ImageTensor& detached_x_T_hat,
                           double lambda_sc, const SegmenterConfig& seg, bool with_sc) {
  LossReport r;
  const ImageTensor pred = student(ctx.x_T, ctx.y, ctx.T);
  r.l_distill = mse(pred, ctx.teacher_x0);
  r.l_inverse = mse(student(ctx.teacher_x0, ctx.y, 0), ctx.x_T);
  r.l_gt = mse(student(detached_x_T_hat, ctx.y, ctx.T), ctx.x0);
  if (with_sc) r.l_sc = mse(semantic_weights(pred, seg).values, ctx.w_x0.values);
  finalize(r, lambda_sc);
  return r;
}

LossReport compute_losses(const Denoiser& student, const Denoiser& teacher, const ImageTensor& x0, const ImageTensor& y,
                          const TrainingConfig& cfg) {
  cfg.validate();
  const TrainingPair pair{x0, y};
  const MaskStack masks_y = mask_pipeline(y, cfg.segmenter);
  const LossContext ctx =
      prepare_loss_context(teacher, pair, masks_y, semantic_weights(x0, cfg.segmenter), cfg, cfg.seed);
  const ImageTensor detached = student(x0, y, 0);
  return evaluate_losses(student, ctx, detached, cfg.lambda_sc, cfg.segmenter);
}

std::vector<double> finite_difference_gradient(const Denoiser& base,
                                               const std::function<double(const Denoiser&)>& loss, double epsilon) {
  const std::vector<double> theta = base.parameters();
  std::vector<double> grad(theta.size(), 0.0);
  parallel_for(theta.size(), [&](std::size_t i) {
    auto probe = base.clone();
    std::vector<double> p = theta;
    p[i] = theta[i] + epsilon;
    probe->set_parameters(p);
    const double up = loss(*probe);
    p[i] = theta[i] - epsilon;
    probe->set_parameters(p);
    const double down = loss(*probe);
    grad[i] = (up - down) / (2.0 * epsilon);
  });
  return grad;
}

TeacherFactory oracle_teacher() {
  return [](const TrainingPair& pair) -> std::shared_ptr<const Denoiser> {
    return std::make_shared<OracleDenoiser>(pair.x0);
  };
}

TeacherFactory fixed_teacher(std::shared_ptr<const Denoiser> teacher) {
  return [teacher = std::move(teacher)](const TrainingPair&) { return teacher; };
}

std::vector<std::size_t> batch_indices(std::size_t iteration, std::size_t batch_size, std::size_t dataset_size) {
  std::vector<std::size_t> idx;
  if (batch_size >= dataset_size) {
    for (std::size_t i = 0; i < dataset_size; ++i) idx.push_back(i);
    return idx;
  }
  const std::size_t start = (iteration * batch_size) % dataset_size;
  for (std::size_t k = 0; k < batch_size; ++k) idx.push_back((start + k) % dataset_size);
  return idx;
}

namespace {

struct ItemCache {
  std::shared_ptr<const Denoiser> teacher;
  MaskStack masks_y;
  SemanticWeightMap w_x0;
};

std::vector<ItemCache> build_cache(std::span<const TrainingPair> dataset, const TrainingConfig& cfg,
                                   const TeacherFactory* teacher) {
  std::vector<ItemCache> cache(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const auto& pair = dataset[i];
    if (pair.x0.shape() != pair.y.shape()) fail_usage("dataset item " + std::to_string(i) + ": x0 and y shapes differ");
    if (pair.x0.channels() != dataset[0].x0.channels())
      fail_usage("dataset item " + std::to_string(i) + ": channel count differs from item 0");
    cache[i].masks_y = mask_pipeline(pair.y, cfg.segmenter);
    if (teacher) {
      cache[i].teacher = (*teacher)(pair);
      cache[i].w_x0 = semantic_weights(pair.x0, cfg.segmenter);
    }
  }
  return cache;
}

void gradient_step(ToyDenoiser& model, const std::vector<double>& grad, double lr) {
  std::vector<double> theta = model.parameters();
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] -= lr * grad[i];
  model.set_parameters(theta);
}

}  // namespace

TrainingResult train(const TrainingConfig& cfg, std::span<const TrainingPair> dataset, const TeacherFactory& teacher,
                     const std::function<void(std::size_t, const LossReport&)>& on_iteration) {
  cfg.validate();
  if (dataset.empty()) fail_usage("train: dataset is empty");
  const std::vector<ItemCache> cache = build_cache(dataset, cfg, &teacher);

  const std::size_t channels = dataset[0].x0.channels();
  ToyDenoiser student(channels, cfg.schedule.T);
  if (const auto* toy = dynamic_cast<const ToyDenoiser*>(cache[0].teacher.get())) {
    if (toy->channels() != channels) fail_usage("train: teacher channel count differs from the dataset");
    student.set_parameters(toy->parameters());
  }

  // Noise, x_T and the teacher target are fixed per item: item i always uses
  // cfg.seed.child(i), so the objective is a deterministic function of the
  // student parameters.
  std::vector<LossContext> contexts(dataset.size());
  parallel_for(dataset.size(), [&](std::size_t i) {
    contexts[i] = prepare_loss_context(*cache[i].teacher, dataset[i], cache[i].masks_y, cache[i].w_x0, cfg,
                                       cfg.seed.child(i));
  });

  TrainingResult result{student, {}};
  result.history.reserve(cfg.iterations);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const auto idx = batch_indices(it, cfg.batch_size, dataset.size());
    std::vector<const LossContext*> ctx(idx.size());
    std::vector<ImageTensor> detached(idx.size());
    for (std::size_t b = 0; b < idx.size(); ++b) {
      ctx[b] = &contexts[idx[b]];
      // Held fixed for every probe below (detach).
      detached[b] = result.student(dataset[idx[b]].x0, dataset[idx[b]].y, 0);
    }

    auto batch_report = [&](const Denoiser& den, bool with_sc) {
      std::vector<LossReport> items(idx.size());
      for (std::size_t b = 0; b < idx.size(); ++b)
        items[b] = evaluate_losses(den, *ctx[b], detached[b], cfg.lambda_sc, cfg.segmenter, with_sc);
      return batch_mean(items, cfg.lambda_sc);
    };

    const LossReport report = batch_report(result.student, true);
    require_finite_loss(report.total, it);
    result.history.push_back(report);
    if (on_iteration) on_iteration(it, report);

    const auto grad = finite_difference_gradient(
        result.student, [&](const Denoiser& den) { return batch_report(den, false).total; }, cfg.fd_epsilon);
    for (double g : grad) require_finite_loss(g, it);
    gradient_step(result.student, grad, cfg.learning_rate);
  }
  return result;
}

PretrainResult pretrain_teacher(const TrainingConfig& cfg, std::span<const TrainingPair> dataset,
                                const std::function<void(std::size_t, double)>& on_iteration) {
  cfg.validate();
  if (dataset.empty()) fail_usage("pretrain_teacher: dataset is empty");
  const std::vector<ItemCache> cache = build_cache(dataset, cfg, nullptr);
  const std::size_t channels = dataset[0].x0.channels();
  const std::size_t T = cfg.schedule.T;
  std::vector<PixelSchedule> scheds;
  for (const auto& item : cache) scheds.push_back(build_pixel_schedule(cfg.schedule, compute_weight_map(item.masks_y)));

  PretrainResult result{ToyDenoiser(channels, T, ToyDenoiser::passthrough_y(channels)), {}};
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    const auto idx = batch_indices(it, cfg.batch_size, dataset.size());
    const NoiseSeed iter_seed = cfg.seed.child(it);
    std::vector<ImageTensor> states(idx.size());
    std::vector<std::size_t> steps(idx.size());
    for (std::size_t b = 0; b < idx.size(); ++b) {
      const NoiseSeed s = iter_seed.child(idx[b]);
      steps[b] = 1 + std::min(T - 1, static_cast<std::size_t>(uniform_at(s.substream(~0ull), 0) * T));
      const ImageTensor eps = sample_masked_noise(cache[idx[b]].masks_y, channels, s);
      states[b] = forward_marginal(dataset[idx[b]].x0, dataset[idx[b]].y, steps[b], eps, scheds[idx[b]]);
    }
    auto loss = [&](const Denoiser& den) {
      double sum = 0.0;
      for (std::size_t b = 0; b < idx.size(); ++b)
        sum += mse(den(states[b], dataset[idx[b]].y, steps[b]), dataset[idx[b]].x0);
      return sum / static_cast<double>(idx.size());
    };
    const double value = loss(result.teacher);
    require_finite_loss(value, it);
    result.history.push_back(value);
    if (on_iteration) on_iteration(it, value);
    const auto grad = finite_difference_gradient(result.teacher, loss, cfg.fd_epsilon);
    for (double g : grad) require_finite_loss(g, it);
    gradient_step(result.teacher, grad, cfg.learning_rate);
  }
  return result;
}

}  // namespace samsr
