#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "samsr/cli.hpp"
#include "samsr/diffusion.hpp"
#include "samsr/error.hpp"
#include "samsr/image_io.hpp"
#include "samsr/metrics.hpp"
#include "samsr/parallel.hpp"
#include "samsr/resample.hpp"
#include "samsr/sam_noise.hpp"
#include "samsr/synthetic.hpp"

namespace fs = std::filesystem;

namespace samsr::cli {

namespace {

struct Context {
  RunConfig cfg;
  std::ostream& out;
  std::ostream& err;
};

std::string fmt(const char* pattern, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

const std::string& need(const std::string& value, const char* key) {
  if (value.empty()) fail_usage("missing required setting --" + std::string(key));
  return value;
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ImageTensor input_image(const RunConfig& cfg) {
  ImageTensor img = load_image(need(cfg.image, "image"));
  if (cfg.upscale == 0) fail_usage("upscale must be >= 1");
  return cfg.upscale == 1 ? img : bicubic_upscale(img, cfg.upscale);
}

// Masks from an explicit directory when given, else the configured pipeline
// on the working image.
MaskStack masks_for(const RunConfig& cfg, const ImageTensor& y) {
  if (!cfg.masks.empty())
    return conform_loaded_masks(load_mask_dir(cfg.masks), y.height(), y.width(), cfg.core.segmenter.threshold_T);
  return mask_pipeline(y, cfg.core.segmenter);
}

// Mask directory as stored, or the pipeline on --image when no directory is given.
MaskStack stored_masks(const RunConfig& cfg) {
  if (!cfg.masks.empty()) return load_mask_dir(cfg.masks);
  if (!cfg.image.empty()) return mask_pipeline(input_image(cfg), cfg.core.segmenter);
  fail_usage("missing required setting --masks (or --image)");
}

ImageTensor weight_image(const SemanticWeightMap& w) {
  return ImageTensor(Shape{1, w.height, w.width}, w.values);
}

std::size_t resolved_steps(const RunConfig& cfg) { return cfg.steps == 0 ? cfg.core.schedule.T : cfg.steps; }

std::unique_ptr<Denoiser> sampling_model(const RunConfig& cfg, std::size_t channels) {
  if (cfg.params.empty())
    return std::make_unique<ToyDenoiser>(channels, cfg.core.schedule.T, ToyDenoiser::passthrough_y(channels));
  auto den = std::make_unique<ToyDenoiser>(load_toy_denoiser(cfg.params));
  if (den->channels() != channels)
    fail_usage("parameter file is for " + std::to_string(den->channels()) + " channels, image has " +
               std::to_string(channels));
  return den;
}

std::vector<TrainingPair> load_dataset(const std::string& dir) {
  need(dir, "dataset");
  if (!fs::is_directory(dir)) fail_io(dir + ": not a directory");
  std::vector<fs::path> hr;
  for (const auto& e : fs::directory_iterator(dir)) {
    const std::string name = e.path().filename().string();
    if (name.size() > 7 && name.ends_with("_hr.png")) hr.push_back(e.path());
  }
  std::sort(hr.begin(), hr.end());
  if (hr.empty()) fail_io(dir + ": no *_hr.png files");
  std::vector<TrainingPair> pairs;
  for (const auto& h : hr) {
    std::string stem = h.filename().string();
    stem.resize(stem.size() - 7);
    const fs::path l = h.parent_path() / (stem + "_lr.png");
    if (!fs::exists(l)) fail_io(l.string() + ": missing low-resolution partner");
    ImageTensor x0 = load_image(h);
    ImageTensor y = load_image(l);
    if (x0.channels() != y.channels()) fail_usage(stem + ": hr and lr channel counts differ");
    if (y.height() != x0.height() || y.width() != x0.width()) {
      const std::size_t f = x0.height() / y.height();
      if (f * y.height() != x0.height() || f * y.width() != x0.width())
        fail_usage(stem + ": hr size is not an integer multiple of lr size");
      y = bicubic_upscale(y, f);
    }
    pairs.push_back({std::move(x0), std::move(y)});
  }
  return pairs;
}

// ---- subcommands ----

int cmd_segment(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const MaskStack masks = mask_pipeline(input_image(cfg), cfg.core.segmenter);
  save_mask_dir(masks, need(cfg.output, "output"));
  ctx.err << "segment: " << masks.count() << " masks\n";
  return 0;
}

int cmd_noise(Context& ctx) {
  const auto& cfg = ctx.cfg;
  need(cfg.output, "output");
  const MaskStack masks = stored_masks(cfg);
  const MaskedNoise n = sample_masked_noise_detailed(masks, cfg.channels, cfg.core.seed);
  if (n.fallback) ctx.err << "warning: degenerate mask noise; emitted the unmasked fallback field\n";
  save_tensor(n.eps, cfg.output);
  if (!cfg.viz.empty()) save_image(normalize_for_display(n.eps), cfg.viz);
  return 0;
}

int cmd_weights(Context& ctx) {
  const auto& cfg = ctx.cfg;
  need(cfg.output, "output");
  const MaskStack masks = stored_masks(cfg);
  const SemanticWeightMap w = compute_weight_map(masks);
  if (std::all_of(w.values.begin(), w.values.end(), [](double v) { return v == 0.0; }))
    ctx.err << "warning: mask stack is empty; W is zero everywhere\n";
  save_tensor(weight_image(w), cfg.output);
  if (!cfg.viz.empty()) save_image(weight_image(w), cfg.viz);
  if (!cfg.schedule_csv.empty()) {
    const auto eta = build_schedule(cfg.core.schedule);
    std::string csv = "t,eta_t\n";
    for (std::size_t t = 1; t <= eta.size(); ++t) csv += std::to_string(t) + "," + fmt("%.17g", eta[t - 1]) + "\n";
    write_text(cfg.schedule_csv, csv);
  }
  return 0;
}

int cmd_forward(Context& ctx) {
  const auto& cfg = ctx.cfg;
  need(cfg.output, "output");
  const ImageTensor y = input_image(cfg);
  const MaskStack masks = masks_for(cfg, y);
  const PixelSchedule sched = build_pixel_schedule(cfg.core.schedule, compute_weight_map(masks));
  const ImageTensor x_T = forward_init(y, sample_masked_noise(masks, y.channels(), cfg.core.seed), sched);
  save_image(x_T, cfg.output);
  if (!cfg.tensor.empty()) save_tensor(x_T, cfg.tensor);
  return 0;
}

int cmd_sample(Context& ctx) {
  const auto& cfg = ctx.cfg;
  need(cfg.output, "output");
  const ImageTensor y = input_image(cfg);
  const auto den = sampling_model(cfg, y.channels());
  ImageTensor x0_hat = [&] {
    if (cfg.sampler == "uniform")
      return sample_uniform_baseline(y, *den, cfg.core.schedule, cfg.core.seed, resolved_steps(cfg));
    if (cfg.sampler != "semantic") fail_usage("sampler must be semantic or uniform, got '" + cfg.sampler + "'");
    return sample(y, masks_for(cfg, y), *den, cfg.core.schedule, cfg.core.seed, resolved_steps(cfg));
  }();
  save_image(x0_hat, cfg.output);
  if (!cfg.tensor.empty()) save_tensor(x0_hat, cfg.tensor);
  return 0;
}

int cmd_train(Context& ctx) {
  const auto& cfg = ctx.cfg;
  need(cfg.output, "output");
  const auto data = load_dataset(cfg.dataset);
  TeacherFactory teacher;
  if (cfg.teacher == "oracle") {
    teacher = oracle_teacher();
  } else {
    teacher = fixed_teacher(std::make_shared<ToyDenoiser>(load_toy_denoiser(cfg.teacher)));
  }
  std::string csv = "iteration,l_distill,l_inverse,l_gt,l_sc,total\n";
  const auto result = train(cfg.core, data, teacher, [&](std::size_t it, const LossReport& r) {
    csv += std::to_string(it) + "," + fmt("%.17g", r.l_distill) + "," + fmt("%.17g", r.l_inverse) + "," +
           fmt("%.17g", r.l_gt) + "," + fmt("%.17g", r.l_sc) + "," + fmt("%.17g", r.total) + "\n";
    if (it % 10 == 0 || it + 1 == cfg.core.iterations)
      ctx.err << "train: iteration " << it << " total " << fmt("%.6g", r.total) << "\n";
  });
  save_toy_denoiser(result.student, cfg.output);
  if (!cfg.history.empty()) write_text(cfg.history, csv);
  return 0;
}

int cmd_pretrain(Context& ctx) {
  const auto& cfg = ctx.cfg;
  need(cfg.output, "output");
  const auto data = load_dataset(cfg.dataset);
  std::string csv = "iteration,loss\n";
  const auto result = pretrain_teacher(cfg.core, data, [&](std::size_t it, double loss) {
    csv += std::to_string(it) + "," + fmt("%.17g", loss) + "\n";
    if (it % 10 == 0 || it + 1 == cfg.core.iterations)
      ctx.err << "pretrain-teacher: iteration " << it << " loss " << fmt("%.6g", loss) << "\n";
  });
  save_toy_denoiser(result.teacher, cfg.output);
  if (!cfg.history.empty()) write_text(cfg.history, csv);
  return 0;
}

int cmd_metrics(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const fs::path a = need(cfg.image, "image"), b = need(cfg.reference, "reference");
  std::vector<std::pair<fs::path, fs::path>> jobs;
  if (fs::is_directory(a) || fs::is_directory(b)) {
    if (!fs::is_directory(a) || !fs::is_directory(b)) fail_usage("metrics: give two images or two directories");
    std::vector<fs::path> names;
    for (const auto& e : fs::directory_iterator(a))
      if (e.path().extension() == ".png") names.push_back(e.path().filename());
    std::sort(names.begin(), names.end());
    for (const auto& n : names) {
      if (!fs::exists(b / n)) fail_io((b / n).string() + ": no reference for " + n.string());
      jobs.emplace_back(a / n, b / n);
    }
  } else {
    jobs.emplace_back(a, b);
  }
  std::string csv = "filename,psnr,ssim\n";
  for (const auto& [pa, pb] : jobs) {
    const MetricReport r = evaluate_metrics(load_image(pa), load_image(pb));
    csv += pa.filename().string() + "," + fmt("%.6f", r.psnr) + "," + fmt("%.6f", r.ssim) + "\n";
  }
  if (cfg.output.empty()) ctx.out << csv;
  else write_text(cfg.output, csv);
  return 0;
}

struct SweepPoint {
  double m, p, kappa;
  MetricReport mean;
};

int cmd_sweep(Context& ctx) {
  const auto& cfg = ctx.cfg;
  need(cfg.output, "output");
  const auto& sc = cfg.core.schedule;
  const auto ms = cfg.sweep_m.empty() ? std::vector<double>{sc.m_hyper} : parse_list(cfg.sweep_m, "m");
  const auto ps = cfg.sweep_p.empty() ? std::vector<double>{sc.p} : parse_list(cfg.sweep_p, "p");
  const auto ks = cfg.sweep_kappa.empty() ? std::vector<double>{sc.kappa} : parse_list(cfg.sweep_kappa, "kappa");
  if (cfg.sweep_images == 0) fail_usage("sweep_images must be >= 1");

  std::vector<SweepPoint> grid;
  for (double m : ms)
    for (double p : ps)
      for (double k : ks) grid.push_back({m, p, k, {}});
  for (const auto& g : grid) {
    ScheduleConfig s = sc;
    s.m_hyper = g.m, s.p = g.p, s.kappa = g.kappa;
    s.validate();
  }

  const auto pairs = synthetic_pairs(cfg.sweep_images, cfg.channels, cfg.sweep_size, 2, cfg.core.seed.child(0));
  std::shared_ptr<const ToyDenoiser> fixed;
  if (!cfg.params.empty()) fixed = std::make_shared<ToyDenoiser>(load_toy_denoiser(cfg.params));

  // Grid points are independent and each writes only its own slot.
  parallel_for(grid.size(), [&](std::size_t gi) {
    SweepPoint& g = grid[gi];
    TrainingConfig tc = cfg.core;
    tc.schedule.m_hyper = g.m, tc.schedule.p = g.p, tc.schedule.kappa = g.kappa;
    std::shared_ptr<const ToyDenoiser> den = fixed;
    if (!den) den = std::make_shared<ToyDenoiser>(pretrain_teacher(tc, pairs).teacher);
    const std::size_t steps = cfg.steps == 0 ? tc.schedule.T : cfg.steps;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& pr = pairs[i];
      const ImageTensor out = sample(pr.y, mask_pipeline(pr.y, tc.segmenter), *den, tc.schedule,
                                     cfg.core.seed.child(1).child(i), steps);
      const MetricReport r = evaluate_metrics(out, pr.x0);
      g.mean.psnr += r.psnr / static_cast<double>(pairs.size());
      g.mean.ssim += r.ssim / static_cast<double>(pairs.size());
    }
  });

  std::string csv = "m,p,kappa,psnr,ssim,n_images\n";
  for (const auto& g : grid) {
    csv += fmt("%.17g", g.m) + "," + fmt("%.17g", g.p) + "," + fmt("%.17g", g.kappa) + "," + fmt("%.6f", g.mean.psnr) +
           "," + fmt("%.6f", g.mean.ssim) + "," + std::to_string(pairs.size()) + "\n";
    ctx.err << "sweep: m=" << fmt("%.6g", g.m) << " p=" << fmt("%.6g", g.p) << " kappa=" << fmt("%.6g", g.kappa)
            << " psnr=" << fmt("%.4f", g.mean.psnr) << " ssim=" << fmt("%.4f", g.mean.ssim) << "\n";
  }
  write_text(cfg.output, csv);
  return 0;
}

// ---- registration ----

const std::vector<std::string> kSchedule = {"T", "eta_1", "eta_T", "p", "kappa", "m_hyper", "clamp_eta"};
const std::vector<std::string> kSegmenter = {"segmenter",     "mask_dir",  "quant_levels",
                                             "min_region_px", "max_masks", "threshold_T"};
const std::vector<std::string> kTraining = {"lambda_sc", "learning_rate", "iterations", "batch_size", "fd_epsilon"};

struct Command {
  std::string name;
  std::string help;
  std::vector<std::vector<std::string>> keys;
  int (*run)(Context&);
};

const std::vector<Command>& commands() {
  static const std::vector<Command> cmds = {
      {"segment", "LR image -> binary mask directory", {kSegmenter, {"image", "upscale", "output"}}, cmd_segment},
      {"noise",
       "mask directory + seed -> standardized noise tensor",
       {kSegmenter, {"seed", "channels", "masks", "image", "upscale", "output", "viz"}},
       cmd_noise},
      {"weights",
       "mask directory -> weight map tensor, heatmap and schedule CSV",
       {kSchedule, kSegmenter, {"masks", "image", "upscale", "output", "viz", "schedule_csv"}},
       cmd_weights},
      {"forward",
       "LR image + masks + seed -> initial diffusion state",
       {kSchedule, kSegmenter, {"seed", "masks", "image", "upscale", "output", "tensor"}},
       cmd_forward},
      {"sample",
       "LR image + masks + parameters -> restored image",
       {kSchedule, kSegmenter, {"seed", "masks", "image", "upscale", "params", "steps", "sampler", "output", "tensor"}},
       cmd_sample},
      {"train",
       "distill a one-step student on a paired dataset",
       {kSchedule, kSegmenter, kTraining, {"seed", "dataset", "teacher", "output", "history"}},
       cmd_train},
      {"pretrain-teacher",
       "fit a multi-step toy teacher on a paired dataset",
       {kSchedule, kSegmenter, kTraining, {"seed", "dataset", "output", "history"}},
       cmd_pretrain},
      {"metrics", "PSNR and SSIM for two images or two directories", {{"image", "reference", "output"}}, cmd_metrics},
      {"sweep",
       "sample + metrics over a (m_hyper, p, kappa) grid on synthetic images",
       {{"T", "eta_1", "eta_T", "clamp_eta"},
        kSegmenter,
        kTraining,
        {"seed", "params", "steps", "channels", "sweep_images", "sweep_size", "output"}},
       cmd_sweep},
  };
  return cmds;
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Io: return "io";
    case ErrorKind::Numeric: return "numeric";
  }
  return "usage";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Usage: return 2;
    case ErrorKind::Io: return 3;
    case ErrorKind::Numeric: return 4;
  }
  return 2;
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

int report(std::ostream& err, ErrorKind kind, const std::string& msg) {
  err << "error: kind=" << kind_name(kind) << " code=" << exit_code(kind) << " message=" << one_line(msg) << "\n";
  return exit_code(kind);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic-guided diffusion super-resolution toolkit", "samsr"};
  app.require_subcommand(1);

  struct Bound {
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_file;
    bool dump = false;
  };
  std::map<std::string, Bound> bound;
  for (const auto& c : commands()) {
    auto* sub = app.add_subcommand(c.name, c.help);
    Bound& b = bound[c.name];
    sub->add_option("--config", b.config_file, "flat key = value settings file (flags win)");
    sub->add_flag("--dump-config", b.dump, "print the resolved settings and exit");
    for (const auto& group : c.keys)
      for (const auto& key : group) {
        const ConfigKey* k = find_key(key);
        b.options[key] = sub->add_option("--" + key, b.values[key], k->help);
      }
    if (c.name == "sweep") {
      b.options["sweep_m"] = sub->add_option("--m,--sweep_m", b.values["sweep_m"], "comma list of m_hyper values");
      b.options["sweep_p"] = sub->add_option("--p,--sweep_p", b.values["sweep_p"], "comma list of p values");
      b.options["sweep_kappa"] =
          sub->add_option("--kappa,--sweep_kappa", b.values["sweep_kappa"], "comma list of kappa values");
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return report(err, ErrorKind::Usage, e.what());
  }

  const CLI::App* chosen = app.get_subcommands().front();
  const Command& cmd = *std::find_if(commands().begin(), commands().end(),
                                     [&](const Command& c) { return c.name == chosen->get_name(); });
  Bound& b = bound[cmd.name];

  try {
    Context ctx{RunConfig{}, out, err};
    if (!b.config_file.empty()) {
      const auto bytes = read_file(b.config_file);
      apply_config_text(ctx.cfg, std::string(bytes.begin(), bytes.end()), b.config_file);
    }
    for (const auto& [key, opt] : b.options)
      if (opt->count() > 0) find_key(key)->set(ctx.cfg, b.values[key]);
    ctx.cfg.core.validate();
    if (ctx.cfg.channels != 1 && ctx.cfg.channels != 3) fail_usage("channels must be 1 or 3");
    thread_count();  // surfaces a malformed SAMSR_THREADS before any work

    if (b.dump) {
      out << dump_config(ctx.cfg);
      return 0;
    }
    std::istringstream resolved(dump_config(ctx.cfg));
    for (std::string line; std::getline(resolved, line);) err << cmd.name << ": config " << line << "\n";
    return cmd.run(ctx);
  } catch (const Error& e) {
    return report(err, e.kind(), e.what());
  } catch (const fs::filesystem_error& e) {
    return report(err, ErrorKind::Io, e.what());
  } catch (const std::exception& e) {
    return report(err, ErrorKind::Numeric, e.what());
  }
}

}  // namespace samsr::cli
