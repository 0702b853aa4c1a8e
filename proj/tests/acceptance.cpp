// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "samsr/cli.hpp"
#include "samsr/diffusion.hpp"
#include "samsr/image_io.hpp"
#include "samsr/metrics.hpp"
#include "samsr/resample.hpp"
#include "samsr/sam_noise.hpp"
#include "samsr/segmentation.hpp"
#include "samsr/synthetic.hpp"
#include "samsr/training.hpp"

using namespace samsr;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_abs_diff(const ImageTensor& a, const ImageTensor& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values()[i] - b.values()[i]));
  return d;
}

int quiet_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  if (code != 0) std::fprintf(stderr, "%s", err.str().c_str());
  return code;
}

std::string slurp(const std::filesystem::path& p) {
  const auto b = read_file(p);
  return std::string(b.begin(), b.end());
}

Outcome noise_normalization() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(1);
  double worst_mean = 0.0, worst_var = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t m = 1 + gen() % 12, h = 4 + gen() % 29, w = 4 + gen() % 29, c = gen() % 2 ? 3 : 1;
    const auto masks = test::random_stack(m, h, w, gen(), 0.1 + 0.8 * (gen() % 1000) / 1000.0);
    const auto eps = sample_masked_noise(masks, c, NoiseSeed{gen()});
    // Independent check: plain long-double sums.
    long double s = 0, s2 = 0;
    for (double v : eps.values()) s += v;
    const long double mean = s / eps.size();
    for (double v : eps.values()) s2 += (v - mean) * (v - mean);
    worst_mean = std::max(worst_mean, static_cast<double>(std::fabs(mean)));
    worst_var = std::max(worst_var, static_cast<double>(std::fabs(s2 / eps.size() - 1)));
  }
  const double secs = seconds_since(t0);
  return {worst_mean <= 1e-9 && worst_var <= 1e-9 && secs < 5,
          fmt("max|mean|=%.3g max|var-1|=%.3g time=%.2fs", worst_mean, worst_var, secs)};
}

Outcome coverage_variance() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<int> counts = {2, 1, 1, 0};
  const auto masks = test::stack_with_coverage(counts, 2, 2);
  const int n = 10000;
  std::vector<double> s(4, 0.0), s2(4, 0.0);
  for (int k = 0; k < n; ++k) {
    const auto raw = sample_masked_noise_detailed(masks, 1, NoiseSeed{static_cast<std::uint64_t>(k)}).raw;
    for (int i = 0; i < 4; ++i) {
      s[i] += raw.values()[i];
      s2[i] += raw.values()[i] * raw.values()[i];
    }
  }
  bool ok = true;
  std::string detail = "var=";
  for (int i = 0; i < 4; ++i) {
    const double mean = s[i] / n, var = (s2[i] - n * mean * mean) / (n - 1);
    detail += fmt("%.4f%s", var, i < 3 ? "," : "");
    ok &= counts[i] == 0 ? var == 0.0 : std::abs(var - counts[i]) <= 0.05 * counts[i];
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 10, detail + fmt(" (expect 2,1,1,0) time=%.2fs", secs)};
}

Outcome weight_map() {
  const auto w = compute_weight_map(test::stack_with_coverage({2, 1, 1, 0}, 2, 2));
  bool ok = w.values == std::vector<double>{1.0, 0.5, 0.5, 0.0};
  std::mt19937_64 gen(3);
  int bad = 0;
  for (int i = 0; i < 1000; ++i) {
    auto masks = test::random_stack(1 + gen() % 10, 1 + gen() % 16, 1 + gen() % 16, gen(), 0.3);
    std::vector<double> extra(masks.plane(), 0.0);
    extra[gen() % extra.size()] = 1.0;  // guarantees nonzero coverage
    masks.push_back(extra);
    const auto r = compute_weight_map(masks);
    const auto [lo, hi] = std::minmax_element(r.values.begin(), r.values.end());
    if (*lo < 0.0 || *hi != 1.0) ++bad;
  }
  return {ok && bad == 0, fmt("example_exact=%d random_violations=%d/1000", ok ? 1 : 0, bad)};
}

Outcome coefficient_identity() {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    ScheduleConfig cfg;
    cfg.T = 15;
    cfg.eta_1 = 1e-4 + 0.05 * u(gen);
    cfg.eta_T = cfg.eta_1 + (1.0 - cfg.eta_1) * (0.05 + 0.95 * u(gen));
    cfg.p = 0.1 + 2.0 * u(gen);
    cfg.kappa = 0.1 + 4.0 * u(gen);
    cfg.m_hyper = 0.95 * u(gen);
    cfg.clamp_eta = i % 2 == 0;
    SemanticWeightMap w{8, 8, std::vector<double>(64)};
    for (double& v : w.values) v = u(gen);
    w.values[gen() % 64] = 1.0;
    const auto sched = build_pixel_schedule(cfg, w);
    for (std::size_t t = 2; t <= cfg.T; ++t) {
      const auto& c = sched.step(t);
      for (std::size_t p = 0; p < c.k.size(); ++p) worst = std::max(worst, std::abs(c.k[p] + c.m[p] + c.j[p] - 1.0));
    }
  }
  return {worst <= 1e-9, fmt("max|k+m+j-1|=%.3g over 200 schedules x 14 steps x 64 px", worst)};
}

Outcome oracle_transport() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double m : {0.0, 0.2, 0.5}) {
    ScheduleConfig cfg;
    cfg.m_hyper = m;
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto x0 = test::random_image(3, 32, 32, 100 + s), y = test::random_image(3, 32, 32, 200 + s);
      const auto masks = test::random_stack(1 + s * 4, 32, 32, 300 + s);
      const OracleDenoiser oracle(x0);
      for (std::size_t steps : {cfg.T, std::size_t{1}})
        worst = std::max(worst, max_abs_diff(sample(y, masks, oracle, cfg, NoiseSeed{s}, steps), x0));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 5, fmt("max|x0_hat-x0|=%.3g time=%.2fs", worst, secs)};
}

Outcome baseline_reduction() {
  ScheduleConfig cfg;
  cfg.m_hyper = 0.0;
  const auto y = test::random_image(3, 12, 12, 5);
  std::mt19937_64 gen(6);
  std::vector<double> params(ToyDenoiser::parameter_count_for(3));
  for (double& p : params) p = std::uniform_real_distribution<double>(-0.1, 0.1)(gen);
  const ToyDenoiser den(3, cfg.T, params);
  bool identical = true;
  std::size_t states = 0;
  for (std::size_t steps : {cfg.T, std::size_t{1}}) {
    std::vector<ImageTensor> a, b;
    sample(y, MaskStack(0, 12, 12), den, cfg, NoiseSeed{42}, steps,
           [&](std::size_t, const ImageTensor& x) { a.push_back(x); });
    sample_uniform_baseline(y, den, cfg, NoiseSeed{42}, steps,
                            [&](std::size_t, const ImageTensor& x) { b.push_back(x); });
    identical &= a.size() == b.size();
    for (std::size_t i = 0; identical && i < a.size(); ++i) identical &= a[i] == b[i];
    states += a.size();
  }
  return {identical, fmt("bitwise equal over %zu trajectory states (T and 1-step)", states)};
}

Outcome loss_identities() {
  TrainingConfig cfg;
  cfg.lambda_sc = 0.7;
  const auto pairs = synthetic_pairs(4, 3, 8, 2, NoiseSeed{7});
  double worst_rel = 0.0, oracle_terms = 0.0, lambda0_gap = 0.0;
  for (const auto& pr : pairs) {
    const OracleDenoiser oracle(pr.x0);
    const auto o = compute_losses(oracle, oracle, pr.x0, pr.y, cfg);
    oracle_terms = std::max({oracle_terms, o.l_distill, o.l_gt, o.l_sc});
    const ToyDenoiser toy(3, cfg.schedule.T, ToyDenoiser::passthrough_y(3));
    for (const auto& r : {o, compute_losses(toy, oracle, pr.x0, pr.y, cfg)}) {
      const double sum = r.l_distill + r.l_inverse + r.l_gt + cfg.lambda_sc * r.l_sc;
      worst_rel = std::max(worst_rel, std::abs(r.total - sum) / sum);
    }
    TrainingConfig zero = cfg;
    zero.lambda_sc = 0.0;
    const auto z = compute_losses(toy, oracle, pr.x0, pr.y, zero);
    lambda0_gap = std::max(lambda0_gap, std::abs(z.total - (z.l_distill + z.l_inverse + z.l_gt)));
  }
  return {worst_rel <= 1e-12 && oracle_terms == 0.0 && lambda0_gap == 0.0,
          fmt("total rel err=%.3g oracle max(distill,gt,sc)=%.3g lambda0 gap=%.3g", worst_rel, oracle_terms,
              lambda0_gap)};
}

Outcome training_decrease() {
  ::setenv("SAMSR_THREADS", "1", 1);
  const auto t0 = std::chrono::steady_clock::now();
  TrainingConfig cfg;
  cfg.iterations = 500;
  cfg.seed = NoiseSeed{2024};
  const auto pairs = synthetic_pairs(16, 3, 8, 2, NoiseSeed{8});
  const auto result = train(cfg, pairs, oracle_teacher());
  const double secs = seconds_since(t0);
  ::unsetenv("SAMSR_THREADS");

  std::vector<double> total;
  for (const auto& r : result.history) total.push_back(r.total);
  const double first = total.front(), last = total.back();
  // Trailing moving average over 20 iterations; monotone means no rise above
  // a relative slack of 1e-3 of the initial loss.
  const std::size_t win = 20;
  double worst_rise = 0.0, prev = 0.0, run = 0.0;
  for (std::size_t i = 0; i < total.size(); ++i) {
    run += total[i];
    if (i >= win) run -= total[i - win];
    if (i + 1 < win) continue;
    const double avg = run / win;
    if (i + 1 > win) worst_rise = std::max(worst_rise, avg - prev);
    prev = avg;
  }
  const double reduction = 1.0 - last / first;
  const bool monotone = worst_rise <= 1e-3 * first;
  return {reduction >= 0.5 && monotone && secs < 600,
          fmt("total %.4f -> %.4f (reduction %.1f%%, need >=50%%) final l_inverse=%.4f smoothed max rise=%.3g "
              "monotone=%d time=%.1fs",
              first, last, 100 * reduction, result.history.back().l_inverse, worst_rise, monotone ? 1 : 0, secs)};
}

Outcome metric_sanity() {
  const auto x = test::random_image(3, 24, 24, 9, 0.0, 0.9);
  ImageTensor shifted = x;
  for (double& v : shifted.values()) v += 0.1;
  const auto z = test::random_image(3, 24, 24, 10);
  const double cap = psnr(x, x), p20 = psnr(x, shifted), s1 = ssim(x, x);
  const double asym = std::max(std::abs(psnr(x, z) - psnr(z, x)), std::abs(ssim(x, z) - ssim(z, x)));
  return {cap == 99.0 && std::abs(p20 - 20.0) <= 0.01 && s1 == 1.0 && asym <= 1e-12,
          fmt("psnr(x,x)=%g psnr(offset 0.1)=%.4f ssim(x,x)=%.17g asym=%.3g", cap, p20, s1, asym)};
}

Outcome pipeline_composition() {
  bool equal = true;
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto lr = test::random_image(s % 2 ? 3 : 1, 5 + s, 7, 50 + s);
    SegmenterConfig cfg;
    cfg.quant_levels = 3 + s;
    const auto stepwise =
        threshold(avg_pool(toy_segment(bicubic_upscale(lr, kSegmentScale), cfg), kSegmentScale), cfg.threshold_T);
    equal &= mask_pipeline(lr, cfg) == stepwise;
  }
  double worst = 0.0;
  for (double c : {0.0, 0.37, 1.0, -2.5}) {
    for (double v : test::values_of(bicubic_upscale(ImageTensor(3, 5, 6, c), 4))) worst = std::max(worst, std::abs(v - c));
    for (double v : test::values_of(avg_pool(MaskStack(2, 8, 12, std::vector<double>(192, c), false), 4)))
      worst = std::max(worst, std::abs(v - c));
  }
  return {equal && worst <= 1e-12, fmt("stepwise bitwise=%d constant drift=%.3g", equal ? 1 : 0, worst)};
}

Outcome cli_determinism(const std::filesystem::path& dir) {
  save_image(test::random_image(3, 12, 12, 11), dir / "lr.png");
  std::mt19937_64 gen(12);
  std::vector<double> params(ToyDenoiser::parameter_count_for(3));
  for (double& p : params) p = std::uniform_real_distribution<double>(-0.2, 0.2)(gen);
  save_toy_denoiser(ToyDenoiser(3, 15, params), dir / "model.bin");
  std::vector<std::string> outputs;
  int i = 0;
  for (const char* threads : {"1", "1", "2", "8"}) {
    ::setenv("SAMSR_THREADS", threads, 1);
    const auto out = dir / ("sr" + std::to_string(i++) + ".png");
    if (quiet_run({"sample", "--image", (dir / "lr.png").string(), "--params", (dir / "model.bin").string(), "--seed",
                   "31", "--upscale", "2", "--output", out.string()}) != 0)
      return {false, "sample failed"};
    outputs.push_back(slurp(out));
  }
  ::unsetenv("SAMSR_THREADS");
  const bool same = std::all_of(outputs.begin(), outputs.end(), [&](const std::string& o) { return o == outputs[0]; });
  return {same, fmt("4 runs (SAMSR_THREADS=1,1,2,8) byte-identical=%d, %zu bytes", same ? 1 : 0, outputs[0].size())};
}

Outcome sweep_harness(const std::filesystem::path& dir) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto csv = dir / "sweep.csv";
  if (quiet_run({"sweep", "--m", "0.5,0.25,0.2,0.16666666666666666,0.125,0.1,0.05", "--p", "0.3", "--kappa", "2.0",
                 "--sweep_images", "10", "--output", csv.string()}) != 0)
    return {false, "sweep failed"};
  std::istringstream in(slurp(csv));
  std::string line;
  std::getline(in, line);
  bool ok = line == "m,p,kappa,psnr,ssim,n_images";
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::istringstream fields(line);
    std::string f;
    std::vector<double> v;
    while (std::getline(fields, f, ',')) {
      char* end = nullptr;
      v.push_back(std::strtod(f.c_str(), &end));
      ok &= *end == '\0' && !f.empty();
    }
    ok &= v.size() == 6 && v[1] == 0.3 && v[2] == 2.0 && v[5] == 10 && std::isfinite(v[3]) && v[4] <= 1.0;
  }
  ok &= rows == 7;
  return {ok, fmt("rows=%d well_formed=%d time=%.1fs", rows, ok ? 1 : 0, seconds_since(t0))};
}

}  // namespace

int main() {
  test::TempDir dir("acceptance");
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"noise normalization", noise_normalization},
      {"coverage-variance law", coverage_variance},
      {"weight map", weight_map},
      {"coefficient identity", coefficient_identity},
      {"oracle transport", oracle_transport},
      {"baseline reduction", baseline_reduction},
      {"loss identities", loss_identities},
      {"training decrease", training_decrease},
      {"metric sanity", metric_sanity},
      {"pipeline composition", pipeline_composition},
      {"determinism", [&] { return cli_determinism(dir.path()); }},
      {"sweep harness", [&] { return sweep_harness(dir.path()); }},
  };
  int failed = 0, n = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", ++n, name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
