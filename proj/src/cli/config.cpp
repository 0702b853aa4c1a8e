#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "samsr/cli.hpp"
#include "samsr/error.hpp"

namespace samsr::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || *end != '\0' || errno == ERANGE) fail_usage("invalid number for " + key + ": '" + text + "'");
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    fail_usage("invalid integer for " + key + ": '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  fail_usage("invalid boolean for " + key + ": '" + text + "'");
}

// `ref` is a generic lambda returning the field, usable on const and mutable
// configs alike.
template <typename Get>
ConfigKey real_key(std::string name, std::string help, Get ref) {
  return {name, std::move(help), [ref](const RunConfig& c) { return fmt_double(ref(c)); },
          [ref, name](RunConfig& c, const std::string& v) { ref(c) = to_double(name, v); }};
}

template <typename Get>
ConfigKey count_key(std::string name, std::string help, Get ref) {
  return {name, std::move(help), [ref](const RunConfig& c) { return std::to_string(ref(c)); },
          [ref, name](RunConfig& c, const std::string& v) { ref(c) = static_cast<std::size_t>(to_u64(name, v)); }};
}

template <typename Get>
ConfigKey text_key(std::string name, std::string help, Get ref) {
  return {name, std::move(help), [ref](const RunConfig& c) { return ref(c); },
          [ref](RunConfig& c, const std::string& v) { ref(c) = trim(v); }};
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> k;
  // schedule
  k.push_back(count_key("T", "number of diffusion steps", [](auto& c) -> auto& { return c.core.schedule.T; }));
  k.push_back(real_key("eta_1", "first residual transfer rate", [](auto& c) -> auto& { return c.core.schedule.eta_1; }));
  k.push_back(real_key("eta_T", "last residual transfer rate", [](auto& c) -> auto& { return c.core.schedule.eta_T; }));
  k.push_back(real_key("p", "schedule warp exponent", [](auto& c) -> auto& { return c.core.schedule.p; }));
  k.push_back(real_key("kappa", "noise strength", [](auto& c) -> auto& { return c.core.schedule.kappa; }));
  k.push_back(real_key("m_hyper", "semantic modulation strength", [](auto& c) -> auto& { return c.core.schedule.m_hyper; }));
  k.push_back({"clamp_eta", "cap adjusted eta below 1 (true|false)",
               [](const RunConfig& c) { return std::string(c.core.schedule.clamp_eta ? "true" : "false"); },
               [](RunConfig& c, const std::string& v) { c.core.schedule.clamp_eta = to_bool("clamp_eta", v); }});
  // segmenter
  k.push_back({"segmenter", "mask source (toy|load)",
               [](const RunConfig& c) {
                 return std::string(c.core.segmenter.mode == SegmenterMode::Toy ? "toy" : "load");
               },
               [](RunConfig& c, const std::string& v) {
                 const std::string t = trim(v);
                 if (t == "toy") c.core.segmenter.mode = SegmenterMode::Toy;
                 else if (t == "load") c.core.segmenter.mode = SegmenterMode::Load;
                 else fail_usage("invalid segmenter: '" + v + "' (expected toy or load)");
               }});
  k.push_back({"mask_dir", "mask directory for the load segmenter",
               [](const RunConfig& c) { return c.core.segmenter.mask_dir.string(); },
               [](RunConfig& c, const std::string& v) { c.core.segmenter.mask_dir = trim(v); }});
  k.push_back(count_key("quant_levels", "toy segmenter luminance bands", [](auto& c) -> auto& { return c.core.segmenter.quant_levels; }));
  k.push_back(count_key("min_region_px", "toy segmenter minimum region size", [](auto& c) -> auto& { return c.core.segmenter.min_region_px; }));
  k.push_back(count_key("max_masks", "mask count cap", [](auto& c) -> auto& { return c.core.segmenter.max_masks; }));
  k.push_back(real_key("threshold_T", "binarization threshold after pooling", [](auto& c) -> auto& { return c.core.segmenter.threshold_T; }));
  // training
  k.push_back(real_key("lambda_sc", "semantic consistency weight", [](auto& c) -> auto& { return c.core.lambda_sc; }));
  k.push_back(real_key("learning_rate", "gradient step size", [](auto& c) -> auto& { return c.core.learning_rate; }));
  k.push_back(count_key("iterations", "optimizer iterations", [](auto& c) -> auto& { return c.core.iterations; }));
  k.push_back(count_key("batch_size", "items per iteration", [](auto& c) -> auto& { return c.core.batch_size; }));
  k.push_back(real_key("fd_epsilon", "finite-difference probe size", [](auto& c) -> auto& { return c.core.fd_epsilon; }));
  k.push_back({"seed", "master noise seed",
               [](const RunConfig& c) { return std::to_string(c.core.seed.master); },
               [](RunConfig& c, const std::string& v) { c.core.seed.master = to_u64("seed", v); }});
  // run settings
  k.push_back(count_key("channels", "channels of generated noise", [](auto& c) -> auto& { return c.channels; }));
  k.push_back(count_key("steps", "sampling steps, 1 or T (0 means T)", [](auto& c) -> auto& { return c.steps; }));
  k.push_back(count_key("upscale", "bicubic factor applied to the input image", [](auto& c) -> auto& { return c.upscale; }));
  k.push_back(text_key("sampler", "semantic or uniform", [](auto& c) -> auto& { return c.sampler; }));
  k.push_back(text_key("teacher", "oracle or a parameter file", [](auto& c) -> auto& { return c.teacher; }));
  k.push_back(text_key("image", "input image (or directory for metrics)", [](auto& c) -> auto& { return c.image; }));
  k.push_back(text_key("reference", "reference image or directory for metrics", [](auto& c) -> auto& { return c.reference; }));
  k.push_back(text_key("masks", "mask directory", [](auto& c) -> auto& { return c.masks; }));
  k.push_back(text_key("params", "denoiser parameter file", [](auto& c) -> auto& { return c.params; }));
  k.push_back(text_key("dataset", "directory of *_hr.png / *_lr.png pairs", [](auto& c) -> auto& { return c.dataset; }));
  k.push_back(text_key("output", "primary output path", [](auto& c) -> auto& { return c.output; }));
  k.push_back(text_key("tensor", "float64 tensor output path", [](auto& c) -> auto& { return c.tensor; }));
  k.push_back(text_key("viz", "visualization PNG path", [](auto& c) -> auto& { return c.viz; }));
  k.push_back(text_key("schedule_csv", "schedule CSV path (t, eta_t)", [](auto& c) -> auto& { return c.schedule_csv; }));
  k.push_back(text_key("history", "loss history CSV path", [](auto& c) -> auto& { return c.history; }));
  k.push_back(text_key("sweep_m", "comma list of m_hyper values", [](auto& c) -> auto& { return c.sweep_m; }));
  k.push_back(text_key("sweep_p", "comma list of p values", [](auto& c) -> auto& { return c.sweep_p; }));
  k.push_back(text_key("sweep_kappa", "comma list of kappa values", [](auto& c) -> auto& { return c.sweep_kappa; }));
  k.push_back(count_key("sweep_images", "synthetic images per sweep point", [](auto& c) -> auto& { return c.sweep_images; }));
  k.push_back(count_key("sweep_size", "synthetic image size", [](auto& c) -> auto& { return c.sweep_size; }));
  return k;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

const ConfigKey* find_key(const std::string& name) {
  for (const auto& k : config_keys())
    if (k.name == name) return &k;
  return nullptr;
}

void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = origin + ":" + std::to_string(lineno);
    if (eq == std::string::npos) fail_usage(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const ConfigKey* k = find_key(key);
    if (!k) fail_usage(where + ": unknown key '" + key + "'");
    k->set(cfg, t.substr(eq + 1));
  }
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) out.push_back(to_double(what, item));
  if (out.empty()) fail_usage(what + ": empty list");
  return out;
}

}  // namespace samsr::cli
