#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "samsr/training.hpp"

namespace samsr::cli {

// Every setting a subcommand can take, from a config file or a flag.
struct RunConfig {
  TrainingConfig core;  // schedule, segmenter, seed and optimizer settings

  std::size_t channels = 3;
  std::size_t steps = 0;  // 0 means T
  std::size_t upscale = 1;
  std::string sampler = "semantic";  // semantic | uniform
  std::string teacher = "oracle";    // oracle | path to a parameter file

  std::string image;
  std::string reference;
  std::string masks;
  std::string params;
  std::string dataset;
  std::string output;
  std::string tensor;
  std::string viz;
  std::string schedule_csv;
  std::string history;

  std::string sweep_m;  // comma lists; empty means the scalar setting
  std::string sweep_p;
  std::string sweep_kappa;
  std::size_t sweep_images = 10;
  std::size_t sweep_size = 16;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<ConfigKey>& config_keys();
const ConfigKey* find_key(const std::string& name);

// Flat "key = value" lines, '#' comments. Unknown keys and malformed values
// are usage errors.
void apply_config_text(RunConfig& cfg, const std::string& text, const std::string& origin);

// One "key = value" line per key; doubles use 17 significant digits so
// reading the dump back reproduces the configuration exactly.
std::string dump_config(const RunConfig& cfg);

std::vector<double> parse_list(const std::string& text, const std::string& what);

// Runs one invocation (args excludes the program name) and returns the exit
// status: 0 ok, 2 usage, 3 I/O, 4 numeric. Errors go to `err` as one line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace samsr::cli
