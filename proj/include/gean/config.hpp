// Experiment configuration: one flat INI-style file with sections for
// the arm, plant, data collection, learner, evaluation, environment, and
// output locations. Unknown keys are rejected; paths are resolved
// relative to the config file.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gean/datagen.hpp"
#include "gean/gean.hpp"
#include "gean/reacher_env.hpp"

namespace gean {

struct EvalConfig {
  std::vector<int> horizons{1, 500};
  int start_stride = 25;
  int bootstrap_resamples = 10000;
  std::vector<int> dataset_sizes{50, 200, 800};
  std::vector<int> history_lengths{1, 3, 10};
  std::vector<int> history_strides{1, 4};
  std::vector<int> rollout_lengths{1, 5};
  std::vector<std::uint64_t> sweep_seeds{0, 1, 2};
};

struct RunConfig {
  ArmModel arm = ArmModel::default_arm();
  std::string plant_preset = "messy";  // "messy" or "easy"
  PlantModel plant = PlantModel::default_messy();
  DataParams data = DataParams::defaults(4);
  double train_fraction = 0.8;
  GeanConfig gean;
  EvalConfig eval;
  EnvConfig env = EnvConfig::defaults(4);
  int env_plan_horizon = 10;    // shooting controller lookahead
  int env_plan_candidates = 64;
  std::string out_dir = ".";    // resolved relative to the config file
};

// Parses and validates; throws ParseError with "<path>:<line>:" prefixes
// on malformed input and unknown section/key names.
RunConfig load_run_config(const std::string& path);

// FNV-1a hash of a file's bytes, for the run manifests.
std::uint64_t file_hash(const std::string& path);

}  // namespace gean
