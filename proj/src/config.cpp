#include "gean/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "gean/io_util.hpp"

namespace gean {

namespace {

struct Entry {
  std::string section, key, value;
  int line;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Entry> read_entries(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError(path + ": cannot open config file");
  std::vector<Entry> entries;
  std::string line, section;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ParseError(path + ":" + std::to_string(lineno) +
                         ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos || section.empty())
      throw ParseError(path + ":" + std::to_string(lineno) +
                       ": expected 'key = value' inside a section");
    entries.push_back(
        {section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno});
  }
  return entries;
}

[[noreturn]] void fail(const std::string& path, const Entry& e,
                       const std::string& msg) {
  throw ParseError(path + ":" + std::to_string(e.line) + ": " + e.section +
                   "." + e.key + ": " + msg);
}

long long as_int(const std::string& path, const Entry& e) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(e.value, &pos);
  } catch (const std::exception&) {
    fail(path, e, "expected an integer, got '" + e.value + "'");
  }
  if (pos != e.value.size()) fail(path, e, "trailing characters after integer");
  return v;
}

double as_double(const std::string& path, const Entry& e) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(e.value, &pos);
  } catch (const std::exception&) {
    fail(path, e, "expected a number, got '" + e.value + "'");
  }
  if (pos != e.value.size()) fail(path, e, "trailing characters after number");
  return v;
}

bool as_bool(const std::string& path, const Entry& e) {
  if (e.value == "true" || e.value == "1") return true;
  if (e.value == "false" || e.value == "0") return false;
  fail(path, e, "expected true/false");
}

template <typename T>
std::vector<T> as_list(const std::string& path, const Entry& e) {
  std::vector<T> out;
  std::stringstream ss(e.value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(path, e, "empty list element");
    Entry sub = e;
    sub.value = item;
    out.push_back(static_cast<T>(as_int(path, sub)));
  }
  if (out.empty()) fail(path, e, "empty list");
  return out;
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  const auto entries = read_entries(path);
  RunConfig cfg;

  // The arm's joint count drives the defaults of every other section, so
  // resolve [arm] n_joints before anything else.
  int n = 4;
  for (const auto& e : entries) {
    if (e.section == "arm" && e.key == "n_joints")
      n = static_cast<int>(as_int(path, e));
  }
  cfg.arm = ArmModel::default_arm(n);
  cfg.plant = PlantModel::default_messy(n);
  cfg.data = DataParams::defaults(n);
  cfg.env = EnvConfig::defaults(n);

  for (const auto& e : entries) {
    if (e.section == "arm") {
      if (e.key == "n_joints") continue;  // handled above
      else if (e.key == "dt") cfg.arm.dt = as_double(path, e);
      else if (e.key == "gravity") cfg.arm.gravity = as_double(path, e);
      else fail(path, e, "unknown key");
    } else if (e.section == "plant") {
      if (e.key == "preset") {
        cfg.plant_preset = e.value;
        if (e.value == "messy") cfg.plant = PlantModel::default_messy(n);
        else if (e.value == "easy") cfg.plant = PlantModel::easy(n);
        else fail(path, e, "unknown preset (expected messy or easy)");
      } else fail(path, e, "unknown key");
    } else if (e.section == "data") {
      if (e.key == "n_traj") cfg.data.n_traj = static_cast<int>(as_int(path, e));
      else if (e.key == "duration") cfg.data.traj_duration = as_double(path, e);
      else if (e.key == "knot_interval") cfg.data.knot_interval = as_double(path, e);
      else if (e.key == "control_lo") {
        const double lo = as_double(path, e);
        for (auto& b : cfg.data.control_bounds) b.lo = lo;
      } else if (e.key == "control_hi") {
        const double hi = as_double(path, e);
        for (auto& b : cfg.data.control_bounds) b.hi = hi;
      } else if (e.key == "settle_steps") {
        cfg.data.settle_steps = static_cast<int>(as_int(path, e));
      } else if (e.key == "position_noise_std") {
        cfg.data.position_noise_std = as_double(path, e);
      } else if (e.key == "seed") {
        cfg.data.seed = static_cast<std::uint64_t>(as_int(path, e));
      } else if (e.key == "train_fraction") {
        cfg.train_fraction = as_double(path, e);
      } else fail(path, e, "unknown key");
    } else if (e.section == "gean") {
      if (e.key == "history_length") cfg.gean.history_length = static_cast<int>(as_int(path, e));
      else if (e.key == "history_stride") cfg.gean.history_stride = static_cast<int>(as_int(path, e));
      else if (e.key == "hidden_layers") cfg.gean.hidden_layers = static_cast<int>(as_int(path, e));
      else if (e.key == "hidden_width") cfg.gean.hidden_width = static_cast<int>(as_int(path, e));
      else if (e.key == "learning_rate") cfg.gean.learning_rate = as_double(path, e);
      else if (e.key == "epochs") cfg.gean.epochs = static_cast<int>(as_int(path, e));
      else if (e.key == "batch_size") cfg.gean.batch_size = static_cast<int>(as_int(path, e));
      else if (e.key == "loss") {
        try {
          cfg.gean.loss_kind = loss_kind_from_name(e.value);
        } catch (const std::invalid_argument& ex) {
          fail(path, e, ex.what());
        }
      } else if (e.key == "rollout_length") {
        cfg.gean.rollout_length = static_cast<int>(as_int(path, e));
      } else if (e.key == "unit_normalizers") {
        cfg.gean.unit_normalizers = as_bool(path, e);
      } else if (e.key == "ensemble_size") {
        cfg.gean.ensemble_size = static_cast<int>(as_int(path, e));
      } else if (e.key == "seed") {
        cfg.gean.seed = static_cast<std::uint64_t>(as_int(path, e));
      } else fail(path, e, "unknown key");
    } else if (e.section == "eval") {
      if (e.key == "horizons") cfg.eval.horizons = as_list<int>(path, e);
      else if (e.key == "start_stride") cfg.eval.start_stride = static_cast<int>(as_int(path, e));
      else if (e.key == "bootstrap_resamples") cfg.eval.bootstrap_resamples = static_cast<int>(as_int(path, e));
      else if (e.key == "dataset_sizes") cfg.eval.dataset_sizes = as_list<int>(path, e);
      else if (e.key == "history_lengths") cfg.eval.history_lengths = as_list<int>(path, e);
      else if (e.key == "history_strides") cfg.eval.history_strides = as_list<int>(path, e);
      else if (e.key == "rollout_lengths") cfg.eval.rollout_lengths = as_list<int>(path, e);
      else if (e.key == "sweep_seeds") cfg.eval.sweep_seeds = as_list<std::uint64_t>(path, e);
      else fail(path, e, "unknown key");
    } else if (e.section == "env") {
      if (e.key == "episode_steps") cfg.env.episode_steps = static_cast<int>(as_int(path, e));
      else if (e.key == "action_repeat") cfg.env.action_repeat = static_cast<int>(as_int(path, e));
      else if (e.key == "delta_u_max") cfg.env.delta_u_max = as_double(path, e);
      else if (e.key == "settle_steps") cfg.env.settle_steps = static_cast<int>(as_int(path, e));
      else if (e.key == "c_act") cfg.env.c_act = as_double(path, e);
      else if (e.key == "c_disag") cfg.env.c_disag = as_double(path, e);
      else if (e.key == "c_lim") cfg.env.c_lim = as_double(path, e);
      else if (e.key == "plan_horizon") cfg.env_plan_horizon = static_cast<int>(as_int(path, e));
      else if (e.key == "plan_candidates") cfg.env_plan_candidates = static_cast<int>(as_int(path, e));
      else fail(path, e, "unknown key");
    } else if (e.section == "io") {
      if (e.key == "out_dir") cfg.out_dir = e.value;
      else fail(path, e, "unknown key");
    } else {
      throw ParseError(path + ":" + std::to_string(e.line) +
                       ": unknown section [" + e.section + "]");
    }
  }

  namespace fs = std::filesystem;
  fs::path out(cfg.out_dir);
  if (out.is_relative())
    out = fs::path(path).parent_path() / out;
  cfg.out_dir = out.string();

  cfg.arm.validate();
  cfg.plant.validate();
  cfg.gean.validate();
  cfg.env.validate(cfg.arm);
  if (cfg.data.n_traj < 1) throw ParseError(path + ": data.n_traj must be >= 1");
  if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
    throw ParseError(path + ": data.train_fraction must be in (0, 1)");
  return cfg;
}

std::uint64_t file_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for hashing");
  std::uint64_t h = 14695981039346656037ULL;  // FNV-1a offset basis
  char c;
  while (f.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace gean
