// Experiment driver: data generation, training, replay evaluation,
// ablation sweeps, and reacher-environment rollouts, all from one config
// file with deterministic seeding and a manifest beside every artifact.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gean/config.hpp"
#include "gean/evalharness.hpp"
#include "gean/gean.hpp"
#include "gean/io_util.hpp"
#include "gean/reacher_env.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using gean::RunConfig;

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& config_path, std::uint64_t seed) {
  nlohmann::json m;
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = std::filesystem::absolute(config_path).string();
  m["config_hash"] = hex64(gean::file_hash(config_path));
  m["seed"] = seed;
  std::ofstream f(out_path + ".manifest.json");
  if (!f) throw std::runtime_error("cannot write manifest for " + out_path);
  f << m.dump(2) << "\n";
  std::cout << "seed " << seed << "\n";
}

std::string default_out(const RunConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

int cmd_gen_data(const std::string& config_path, std::string out) {
  const RunConfig cfg = gean::load_run_config(config_path);
  if (out.empty()) out = default_out(cfg, "dataset.txt");
  const gean::Dataset ds = gean::collect_dataset(cfg.plant, cfg.arm, cfg.data);
  gean::save_dataset(ds, out);
  write_manifest(out, "gen-data", config_path, cfg.data.seed);
  std::cout << "wrote " << out << " (" << ds.trajectories.size()
            << " trajectories, " << ds.total_samples() << " samples)\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& data_path,
              const std::string& loss, std::string out) {
  RunConfig cfg = gean::load_run_config(config_path);
  if (!loss.empty()) cfg.gean.loss_kind = gean::loss_kind_from_name(loss);
  if (out.empty()) out = default_out(cfg, "ensemble.txt");
  const gean::Dataset ds = gean::load_dataset(data_path);
  const auto [train_set, val_set] =
      gean::split_dataset(ds, cfg.train_fraction, cfg.gean.seed, cfg.arm);
  const gean::EnsembleTrainResult r =
      gean::train_ensemble(cfg.gean, cfg.arm, train_set, val_set);
  gean::save_ensemble(r.ensemble, out);
  const std::string stem =
      (std::filesystem::path(out).parent_path() /
       std::filesystem::path(out).stem())
          .string();
  for (std::size_t i = 0; i < r.curves.size(); ++i)
    gean::write_train_curve(r.curves[i],
                            stem + "_curve_" + std::to_string(i) + ".csv");
  write_manifest(out, "train", config_path, cfg.gean.seed);
  std::cout << "wrote " << out << " (" << r.ensemble.size() << " members, loss "
            << gean::loss_kind_name(cfg.gean.loss_kind) << ")\n";
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& data_path,
             const std::string& model_path, const std::string& ensemble_path,
             std::string out) {
  const RunConfig cfg = gean::load_run_config(config_path);
  if (out.empty()) out = default_out(cfg, "replay.csv");
  const gean::Dataset test_set = gean::load_dataset(data_path);
  gean::ReplayConfig rc;
  rc.horizons = cfg.eval.horizons;
  rc.start_stride = cfg.eval.start_stride;
  rc.bootstrap_resamples = cfg.eval.bootstrap_resamples;
  rc.seed = cfg.gean.seed;

  gean::ReplayReport report;
  std::string provider;
  if (!model_path.empty()) {
    const gean::GeanModel model = gean::load_model(model_path);
    report = gean::replay_error(cfg.arm, test_set, gean::TorqueProvider::kModel,
                                &model, nullptr, rc);
    provider = "model";
  } else {
    const gean::Ensemble ensemble = gean::load_ensemble(ensemble_path);
    report = gean::replay_error(cfg.arm, test_set,
                                gean::TorqueProvider::kEnsemble, nullptr,
                                &ensemble, rc);
    provider = "ensemble";
  }
  gean::write_replay_csv(report, provider, out);
  write_manifest(out, "eval", config_path, rc.seed);
  for (const auto& h : report.horizons)
    std::cout << "horizon " << h.horizon_steps << ": " << h.mean_deg
              << " deg (zero baseline " << h.zero_baseline_deg << ")\n";
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& data_path,
               const std::string& axis, std::string out) {
  const RunConfig cfg = gean::load_run_config(config_path);
  if (out.empty()) out = default_out(cfg, "ablation_" + axis + ".csv");
  const gean::Dataset ds = gean::load_dataset(data_path);
  // The held-out split doubles as validation (for snapshotting) and test
  // (for replay): the sweeps compare configurations, not final scores.
  const auto [train_set, test_set] =
      gean::split_dataset(ds, cfg.train_fraction, cfg.gean.seed, cfg.arm);
  gean::ReplayConfig rc;
  rc.horizons = cfg.eval.horizons;
  rc.start_stride = cfg.eval.start_stride;
  rc.bootstrap_resamples = cfg.eval.bootstrap_resamples;
  rc.seed = cfg.gean.seed;

  std::vector<gean::AblationRow> rows;
  if (axis == "loss") {
    rows = gean::ablate_loss(cfg.arm, train_set, test_set, test_set,
                             {gean::LossKind::kTorque, gean::LossKind::kPosition},
                             cfg.eval.sweep_seeds, cfg.gean, rc);
  } else if (axis == "dataset-size") {
    rows = gean::ablate_dataset_size(cfg.arm, train_set, test_set, test_set,
                                     cfg.eval.dataset_sizes,
                                     cfg.eval.sweep_seeds, cfg.gean, rc);
  } else if (axis == "history") {
    rows = gean::ablate_history(cfg.arm, train_set, test_set, test_set,
                                cfg.eval.history_lengths,
                                {cfg.gean.history_stride},
                                cfg.eval.sweep_seeds, cfg.gean, rc);
  } else if (axis == "stride") {
    rows = gean::ablate_history(cfg.arm, train_set, test_set, test_set,
                                {cfg.gean.history_length},
                                cfg.eval.history_strides,
                                cfg.eval.sweep_seeds, cfg.gean, rc);
  } else if (axis == "rollout-length") {
    rows = gean::ablate_rollout_length(cfg.arm, train_set, test_set, test_set,
                                       cfg.eval.rollout_lengths,
                                       cfg.eval.sweep_seeds, cfg.gean, rc);
  } else {
    throw CLI::ValidationError("--axis", "unknown axis '" + axis + "'");
  }
  gean::write_ablation_csv(rows, out);
  write_manifest(out, "ablate", config_path, cfg.gean.seed);
  std::cout << "wrote " << out << " (" << rows.size() << " configurations)\n";
  return 0;
}

int cmd_env_run(const std::string& config_path, const std::string& ensemble_path,
                int episodes, const std::string& controller, std::string out) {
  const RunConfig cfg = gean::load_run_config(config_path);
  if (out.empty()) out = default_out(cfg, "episodes");
  gean::Ensemble ensemble = gean::load_ensemble(ensemble_path);
  gean::ReacherEnv env(cfg.arm, std::move(ensemble), cfg.env);
  const int n = cfg.arm.n_joints;

  int successes = 0;
  double total_final_err = 0.0;
  for (int ep = 0; ep < episodes; ++ep) {
    const std::uint64_t ep_seed = cfg.gean.seed + static_cast<std::uint64_t>(ep);
    env.reset(ep_seed);
    std::mt19937_64 act_rng(ep_seed ^ 0x616374696f6e7365ULL);
    std::normal_distribution<double> draw(0.0, 1.0);

    std::ofstream log(out + "_ep" + std::to_string(ep) + ".csv");
    log << "agent_step,t";
    for (const char* base : {"q", "qdot", "u", "action"})
      for (int j = 0; j < n; ++j) log << "," << base << j;
    log << ",reward,r_dist,r_act,r_disag,r_lim";
    for (int j = 0; j < n; ++j) log << ",disagreement" << j;
    log << "\n";

    while (!env.done()) {
      gean::Vec action = gean::Vec::Zero(n);
      if (controller == "shooting") {
        action = gean::shooting_controller(
            env, cfg.env_plan_horizon, cfg.env_plan_candidates,
            ep_seed * 1000 + env.steps_done());
      } else if (controller == "random") {
        for (int j = 0; j < n; ++j) action[j] = draw(act_rng);
      }  // "zero" keeps the zero action
      const gean::StepResult sr = env.step(action);
      log << env.steps_done() << "," << gean::fmt17(env.sim_time());
      const gean::Vec& q = env.joint_state().q;
      const gean::Vec& qd = env.joint_state().qdot;
      for (int j = 0; j < n; ++j) log << "," << gean::fmt17(q[j]);
      for (int j = 0; j < n; ++j) log << "," << gean::fmt17(qd[j]);
      for (int j = 0; j < n; ++j) log << "," << gean::fmt17(env.command()[j]);
      for (int j = 0; j < n; ++j) log << "," << gean::fmt17(action[j]);
      log << "," << gean::fmt17(sr.reward) << "," << gean::fmt17(sr.terms.dist)
          << "," << gean::fmt17(sr.terms.act) << ","
          << gean::fmt17(sr.terms.disag) << "," << gean::fmt17(sr.terms.lim);
      for (int j = 0; j < n; ++j)
        log << "," << gean::fmt17(sr.disagreement[j]);
      log << "\n";
    }
    const double final_err_deg =
        (env.joint_state().q - env.goal()).cwiseAbs().mean() * 180.0 /
        3.14159265358979323846;
    const bool ok = gean::success(env.joint_state().q, env.goal());
    successes += ok ? 1 : 0;
    total_final_err += final_err_deg;
  }

  nlohmann::json summary;
  summary["episodes"] = episodes;
  summary["controller"] = controller;
  summary["success_rate"] = static_cast<double>(successes) / episodes;
  summary["mean_final_error_deg"] = total_final_err / episodes;
  std::ofstream sf(out + "_summary.json");
  sf << summary.dump(2) << "\n";
  write_manifest(out + "_summary.json", "env-run", config_path, cfg.gean.seed);
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned-actuator sim-to-real toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  std::string config_path, data_path, model_path, ensemble_path, out;
  std::string loss, axis = "loss", controller = "shooting";
  int episodes = 5;

  auto* gen = app.add_subcommand("gen-data", "Collect exploration data");
  gen->add_option("-c,--config", config_path)->required();
  gen->add_option("--out", out);

  auto* train = app.add_subcommand("train", "Train a model ensemble");
  train->add_option("-c,--config", config_path)->required();
  train->add_option("--data", data_path)->required();
  train->add_option("--loss", loss)
      ->check(CLI::IsMember({"torque", "position", "multistep"}));
  train->add_option("--out", out);

  auto* eval = app.add_subcommand("eval", "Replay-error evaluation");
  eval->add_option("-c,--config", config_path)->required();
  eval->add_option("--test-data", data_path)->required();
  auto* mopt = eval->add_option("--model", model_path);
  eval->add_option("--ensemble", ensemble_path)->excludes(mopt);
  eval->add_option("--out", out);

  auto* abl = app.add_subcommand("ablate", "Run an ablation sweep");
  abl->add_option("-c,--config", config_path)->required();
  abl->add_option("--data", data_path)->required();
  abl->add_option("--axis", axis)
      ->check(CLI::IsMember(
          {"loss", "dataset-size", "history", "stride", "rollout-length"}));
  abl->add_option("--out", out);

  auto* run = app.add_subcommand("env-run", "Roll out reacher episodes");
  run->add_option("-c,--config", config_path)->required();
  run->add_option("--ensemble", ensemble_path)->required();
  run->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
  run->add_option("--controller", controller)
      ->check(CLI::IsMember({"shooting", "random", "zero"}));
  run->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors exit with 2
  }

  try {
    if (gen->parsed()) return cmd_gen_data(config_path, out);
    if (train->parsed()) return cmd_train(config_path, data_path, loss, out);
    if (eval->parsed()) {
      if (model_path.empty() && ensemble_path.empty()) {
        std::cerr << "eval: need --model or --ensemble\n";
        return 2;
      }
      return cmd_eval(config_path, data_path, model_path, ensemble_path, out);
    }
    if (abl->parsed()) return cmd_ablate(config_path, data_path, axis, out);
    if (run->parsed())
      return cmd_env_run(config_path, ensemble_path, episodes, controller, out);
  } catch (const CLI::Error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gean::ParseError& e) {
    std::cerr << "config/format error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
