// hda: command-line front end for the descent simulator and learning stack.
//
// Subcommands: gen-terrain, train-autoencoder, train, evaluate, run-episode.
// Every command is deterministic given config + seed; outputs carry the
// config digest. HDA_SEED overrides the configured seed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hda/autoencoder.hpp"
#include "hda/baselines.hpp"
#include "hda/config.hpp"
#include "hda/env.hpp"
#include "hda/safety.hpp"
#include "hda/td3.hpp"
#include "hda/terrain.hpp"

namespace fs = std::filesystem;
using namespace hda;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig load_run_config(const std::string& config_path) {
  RunConfig cfg = config_path.empty() ? RunConfig{} : load_config_file(config_path);
  if (const char* env_seed = std::getenv("HDA_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0') throw UsageError("HDA_SEED is not an integer");
    cfg.seed = v;
  }
  cfg.validate();
  return cfg;
}

// Prepend "# config <digest>" to a freshly written text artifact.
void embed_digest(const std::string& path, const std::string& digest) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot reopen " + path);
  std::ostringstream body;
  body << is.rdbuf();
  is.close();
  std::ofstream os(path, std::ios::trunc);
  os << "# config " << digest << "\n" << body.str();
}

std::string entry_path(const std::string& dir, const char* kind, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%03d.hdagrid", kind, index);
  return (fs::path(dir) / buf).string();
}

// ---------------------------------------------------------------- gen-terrain

void cmd_gen_terrain(const RunConfig& cfg, int training, int variation, const std::string& out_dir) {
  if (training + variation < 1) throw UsageError("gen-terrain: nothing to generate");
  fs::create_directories(out_dir);
  const std::string digest = config_digest(cfg);

  Rng seed_rng(cfg.seed);
  std::ostringstream manifest;
  manifest << "# columns: index split seed\n";
  const int total = training + variation;
  for (int i = 0; i < total; ++i) {
    const std::uint64_t seed = seed_rng.next_u64();
    TerrainParams p = cfg.terrain;
    p.seed = seed;
    const Dem dem = generate_terrain(p);
    const SafetyMaps maps = compute_safety_maps(dem, cfg.lander, cfg.safety);

    write_hdagrid(entry_path(out_dir, "dem", i), dem.heights, dem.resolution);
    Grid<float> vd(maps.v_d.rows(), maps.v_d.cols());
    for (size_t k = 0; k < vd.data().size(); ++k) vd.data()[k] = maps.v_d.data()[k];
    write_hdagrid(entry_path(out_dir, "vd", i), vd, dem.resolution);
    write_hdagrid(entry_path(out_dir, "vp", i), to_float_grid(maps.v_p), dem.resolution);

    const char* split = i < training ? "training" : "variation";
    manifest << i << " " << split << " " << seed << "\n";
    std::printf("terrain %d/%d (%s) seed=%llu\n", i + 1, total, split,
                static_cast<unsigned long long>(seed));
  }
  const std::string manifest_path = (fs::path(out_dir) / "manifest.txt").string();
  {
    std::ofstream os(manifest_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + manifest_path);
    os << manifest.str();
  }
  embed_digest(manifest_path, digest);
  std::printf("wrote %d terrain/safety pairs to %s (config %s)\n", total, out_dir.c_str(),
              digest.c_str());
}

// ------------------------------------------------------------ terrain loading

struct ManifestRow {
  int index = 0;
  std::string split;
  std::uint64_t seed = 0;
};

std::vector<ManifestRow> read_manifest(const std::string& dir) {
  const std::string path = (fs::path(dir) / "manifest.txt").string();
  std::ifstream is(path);
  if (!is) {
    throw std::runtime_error("terrain library not found at " + dir +
                             " (missing manifest.txt); run `hda gen-terrain` first");
  }
  std::vector<ManifestRow> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    ManifestRow r;
    std::istringstream ss(line);
    if (!(ss >> r.index >> r.split >> r.seed)) {
      throw std::runtime_error("malformed manifest line in " + path + ": " + line);
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("empty terrain manifest: " + path);
  return rows;
}

// split: "training", "variation", or "" for all. max_count 0 = no limit.
std::shared_ptr<TerrainLibrary> load_library(const RunConfig& cfg, const std::string& split,
                                             int max_count, bool hard_eval) {
  const std::string& dir = cfg.paths.terrain_dir;
  std::vector<ManifestRow> rows = read_manifest(dir);
  auto lib = std::make_shared<TerrainLibrary>();
  for (const ManifestRow& r : rows) {
    if (!split.empty() && r.split != split) continue;
    if (max_count > 0 && static_cast<int>(lib->size()) >= max_count) break;
    TerrainEntry entry;
    double res = 1.0;
    entry.dem.heights = read_hdagrid(entry_path(dir, "dem", r.index), &res);
    entry.dem.resolution = res;
    const Grid<float> vd = read_hdagrid(entry_path(dir, "vd", r.index));
    entry.maps.v_d = Grid<std::uint8_t>(vd.rows(), vd.cols());
    for (size_t k = 0; k < vd.data().size(); ++k) {
      entry.maps.v_d.data()[k] = vd.data()[k] > 0.5f ? 1 : 0;
    }
    entry.maps.v_p = to_double_grid(read_hdagrid(entry_path(dir, "vp", r.index)));
    if (hard_eval) index_hard_targets(entry, cfg.env);
    lib->push_back(std::move(entry));
  }
  if (lib->empty()) {
    throw std::runtime_error("no terrain entries for split \"" + split + "\" in " + dir);
  }
  return lib;
}

// ------------------------------------------------------------------- encoders

EncoderFn zero_encoder() {
  return [](const Grid<double>&) { return std::vector<double>(kLatentDim, 0.0); };
}

EncoderFn load_encoder(const RunConfig& cfg, bool required) {
  const std::string& path = cfg.paths.autoencoder_checkpoint;
  if (!fs::exists(path)) {
    if (required) {
      throw std::runtime_error("autoencoder checkpoint missing: " + path +
                               "; run `hda train-autoencoder` first");
    }
    return zero_encoder();
  }
  auto model = std::make_shared<AutoencoderModel>(AutoencoderModel::load_file(path));
  return [model](const Grid<double>& map) { return encode(*model, map); };
}

// --------------------------------------------------------- train-autoencoder

void cmd_train_autoencoder(const RunConfig& cfg, int rollouts) {
  if (rollouts < 1) throw UsageError("train-autoencoder: --rollouts must be positive");
  auto lib = load_library(cfg, "training", 0, false);
  EnvConfig env_cfg = cfg.env;
  env_cfg.difficulty = Difficulty::TrainingRandom;
  Environment env(env_cfg, lib, zero_encoder());

  Rng seed_rng(cfg.seed);
  Rng action_rng = seed_rng.spawn();
  std::vector<std::vector<double>> dataset;
  for (int ep = 0; ep < rollouts; ++ep) {
    env.reset(seed_rng.next_u64());
    while (!env.done()) {
      dataset.push_back(flatten(env.last_frame().o_p));
      std::array<double, kActionDim> unit{};
      for (double& u : unit) u = action_rng.uniform();
      env.step(scale_action(unit, env_cfg));
    }
  }
  std::printf("collected %zu observation maps from %d rollouts\n", dataset.size(), rollouts);

  AutoencoderConfig ae = cfg.autoencoder;
  ae.seed = cfg.seed;
  AutoencoderHistory history;
  const AutoencoderModel model = train_autoencoder(dataset, ae, &history);
  for (size_t e = 0; e < history.train_mse.size(); ++e) {
    std::printf("epoch %zu train_mse %.6f holdout_mse %.6f\n", e + 1, history.train_mse[e],
                e < history.holdout_mse.size() ? history.holdout_mse[e] : 0.0);
  }

  const std::string& path = cfg.paths.autoencoder_checkpoint;
  fs::create_directories(fs::path(path).parent_path());
  model.save_file(path);

  const std::string digest = config_digest(cfg);
  {
    std::ofstream meta(path + ".meta", std::ios::trunc);
    meta << "config " << digest << "\n";
    meta << "maps " << dataset.size() << "\n";
    if (!history.train_mse.empty()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.17g", history.train_mse.back());
      meta << "final_train_mse " << buf << "\n";
      if (!history.holdout_mse.empty()) {
        std::snprintf(buf, sizeof(buf), "%.17g", history.holdout_mse.back());
        meta << "final_holdout_mse " << buf << "\n";
      }
    }
  }
  std::printf("saved autoencoder to %s (config %s)\n", path.c_str(), digest.c_str());
}

// ---------------------------------------------------------------------- train

void cmd_train(const RunConfig& cfg, long updates, int terrains, bool train_ae, bool resume,
               long checkpoint_every) {
  if (updates < 1) throw UsageError("train: --updates must be positive");
  if (train_ae) cmd_train_autoencoder(cfg, cfg.autoencoder_rollouts);

  auto lib = load_library(cfg, "training", terrains, false);
  EnvConfig env_cfg = cfg.env;
  env_cfg.difficulty = Difficulty::TrainingRandom;
  auto env = std::make_shared<Environment>(env_cfg, lib, load_encoder(cfg, true));

  const std::string ckpt_dir = (fs::path(cfg.paths.train_dir) / "checkpoint").string();
  const std::string log_path = (fs::path(cfg.paths.train_dir) / "train_log.csv").string();
  const std::string digest = config_digest(cfg);
  fs::create_directories(cfg.paths.train_dir);

  std::unique_ptr<Td3Trainer> trainer;
  std::ofstream log;
  if (resume) {
    if (!fs::exists(ckpt_dir)) {
      throw std::runtime_error("no checkpoint to resume at " + ckpt_dir);
    }
    trainer = std::make_unique<Td3Trainer>(Td3Trainer::load(ckpt_dir, env, cfg.td3));
    log.open(log_path, std::ios::app);
  } else {
    trainer = std::make_unique<Td3Trainer>(env, cfg.td3, cfg.seed);
    log.open(log_path, std::ios::trunc);
    log << "# config " << digest << "\n";
    log << "update,env_step,episode,critic_loss,actor_objective,mean_reward,safe_landing_rate\n";
  }
  if (!log) throw std::runtime_error("cannot write " + log_path);

  const auto log_cb = [&](const TrainLogRow& row) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%ld,%ld,%ld,%.9g,%.9g,%.9g,%.9g\n", row.update, row.env_step,
                  row.episode, row.critic_loss, row.actor_objective, row.mean_reward,
                  row.safe_landing_rate);
    log << buf;
    std::printf("update %ld episode %ld mean_reward %.3f safe %.2f critic_loss %.4f\n", row.update,
                row.episode, row.mean_reward, row.safe_landing_rate, row.critic_loss);
  };

  const auto checkpoint = [&]() {
    fs::create_directories(ckpt_dir);
    trainer->save(ckpt_dir);
    std::ofstream meta((fs::path(ckpt_dir) / "config_digest.txt").string(), std::ios::trunc);
    meta << digest << "\n";
    save_config_file((fs::path(ckpt_dir) / "config.json").string(), cfg);
    log.flush();
  };

  while (trainer->updates() < updates) {
    const long next = checkpoint_every > 0
                          ? std::min(updates, trainer->updates() + checkpoint_every)
                          : updates;
    trainer->run(next, log_cb);
    checkpoint();
  }
  std::printf("trained to %ld updates (%ld env steps, %ld episodes); checkpoint at %s (config %s)\n",
              trainer->updates(), trainer->env_steps(), trainer->episodes(), ckpt_dir.c_str(),
              digest.c_str());
}

// ------------------------------------------------------------------- policies

std::shared_ptr<const Td3Agent> load_agent(const RunConfig& cfg, bool required) {
  const std::string path = (fs::path(cfg.paths.train_dir) / "checkpoint" / "agent.ckpt").string();
  if (!fs::exists(path)) {
    if (required) {
      throw std::runtime_error("agent checkpoint missing: " + path + "; run `hda train` first");
    }
    return nullptr;
  }
  std::ifstream is(path);
  return std::make_shared<Td3Agent>(Td3Agent::load(is, cfg.td3));
}

std::unique_ptr<Policy> make_policy(const RunConfig& cfg, const std::string& name) {
  if (name == "agent") return std::make_unique<AgentPolicy>(load_agent(cfg, true));
  if (name == "fixed") return std::make_unique<FixedControlPolicy>(load_agent(cfg, false));
  if (name == "single") return std::make_unique<SingleDivertPolicy>();
  throw UsageError("unknown policy \"" + name + "\" (expected agent, fixed, or single)");
}

Difficulty parse_difficulty(const RunConfig& cfg, const std::string& s) {
  if (s.empty()) return cfg.env.difficulty;
  if (s == "training") return Difficulty::TrainingRandom;
  if (s == "hard") return Difficulty::HardEval;
  throw UsageError("unknown difficulty \"" + s + "\" (expected training or hard)");
}

Environment make_eval_env(const RunConfig& cfg, const std::string& policy_name,
                          Difficulty difficulty) {
  // Evaluation prefers the held-out variation split; falls back to everything
  // when the manifest has no variation entries.
  std::shared_ptr<TerrainLibrary> lib;
  try {
    lib = load_library(cfg, "variation", 0, difficulty == Difficulty::HardEval);
  } catch (const std::runtime_error&) {
    lib = load_library(cfg, "", 0, difficulty == Difficulty::HardEval);
  }
  EnvConfig env_cfg = cfg.env;
  env_cfg.difficulty = difficulty;
  const bool needs_latent = policy_name == "agent" || policy_name == "fixed";
  return Environment(env_cfg, lib, load_encoder(cfg, needs_latent && policy_name == "agent"));
}

// ------------------------------------------------------------------- evaluate

void cmd_evaluate(const RunConfig& cfg, const std::string& policy_name, int n,
                  const std::string& difficulty_str) {
  if (n < 1) throw UsageError("evaluate: --n must be positive");
  std::unique_ptr<Policy> policy = make_policy(cfg, policy_name);
  Environment env = make_eval_env(cfg, policy_name, parse_difficulty(cfg, difficulty_str));

  const EvalSummary summary = evaluate(*policy, env, n, cfg.seed);
  const std::string digest = config_digest(cfg);
  fs::create_directories(cfg.paths.eval_dir);
  const fs::path dir(cfg.paths.eval_dir);
  const std::string summary_path = (dir / ("eval_summary_" + policy_name + ".csv")).string();
  const std::string episodes_path = (dir / ("episodes_" + policy_name + ".csv")).string();
  const std::string hist_path = (dir / ("histograms_" + policy_name + ".csv")).string();
  write_eval_summary_csv(summary_path, {summary});
  write_episodes_csv(episodes_path, summary);
  write_histograms_csv(hist_path, summary);
  embed_digest(summary_path, digest);
  embed_digest(episodes_path, digest);
  embed_digest(hist_path, digest);

  std::printf("%s\n", format_table_row(summary).c_str());
  std::printf("wrote %s (config %s)\n", summary_path.c_str(), digest.c_str());
}

// ---------------------------------------------------------------- run-episode

void draw_pixel(Grid<std::uint8_t>& img, int r, int c, std::uint8_t v) {
  if (img.contains(r, c)) img(r, c) = v;
}

void render_frame(const std::string& path, const Environment& env) {
  const TerrainEntry& entry = env.terrain();
  const Dem& dem = entry.dem;
  Grid<std::uint8_t> img(dem.rows(), dem.cols());
  for (size_t k = 0; k < img.data().size(); ++k) {
    img.data()[k] = entry.maps.v_d.data()[k] ? 230 : 60;
  }
  // FOV rectangle border (side = fov_width at this epoch).
  const ObservationFrame& f = env.last_frame();
  const int r0 = static_cast<int>(std::lround(dem.row_of(f.center_y - f.w_y / 2.0)));
  const int r1 = static_cast<int>(std::lround(dem.row_of(f.center_y + f.w_y / 2.0)));
  const int c0 = static_cast<int>(std::lround(dem.col_of(f.center_x - f.w_x / 2.0)));
  const int c1 = static_cast<int>(std::lround(dem.col_of(f.center_x + f.w_x / 2.0)));
  for (int c = c0; c <= c1; ++c) {
    draw_pixel(img, r0, c, 150);
    draw_pixel(img, r1, c, 150);
  }
  for (int r = r0; r <= r1; ++r) {
    draw_pixel(img, r, c0, 150);
    draw_pixel(img, r, c1, 150);
  }
  // Target cross.
  const int tr = static_cast<int>(std::lround(dem.row_of(env.target_y())));
  const int tc = static_cast<int>(std::lround(dem.col_of(env.target_x())));
  for (int d = -3; d <= 3; ++d) {
    draw_pixel(img, tr + d, tc, 255);
    draw_pixel(img, tr, tc + d, 255);
  }
  // Ground track so far.
  for (const InnerLogRow& row : env.inner_log()) {
    draw_pixel(img, static_cast<int>(std::lround(dem.row_of(row.r.y))),
               static_cast<int>(std::lround(dem.col_of(row.r.x))), 0);
  }
  write_pgm8(path, img);
}

void cmd_run_episode(const RunConfig& cfg, const std::string& policy_name, std::uint64_t seed,
                     bool render, const std::string& out_dir) {
  std::unique_ptr<Policy> policy = make_policy(cfg, policy_name);
  Environment env = make_eval_env(cfg, policy_name, cfg.env.difficulty);
  fs::create_directories(out_dir);
  const std::string digest = config_digest(cfg);

  AgentObservation obs = env.reset(seed);
  policy->begin_episode(env);
  int frame_idx = 0;
  char name[64];
  while (!env.done()) {
    if (render) {
      std::snprintf(name, sizeof(name), "frame_%03d.pgm", frame_idx++);
      render_frame((fs::path(out_dir) / name).string(), env);
    }
    const PolicyDecision d = policy->decide(env, obs);
    obs = env.step(d.action, d.recompute_tgo).observation;
  }
  if (render) {
    std::snprintf(name, sizeof(name), "frame_%03d.pgm", frame_idx);
    render_frame((fs::path(out_dir) / name).string(), env);
  }

  const std::string traj_path = (fs::path(out_dir) / "trajectory.csv").string();
  {
    std::ofstream os(traj_path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + traj_path);
    os << "t,x,y,z,vx,vy,vz,m,thrust_n,theta_g_deg,k_r,k_v,t_go\n";
    char buf[400];
    for (const InnerLogRow& r : env.inner_log()) {
      std::snprintf(buf, sizeof(buf),
                    "%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", r.t,
                    r.r.x, r.r.y, r.r.z, r.v.x, r.v.y, r.v.z, r.m, r.thrust_mag, r.theta_g, r.k_r,
                    r.k_v, r.t_go);
      os << buf;
    }
  }
  embed_digest(traj_path, digest);

  const EpisodeInfo& info = env.info();
  std::printf("episode seed=%llu cause=%s epochs=%d miss=%.3f m speed=%.3f m/s fuel=%.2f kg "
              "v_d=%d reward=%.3f\n",
              static_cast<unsigned long long>(seed), termination_cause_name(info.cause),
              env.epoch_index(), info.miss_distance, info.final_speed, info.fuel_used_kg,
              info.v_d_at_touchdown, info.total_reward);
  std::printf("wrote %s (config %s)\n", traj_path.c_str(), digest.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop powered-descent simulator: terrain, safety maps, ZEM/ZEV guidance, "
               "and TD3 landing-site selection"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON run configuration (defaults used when omitted)");

  // gen-terrain
  auto* gen = app.add_subcommand("gen-terrain", "Generate DEMs with paired safety maps");
  int gen_training = -1, gen_variation = -1, gen_count = -1;
  std::string gen_out;
  gen->add_option("--training", gen_training, "training-split count (default from config: 70)");
  gen->add_option("--variation", gen_variation, "variation-split count (default from config: 18)");
  gen->add_option("--count", gen_count, "shorthand: N training terrains, 0 variation");
  gen->add_option("--out", gen_out, "output directory (default: config paths.terrain_dir)");

  // train-autoencoder
  auto* tae = app.add_subcommand("train-autoencoder",
                                 "Collect random-policy observations and train the map encoder");
  int tae_rollouts = -1;
  tae->add_option("--rollouts", tae_rollouts, "episodes to roll out (default from config: 200)");

  // train
  auto* train = app.add_subcommand("train", "TD3 training with periodic resumable checkpoints");
  long train_updates = -1, train_ckpt_every = 0;
  int train_terrains = 0;
  bool train_ae = false, train_resume = false;
  train->add_option("--updates", train_updates, "total gradient updates (default from config)");
  train->add_option("--terrains", train_terrains, "limit the terrain library (0 = all)");
  train->add_option("--checkpoint-every", train_ckpt_every, "updates between checkpoints (0 = end only)");
  train->add_flag("--train-autoencoder", train_ae, "train the autoencoder first");
  train->add_flag("--resume", train_resume, "resume from the checkpoint directory");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Monte Carlo evaluation; prints the summary row");
  std::string ev_policy, ev_difficulty;
  int ev_n = 100;
  ev->add_option("--policy", ev_policy, "agent | fixed | single")->required();
  ev->add_option("--n", ev_n, "episode count (default 100)");
  ev->add_option("--difficulty", ev_difficulty, "training | hard (default from config)");

  // run-episode
  auto* run = app.add_subcommand("run-episode", "Single episode: trajectory CSV, optional renders");
  std::string run_policy = "single", run_out;
  std::uint64_t run_seed = 0;
  bool run_render = false;
  run->add_option("--policy", run_policy, "agent | fixed | single (default single)");
  run->add_option("--seed", run_seed, "episode seed (default 0)");
  run->add_flag("--render", run_render, "write PGM frames of the safety map with FOV + track");
  run->add_option("--out", run_out, "output directory (default: paths.eval_dir/episode)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const RunConfig cfg = load_run_config(config_path);
    if (gen->parsed()) {
      int training = gen_training >= 0 ? gen_training : cfg.terrain_count_training;
      int variation = gen_variation >= 0 ? gen_variation : cfg.terrain_count_variation;
      if (gen_count >= 0) {
        training = gen_count;
        variation = 0;
      }
      cmd_gen_terrain(cfg, training, variation, gen_out.empty() ? cfg.paths.terrain_dir : gen_out);
    } else if (tae->parsed()) {
      cmd_train_autoencoder(cfg, tae_rollouts >= 0 ? tae_rollouts : cfg.autoencoder_rollouts);
    } else if (train->parsed()) {
      cmd_train(cfg, train_updates >= 0 ? train_updates : cfg.td3.total_updates, train_terrains,
                train_ae, train_resume, train_ckpt_every);
    } else if (ev->parsed()) {
      cmd_evaluate(cfg, ev_policy, ev_n, ev_difficulty);
    } else if (run->parsed()) {
      cmd_run_episode(cfg, run_policy, run_seed, run_render,
                      run_out.empty() ? (fs::path(cfg.paths.eval_dir) / "episode").string()
                                      : run_out);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
