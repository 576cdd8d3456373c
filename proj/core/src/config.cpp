#include "hda/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace hda {

namespace {

using nlohmann::json;

[[noreturn]] void unknown_key(const std::string& ctx, const std::string& key) {
  throw std::invalid_argument("config: unknown key \"" + (ctx.empty() ? key : ctx + "." + key) +
                              "\"");
}

void apply_terrain(const json& j, TerrainParams& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "rows") p.rows = v.get<int>();
    else if (k == "cols") p.cols = v.get<int>();
    else if (k == "resolution") p.resolution = v.get<double>();
    else if (k == "base_noise_amplitude") p.base_noise_amplitude = v.get<double>();
    else if (k == "base_noise_sigma_px") p.base_noise_sigma_px = v.get<double>();
    else if (k == "crater_density") p.crater_density = v.get<double>();
    else if (k == "crater_diameter_min") p.crater_diameter_min = v.get<double>();
    else if (k == "crater_diameter_max") p.crater_diameter_max = v.get<double>();
    else if (k == "boulder_k") p.boulder_k = v.get<double>();
    else if (k == "boulder_q") p.boulder_q = v.get<double>();
    else if (k == "boulder_diameter_min") p.boulder_diameter_min = v.get<double>();
    else if (k == "boulder_diameter_max") p.boulder_diameter_max = v.get<double>();
    else if (k == "max_relief") p.max_relief = v.get<double>();
    else if (k == "seed") p.seed = v.get<std::uint64_t>();
    else unknown_key(ctx, k);
  }
}

json terrain_to_json(const TerrainParams& p) {
  return json{{"rows", p.rows},
              {"cols", p.cols},
              {"resolution", p.resolution},
              {"base_noise_amplitude", p.base_noise_amplitude},
              {"base_noise_sigma_px", p.base_noise_sigma_px},
              {"crater_density", p.crater_density},
              {"crater_diameter_min", p.crater_diameter_min},
              {"crater_diameter_max", p.crater_diameter_max},
              {"boulder_k", p.boulder_k},
              {"boulder_q", p.boulder_q},
              {"boulder_diameter_min", p.boulder_diameter_min},
              {"boulder_diameter_max", p.boulder_diameter_max},
              {"max_relief", p.max_relief},
              {"seed", p.seed}};
}

void apply_lander(const json& j, LanderGeometry& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "base_diameter") p.base_diameter = v.get<double>();
    else if (k == "pad_count") p.pad_count = v.get<int>();
    else if (k == "orientation_count") p.orientation_count = v.get<int>();
    else unknown_key(ctx, k);
  }
}

json lander_to_json(const LanderGeometry& p) {
  return json{{"base_diameter", p.base_diameter},
              {"pad_count", p.pad_count},
              {"orientation_count", p.orientation_count}};
}

void apply_safety(const json& j, SafetyThresholds& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "slope_max_deg") p.slope_max_deg = v.get<double>();
    else if (k == "roughness_max") p.roughness_max = v.get<double>();
    else unknown_key(ctx, k);
  }
}

json safety_to_json(const SafetyThresholds& p) {
  return json{{"slope_max_deg", p.slope_max_deg}, {"roughness_max", p.roughness_max}};
}

void apply_vehicle(const json& j, VehicleParams& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "m_0") p.m_0 = v.get<double>();
    else if (k == "m_dry") p.m_dry = v.get<double>();
    else if (k == "i_sp") p.i_sp = v.get<double>();
    else if (k == "t_max") p.t_max = v.get<double>();
    else if (k == "g") {
      if (!v.is_array() || v.size() != 3) {
        throw std::invalid_argument("config: " + ctx + ".g must be a 3-element array");
      }
      p.g = Vec3{v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    } else if (k == "g_ref") p.g_ref = v.get<double>();
    else if (k == "thrust_error_ratio") p.thrust_error_ratio = v.get<double>();
    else unknown_key(ctx, k);
  }
}

json vehicle_to_json(const VehicleParams& p) {
  return json{{"m_0", p.m_0},
              {"m_dry", p.m_dry},
              {"i_sp", p.i_sp},
              {"t_max", p.t_max},
              {"g", {p.g.x, p.g.y, p.g.z}},
              {"g_ref", p.g_ref},
              {"thrust_error_ratio", p.thrust_error_ratio}};
}

void apply_sensor(const json& j, SensorParams& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "fov_deg") p.fov_deg = v.get<double>();
    else if (k == "dem_size") p.dem_size = v.get<int>();
    else if (k == "noise_range_scale") p.noise_range_scale = v.get<double>();
    else if (k == "noise_sigma_slope") p.noise_sigma_slope = v.get<double>();
    else if (k == "mask_elevation_min_deg") p.mask_elevation_min_deg = v.get<double>();
    else if (k == "interval_s") p.interval_s = v.get<double>();
    else unknown_key(ctx, k);
  }
}

json sensor_to_json(const SensorParams& p) {
  return json{{"fov_deg", p.fov_deg},
              {"dem_size", p.dem_size},
              {"noise_range_scale", p.noise_range_scale},
              {"noise_sigma_slope", p.noise_sigma_slope},
              {"mask_elevation_min_deg", p.mask_elevation_min_deg},
              {"interval_s", p.interval_s}};
}

Difficulty difficulty_from_string(const std::string& s) {
  if (s == "training_random") return Difficulty::TrainingRandom;
  if (s == "hard_eval") return Difficulty::HardEval;
  throw std::invalid_argument("config: env.difficulty must be \"training_random\" or \"hard_eval\"");
}

const char* difficulty_to_string(Difficulty d) {
  return d == Difficulty::HardEval ? "hard_eval" : "training_random";
}

void apply_env(const json& j, EnvConfig& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "z0_min") p.z0_min = v.get<double>();
    else if (k == "z0_max") p.z0_max = v.get<double>();
    else if (k == "horiz_dist_min") p.horiz_dist_min = v.get<double>();
    else if (k == "horiz_dist_max") p.horiz_dist_max = v.get<double>();
    else if (k == "descent_speed_min") p.descent_speed_min = v.get<double>();
    else if (k == "descent_speed_max") p.descent_speed_max = v.get<double>();
    else if (k == "horiz_speed_min") p.horiz_speed_min = v.get<double>();
    else if (k == "horiz_speed_max") p.horiz_speed_max = v.get<double>();
    else if (k == "aim_half_angle_deg") p.aim_half_angle_deg = v.get<double>();
    else if (k == "z_f") p.z_f = v.get<double>();
    else if (k == "z_max") p.z_max = v.get<double>();
    else if (k == "alpha_m") p.alpha_m = v.get<double>();
    else if (k == "alpha_f") p.alpha_f = v.get<double>();
    else if (k == "alpha_v") p.alpha_v = v.get<double>();
    else if (k == "alpha_r") p.alpha_r = v.get<double>();
    else if (k == "alpha_s") p.alpha_s = v.get<double>();
    else if (k == "k_r_min") p.k_r_min = v.get<double>();
    else if (k == "k_r_max") p.k_r_max = v.get<double>();
    else if (k == "k_v_min") p.k_v_min = v.get<double>();
    else if (k == "k_v_max") p.k_v_max = v.get<double>();
    else if (k == "delta_tgo_min") p.delta_tgo_min = v.get<double>();
    else if (k == "delta_tgo_max") p.delta_tgo_max = v.get<double>();
    else if (k == "alpha_range") p.alpha_range = v.get<double>();
    else if (k == "difficulty") p.difficulty = difficulty_from_string(v.get<std::string>());
    else if (k == "target_box_half") p.target_box_half = v.get<double>();
    else if (k == "hard_eval_radius") p.hard_eval_radius = v.get<double>();
    else if (k == "hard_eval_hazard_fraction") p.hard_eval_hazard_fraction = v.get<double>();
    else if (k == "hard_eval_max_draws") p.hard_eval_max_draws = v.get<int>();
    else if (k == "epoch_duration") p.epoch_duration = v.get<double>();
    else if (k == "inner_dt") p.inner_dt = v.get<double>();
    else if (k == "terminal_tgo_threshold") p.terminal_tgo_threshold = v.get<double>();
    else if (k == "fallback_tgo") p.fallback_tgo = v.get<double>();
    else if (k == "position_scale") p.position_scale = v.get<double>();
    else if (k == "velocity_scale") p.velocity_scale = v.get<double>();
    else if (k == "fov_scale") p.fov_scale = v.get<double>();
    else if (k == "vehicle") apply_vehicle(v, p.vehicle, ctx + ".vehicle");
    else if (k == "sensor") apply_sensor(v, p.sensor, ctx + ".sensor");
    else unknown_key(ctx, k);
  }
}

json env_to_json(const EnvConfig& p) {
  return json{{"z0_min", p.z0_min},
              {"z0_max", p.z0_max},
              {"horiz_dist_min", p.horiz_dist_min},
              {"horiz_dist_max", p.horiz_dist_max},
              {"descent_speed_min", p.descent_speed_min},
              {"descent_speed_max", p.descent_speed_max},
              {"horiz_speed_min", p.horiz_speed_min},
              {"horiz_speed_max", p.horiz_speed_max},
              {"aim_half_angle_deg", p.aim_half_angle_deg},
              {"z_f", p.z_f},
              {"z_max", p.z_max},
              {"alpha_m", p.alpha_m},
              {"alpha_f", p.alpha_f},
              {"alpha_v", p.alpha_v},
              {"alpha_r", p.alpha_r},
              {"alpha_s", p.alpha_s},
              {"k_r_min", p.k_r_min},
              {"k_r_max", p.k_r_max},
              {"k_v_min", p.k_v_min},
              {"k_v_max", p.k_v_max},
              {"delta_tgo_min", p.delta_tgo_min},
              {"delta_tgo_max", p.delta_tgo_max},
              {"alpha_range", p.alpha_range},
              {"difficulty", difficulty_to_string(p.difficulty)},
              {"target_box_half", p.target_box_half},
              {"hard_eval_radius", p.hard_eval_radius},
              {"hard_eval_hazard_fraction", p.hard_eval_hazard_fraction},
              {"hard_eval_max_draws", p.hard_eval_max_draws},
              {"epoch_duration", p.epoch_duration},
              {"inner_dt", p.inner_dt},
              {"terminal_tgo_threshold", p.terminal_tgo_threshold},
              {"fallback_tgo", p.fallback_tgo},
              {"position_scale", p.position_scale},
              {"velocity_scale", p.velocity_scale},
              {"fov_scale", p.fov_scale},
              {"vehicle", vehicle_to_json(p.vehicle)},
              {"sensor", sensor_to_json(p.sensor)}};
}

void apply_td3(const json& j, Td3Config& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "gamma") p.gamma = v.get<double>();
    else if (k == "tau") p.tau = v.get<double>();
    else if (k == "policy_delay") p.policy_delay = v.get<int>();
    else if (k == "exploration_sigma") p.exploration_sigma = v.get<double>();
    else if (k == "smoothing_sigma") p.smoothing_sigma = v.get<double>();
    else if (k == "smoothing_clip") p.smoothing_clip = v.get<double>();
    else if (k == "batch_size") p.batch_size = v.get<int>();
    else if (k == "buffer_capacity") p.buffer_capacity = v.get<std::size_t>();
    else if (k == "warmup_steps") p.warmup_steps = v.get<long>();
    else if (k == "total_updates") p.total_updates = v.get<long>();
    else if (k == "actor_lr") p.actor_lr = v.get<double>();
    else if (k == "critic_lr") p.critic_lr = v.get<double>();
    else if (k == "hidden") p.hidden = v.get<int>();
    else if (k == "log_every") p.log_every = v.get<int>();
    else if (k == "episode_window") p.episode_window = v.get<int>();
    else unknown_key(ctx, k);
  }
}

json td3_to_json(const Td3Config& p) {
  return json{{"gamma", p.gamma},
              {"tau", p.tau},
              {"policy_delay", p.policy_delay},
              {"exploration_sigma", p.exploration_sigma},
              {"smoothing_sigma", p.smoothing_sigma},
              {"smoothing_clip", p.smoothing_clip},
              {"batch_size", p.batch_size},
              {"buffer_capacity", p.buffer_capacity},
              {"warmup_steps", p.warmup_steps},
              {"total_updates", p.total_updates},
              {"actor_lr", p.actor_lr},
              {"critic_lr", p.critic_lr},
              {"hidden", p.hidden},
              {"log_every", p.log_every},
              {"episode_window", p.episode_window}};
}

void apply_autoencoder(const json& j, AutoencoderConfig& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "hidden") p.hidden = v.get<std::vector<int>>();
    else if (k == "latent_dim") p.latent_dim = v.get<int>();
    else if (k == "map_size") p.map_size = v.get<int>();
    else if (k == "epochs") p.epochs = v.get<int>();
    else if (k == "batch_size") p.batch_size = v.get<int>();
    else if (k == "learning_rate") p.learning_rate = v.get<double>();
    else if (k == "holdout_fraction") p.holdout_fraction = v.get<double>();
    else if (k == "seed") p.seed = v.get<std::uint64_t>();
    else unknown_key(ctx, k);
  }
}

json autoencoder_to_json(const AutoencoderConfig& p) {
  return json{{"hidden", p.hidden},
              {"latent_dim", p.latent_dim},
              {"map_size", p.map_size},
              {"epochs", p.epochs},
              {"batch_size", p.batch_size},
              {"learning_rate", p.learning_rate},
              {"holdout_fraction", p.holdout_fraction},
              {"seed", p.seed}};
}

void apply_paths(const json& j, RunConfig::Paths& p, const std::string& ctx) {
  for (const auto& [k, v] : j.items()) {
    if (k == "terrain_dir") p.terrain_dir = v.get<std::string>();
    else if (k == "autoencoder_checkpoint") p.autoencoder_checkpoint = v.get<std::string>();
    else if (k == "train_dir") p.train_dir = v.get<std::string>();
    else if (k == "eval_dir") p.eval_dir = v.get<std::string>();
    else unknown_key(ctx, k);
  }
}

json paths_to_json(const RunConfig::Paths& p) {
  return json{{"terrain_dir", p.terrain_dir},
              {"autoencoder_checkpoint", p.autoencoder_checkpoint},
              {"train_dir", p.train_dir},
              {"eval_dir", p.eval_dir}};
}

}  // namespace

void RunConfig::validate() const {
  terrain.validate();
  lander.validate();
  safety.validate();
  env.validate();
  td3.validate();
  if (terrain_count_training < 0 || terrain_count_variation < 0) {
    throw std::invalid_argument("config: terrain counts must be non-negative");
  }
  if (autoencoder_rollouts < 1) {
    throw std::invalid_argument("config: autoencoder_rollouts must be positive");
  }
  if (autoencoder.latent_dim != kLatentDim) {
    throw std::invalid_argument("config: autoencoder.latent_dim must match the observation layout");
  }
  if (autoencoder.map_size != env.sensor.dem_size) {
    throw std::invalid_argument("config: autoencoder.map_size must equal sensor.dem_size");
  }
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: parse error: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  RunConfig cfg;
  for (const auto& [k, v] : j.items()) {
    if (k == "terrain") apply_terrain(v, cfg.terrain, "terrain");
    else if (k == "lander") apply_lander(v, cfg.lander, "lander");
    else if (k == "safety") apply_safety(v, cfg.safety, "safety");
    else if (k == "env") apply_env(v, cfg.env, "env");
    else if (k == "td3") apply_td3(v, cfg.td3, "td3");
    else if (k == "autoencoder") apply_autoencoder(v, cfg.autoencoder, "autoencoder");
    else if (k == "paths") apply_paths(v, cfg.paths, "paths");
    else if (k == "seed") cfg.seed = v.get<std::uint64_t>();
    else if (k == "terrain_count_training") cfg.terrain_count_training = v.get<int>();
    else if (k == "terrain_count_variation") cfg.terrain_count_variation = v.get<int>();
    else if (k == "autoencoder_rollouts") cfg.autoencoder_rollouts = v.get<int>();
    else unknown_key("", k);
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const RunConfig& cfg) {
  const json j{{"terrain", terrain_to_json(cfg.terrain)},
               {"lander", lander_to_json(cfg.lander)},
               {"safety", safety_to_json(cfg.safety)},
               {"env", env_to_json(cfg.env)},
               {"td3", td3_to_json(cfg.td3)},
               {"autoencoder", autoencoder_to_json(cfg.autoencoder)},
               {"paths", paths_to_json(cfg.paths)},
               {"seed", cfg.seed},
               {"terrain_count_training", cfg.terrain_count_training},
               {"terrain_count_variation", cfg.terrain_count_variation},
               {"autoencoder_rollouts", cfg.autoencoder_rollouts}};
  return j.dump(2) + "\n";
}

void save_config_file(const std::string& path, const RunConfig& cfg) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("config: cannot write " + path);
  os << serialize_config(cfg);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string config_digest(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(serialize_config(cfg))));
  return buf;
}

}  // namespace hda
