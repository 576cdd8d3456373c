#pragma once

#include <cstdint>
#include <string>

#include "hda/autoencoder.hpp"
#include "hda/env.hpp"
#include "hda/safety.hpp"
#include "hda/td3.hpp"
#include "hda/terrain.hpp"

namespace hda {

// One document that pins every knob of a run. Loaded from JSON with strict
// schema checking: unknown keys are an error, missing keys keep defaults.
struct RunConfig {
  TerrainParams terrain;
  LanderGeometry lander;
  SafetyThresholds safety;
  EnvConfig env;  // carries VehicleParams + SensorParams
  Td3Config td3;
  AutoencoderConfig autoencoder;

  std::uint64_t seed = 0;
  int terrain_count_training = 70;
  int terrain_count_variation = 18;
  int autoencoder_rollouts = 200;

  struct Paths {
    std::string terrain_dir = "out/terrain";
    std::string autoencoder_checkpoint = "out/autoencoder.ckpt";
    std::string train_dir = "out/train";
    std::string eval_dir = "out/eval";
  } paths;

  void validate() const;  // throws std::invalid_argument
};

// Parse from a JSON file / string; values override the defaults above.
RunConfig load_config_file(const std::string& path);
RunConfig parse_config(const std::string& json_text);

// Canonical serialization (sorted keys, round-trip-exact numbers); the same
// config always produces the same bytes.
std::string serialize_config(const RunConfig& cfg);
void save_config_file(const std::string& path, const RunConfig& cfg);

// FNV-1a 64-bit hash of the canonical serialization, as 16 hex digits.
// Embedded in checkpoints and CSV headers to tie artifacts to their config.
std::string config_digest(const RunConfig& cfg);
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace hda
