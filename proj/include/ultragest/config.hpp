#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "ultragest/classifier.hpp"
#include "ultragest/dsp.hpp"
#include "ultragest/eval.hpp"
#include "ultragest/features.hpp"
#include "ultragest/signal.hpp"
#include "ultragest/simulator.hpp"
#include "ultragest/wav.hpp"

namespace ultragest {

using Json = nlohmann::ordered_json;

/// Everything a pipeline run needs, loadable from one JSON document. Every
/// section and key is optional (defaults apply); unknown keys are rejected.
struct RunConfig {
  PulseTrainConfig pulse;
  DspConfig dsp;
  FeatureConfig features;
  KernelParams kernel;
  double gamma = 10.0;
  DatasetSpec dataset;
  double test_fraction = 0.08;
  std::size_t folds = 12;
  WavFormat wav_format = WavFormat::Float32;

  TrainingConfig training() const { return TrainingConfig{kernel, gamma, features}; }
  void validate() const;
};

/// Environment variable consulted for the default config path.
inline constexpr const char* kConfigEnvVar = "ULTRAGEST_CONFIG";

Json to_json(const PulseTrainConfig& config);
PulseTrainConfig pulse_from_json(const Json& j);
Json to_json(const DspConfig& config);
DspConfig dsp_from_json(const Json& j);
Json to_json(const FeatureConfig& config);
FeatureConfig features_from_json(const Json& j);
Json to_json(const DatasetSpec& spec);
DatasetSpec dataset_spec_from_json(const Json& j);
Json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const Json& j);
Json to_json(const Scene& scene);
Scene scene_from_json(const Json& j);

Json to_json(const RunConfig& config);
RunConfig run_config_from_json(const Json& j);

/// Loads the config from `path`, falling back to $ULTRAGEST_CONFIG, falling
/// back to built-in defaults. Throws ConfigError on parse/schema problems.
RunConfig load_run_config(const std::optional<std::filesystem::path>& path);

void write_run_config(const std::filesystem::path& path, const RunConfig& config);

/// Throws ConfigError when `j` is not an object or contains keys outside
/// `allowed`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                  const std::string& context);

}  // namespace ultragest
