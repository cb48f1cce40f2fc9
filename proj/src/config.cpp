#include "ultragest/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

#include "ultragest/errors.hpp"

namespace ultragest {

namespace {

template <typename T>
void read_field(const Json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(std::string("config: bad value for '") + key + "'");
  }
}

}  // namespace

void require_keys(const Json& j, std::initializer_list<const char*> allowed,
                  const std::string& context) {
  if (!j.is_object()) throw ConfigError("config: '" + context + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    const bool known =
        std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return key == k; });
    if (!known) throw ConfigError("config: unknown key '" + key + "' in " + context);
  }
}

Json to_json(const PulseTrainConfig& c) {
  return Json{{"carrier_freq_hz", c.carrier_freq_hz},
              {"half_bandwidth_hz", c.half_bandwidth_hz},
              {"pulse_len_s", c.pulse_len_s},
              {"pulse_period_s", c.pulse_period_s},
              {"pulses_per_block", c.pulses_per_block},
              {"sample_rate_hz", c.sample_rate_hz},
              {"amplitude", c.amplitude},
              {"tukey_alpha", c.tukey_alpha}};
}

PulseTrainConfig pulse_from_json(const Json& j) {
  require_keys(j,
               {"carrier_freq_hz", "half_bandwidth_hz", "pulse_len_s", "pulse_period_s",
                "pulses_per_block", "sample_rate_hz", "amplitude", "tukey_alpha"},
               "pulse");
  PulseTrainConfig c;
  read_field(j, "carrier_freq_hz", c.carrier_freq_hz);
  read_field(j, "half_bandwidth_hz", c.half_bandwidth_hz);
  read_field(j, "pulse_len_s", c.pulse_len_s);
  read_field(j, "pulse_period_s", c.pulse_period_s);
  read_field(j, "pulses_per_block", c.pulses_per_block);
  read_field(j, "sample_rate_hz", c.sample_rate_hz);
  read_field(j, "amplitude", c.amplitude);
  read_field(j, "tukey_alpha", c.tukey_alpha);
  return c;
}

Json to_json(const DspConfig& c) {
  return Json{{"clutter_factor", c.clutter_factor},
              {"gate_min_s", c.gate_min_s},
              {"gate_max_s", c.gate_max_s},
              {"speed_of_sound_mps", c.speed_of_sound_mps}};
}

DspConfig dsp_from_json(const Json& j) {
  require_keys(j, {"clutter_factor", "gate_min_s", "gate_max_s", "speed_of_sound_mps"}, "dsp");
  DspConfig c;
  read_field(j, "clutter_factor", c.clutter_factor);
  read_field(j, "gate_min_s", c.gate_min_s);
  read_field(j, "gate_max_s", c.gate_max_s);
  read_field(j, "speed_of_sound_mps", c.speed_of_sound_mps);
  return c;
}

Json to_json(const FeatureConfig& c) {
  return Json{{"profile_len", c.profile_len},
              {"peaks_per_frame", c.peaks_per_frame},
              {"norm", to_string(c.norm)}};
}

FeatureConfig features_from_json(const Json& j) {
  require_keys(j, {"profile_len", "peaks_per_frame", "norm"}, "features");
  FeatureConfig c;
  read_field(j, "profile_len", c.profile_len);
  read_field(j, "peaks_per_frame", c.peaks_per_frame);
  if (j.contains("norm")) c.norm = flatten_norm_from_string(j.at("norm").get<std::string>());
  return c;
}

Json to_json(const DatasetSpec& s) {
  const auto& jr = s.jitter;
  return Json{
      {"repetitions_per_gesture", s.repetitions_per_gesture},
      {"include_no_gesture", s.include_no_gesture},
      {"noise_std", s.noise_std},
      {"reflection_coeff", s.reflection_coeff},
      {"duration_s", s.duration_s},
      {"sub_reflectors", s.sub_reflectors},
      {"master_seed", s.master_seed},
      {"jitter",
       Json{{"position_m", jr.position_m},
            {"hold_fraction", jr.hold_fraction},
            {"time_skew", jr.time_skew},
            {"reflection_low", jr.reflection_low},
            {"reflection_high", jr.reflection_high},
            {"tremor_low", jr.tremor_low},
            {"tremor_high", jr.tremor_high},
            {"tilt_low", jr.tilt_low},
            {"tilt_high", jr.tilt_high},
            {"clutter_min", jr.clutter_min},
            {"clutter_max", jr.clutter_max},
            {"clutter_gain_low", jr.clutter_gain_low},
            {"clutter_gain_high", jr.clutter_gain_high},
            {"multipath_min", jr.multipath_min},
            {"multipath_max", jr.multipath_max},
            {"multipath_gain_low", jr.multipath_gain_low},
            {"multipath_gain_high", jr.multipath_gain_high},
            {"si_gain_low", jr.si_gain_low},
            {"si_gain_high", jr.si_gain_high}}}};
}

DatasetSpec dataset_spec_from_json(const Json& j) {
  require_keys(j,
               {"repetitions_per_gesture", "include_no_gesture", "noise_std", "reflection_coeff",
                "duration_s", "sub_reflectors", "master_seed", "jitter"},
               "dataset");
  DatasetSpec s;
  read_field(j, "repetitions_per_gesture", s.repetitions_per_gesture);
  read_field(j, "include_no_gesture", s.include_no_gesture);
  read_field(j, "noise_std", s.noise_std);
  read_field(j, "reflection_coeff", s.reflection_coeff);
  read_field(j, "duration_s", s.duration_s);
  read_field(j, "sub_reflectors", s.sub_reflectors);
  read_field(j, "master_seed", s.master_seed);
  if (j.contains("jitter")) {
    const Json& jj = j.at("jitter");
    require_keys(jj,
                 {"position_m", "hold_fraction", "time_skew", "reflection_low", "reflection_high",
                  "tremor_low", "tremor_high", "tilt_low", "tilt_high", "clutter_min",
                  "clutter_max", "clutter_gain_low", "clutter_gain_high", "multipath_min",
                  "multipath_max", "multipath_gain_low", "multipath_gain_high", "si_gain_low",
                  "si_gain_high"},
                 "dataset.jitter");
    auto& jr = s.jitter;
    read_field(jj, "position_m", jr.position_m);
    read_field(jj, "hold_fraction", jr.hold_fraction);
    read_field(jj, "time_skew", jr.time_skew);
    read_field(jj, "reflection_low", jr.reflection_low);
    read_field(jj, "reflection_high", jr.reflection_high);
    read_field(jj, "tremor_low", jr.tremor_low);
    read_field(jj, "tremor_high", jr.tremor_high);
    read_field(jj, "tilt_low", jr.tilt_low);
    read_field(jj, "tilt_high", jr.tilt_high);
    read_field(jj, "clutter_min", jr.clutter_min);
    read_field(jj, "clutter_max", jr.clutter_max);
    read_field(jj, "clutter_gain_low", jr.clutter_gain_low);
    read_field(jj, "clutter_gain_high", jr.clutter_gain_high);
    read_field(jj, "multipath_min", jr.multipath_min);
    read_field(jj, "multipath_max", jr.multipath_max);
    read_field(jj, "multipath_gain_low", jr.multipath_gain_low);
    read_field(jj, "multipath_gain_high", jr.multipath_gain_high);
    read_field(jj, "si_gain_low", jr.si_gain_low);
    read_field(jj, "si_gain_high", jr.si_gain_high);
  }
  return s;
}

Json to_json(const Trajectory& t) {
  return Json{{"gesture", to_string(t.gesture)},
              {"duration_s", t.duration_s},
              {"start", {t.start.depth_m, t.start.lateral_m}},
              {"end", {t.end.depth_m, t.end.lateral_m}},
              {"peak_speed_mps", t.peak_speed_mps},
              {"hold_fraction", t.hold_fraction},
              {"time_skew", t.time_skew},
              {"swipe_tilt", t.swipe_tilt},
              {"tremor_amp_m", t.tremor_amp_m},
              {"tremor_freq_hz", t.tremor_freq_hz},
              {"tremor_phase", t.tremor_phase},
              {"tremor_phase2", t.tremor_phase2}};
}

Trajectory trajectory_from_json(const Json& j) {
  require_keys(j,
               {"gesture", "duration_s", "start", "end", "peak_speed_mps", "hold_fraction",
                "time_skew", "swipe_tilt", "tremor_amp_m", "tremor_freq_hz", "tremor_phase",
                "tremor_phase2"},
               "trajectory");
  Trajectory t;
  if (j.contains("gesture")) t.gesture = gesture_from_string(j.at("gesture").get<std::string>());
  read_field(j, "duration_s", t.duration_s);
  auto read_pos = [&](const char* key, Position& out) {
    if (!j.contains(key)) return;
    const auto v = j.at(key).get<std::vector<double>>();
    if (v.size() != 2)
      throw ConfigError(std::string("trajectory: '") + key + "' must be [depth_m, lateral_m]");
    out = Position{v[0], v[1]};
  };
  read_pos("start", t.start);
  read_pos("end", t.end);
  read_field(j, "peak_speed_mps", t.peak_speed_mps);
  read_field(j, "hold_fraction", t.hold_fraction);
  read_field(j, "time_skew", t.time_skew);
  read_field(j, "swipe_tilt", t.swipe_tilt);
  read_field(j, "tremor_amp_m", t.tremor_amp_m);
  read_field(j, "tremor_freq_hz", t.tremor_freq_hz);
  read_field(j, "tremor_phase", t.tremor_phase);
  read_field(j, "tremor_phase2", t.tremor_phase2);
  return t;
}

Json to_json(const Scene& s) {
  Json clutter = Json::array();
  for (const auto& c : s.static_clutter) clutter.push_back({c.range_m, c.gain});
  Json multipath = Json::array();
  for (const auto& m : s.multipath) multipath.push_back({m.extra_delay_s, m.gain});
  return Json{{"trajectory", to_json(s.trajectory)},
              {"reflection_coeff", s.reflection_coeff},
              {"tx_rx_baseline_m", s.tx_rx_baseline_m},
              {"self_interference_gain", s.self_interference_gain},
              {"static_clutter", clutter},
              {"multipath", multipath},
              {"noise_std", s.noise_std},
              {"speed_of_sound_mps", s.speed_of_sound_mps},
              {"rng_seed", s.rng_seed},
              {"sub_reflectors", s.sub_reflectors}};
}

Scene scene_from_json(const Json& j) {
  require_keys(j,
               {"trajectory", "reflection_coeff", "tx_rx_baseline_m", "self_interference_gain",
                "static_clutter", "multipath", "noise_std", "speed_of_sound_mps", "rng_seed",
                "sub_reflectors"},
               "scene");
  Scene s;
  if (j.contains("trajectory")) s.trajectory = trajectory_from_json(j.at("trajectory"));
  read_field(j, "reflection_coeff", s.reflection_coeff);
  read_field(j, "tx_rx_baseline_m", s.tx_rx_baseline_m);
  read_field(j, "self_interference_gain", s.self_interference_gain);
  if (j.contains("static_clutter"))
    for (const auto& e : j.at("static_clutter")) {
      const auto v = e.get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("scene: clutter entries must be [range_m, gain]");
      s.static_clutter.push_back({v[0], v[1]});
    }
  if (j.contains("multipath"))
    for (const auto& e : j.at("multipath")) {
      const auto v = e.get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("scene: multipath entries must be [delay_s, gain]");
      s.multipath.push_back({v[0], v[1]});
    }
  read_field(j, "noise_std", s.noise_std);
  read_field(j, "speed_of_sound_mps", s.speed_of_sound_mps);
  read_field(j, "rng_seed", s.rng_seed);
  read_field(j, "sub_reflectors", s.sub_reflectors);
  return s;
}

Json to_json(const RunConfig& c) {
  return Json{{"schema_version", 1},
              {"pulse", to_json(c.pulse)},
              {"dsp", to_json(c.dsp)},
              {"features", to_json(c.features)},
              {"classifier",
               Json{{"degree", c.kernel.degree},
                    {"offset", c.kernel.offset},
                    {"scale", c.kernel.scale},
                    {"gamma", c.gamma}}},
              {"dataset", to_json(c.dataset)},
              {"eval", Json{{"test_fraction", c.test_fraction}, {"folds", c.folds}}},
              {"wav_format", to_string(c.wav_format)}};
}

RunConfig run_config_from_json(const Json& j) {
  require_keys(
      j, {"schema_version", "pulse", "dsp", "features", "classifier", "dataset", "eval",
          "wav_format"},
      "run config");
  if (j.contains("schema_version") && j.at("schema_version").get<int>() != 1)
    throw ConfigError("config: unsupported schema_version");
  RunConfig c;
  if (j.contains("pulse")) c.pulse = pulse_from_json(j.at("pulse"));
  if (j.contains("dsp")) c.dsp = dsp_from_json(j.at("dsp"));
  if (j.contains("features")) c.features = features_from_json(j.at("features"));
  if (j.contains("classifier")) {
    const Json& jc = j.at("classifier");
    require_keys(jc, {"degree", "offset", "scale", "gamma"}, "classifier");
    read_field(jc, "degree", c.kernel.degree);
    read_field(jc, "offset", c.kernel.offset);
    read_field(jc, "scale", c.kernel.scale);
    read_field(jc, "gamma", c.gamma);
  }
  if (j.contains("dataset")) c.dataset = dataset_spec_from_json(j.at("dataset"));
  if (j.contains("eval")) {
    const Json& je = j.at("eval");
    require_keys(je, {"test_fraction", "folds"}, "eval");
    read_field(je, "test_fraction", c.test_fraction);
    read_field(je, "folds", c.folds);
  }
  if (j.contains("wav_format"))
    c.wav_format = wav_format_from_string(j.at("wav_format").get<std::string>());
  c.validate();
  return c;
}

void RunConfig::validate() const {
  pulse.validate();
  dsp.validate();
  kernel.validate();
  if (!(gamma > 0.0)) throw ConfigError("config: classifier gamma must be positive");
  if (features.profile_len < 1 || features.peaks_per_frame < 1)
    throw ConfigError("config: features need profile_len >= 1 and peaks_per_frame >= 1");
  dataset.validate();
  if (!(test_fraction > 0.0) || !(test_fraction < 1.0))
    throw ConfigError("config: eval test_fraction must be in (0, 1)");
  if (folds < 1) throw ConfigError("config: eval folds must be >= 1");
}

RunConfig load_run_config(const std::optional<std::filesystem::path>& path) {
  std::filesystem::path effective;
  if (path) {
    effective = *path;
  } else if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
    effective = env;
  } else {
    return RunConfig{};
  }
  std::ifstream f(effective);
  if (!f) throw ConfigError("cannot open config file: " + effective.string());
  Json j;
  try {
    f >> j;
  } catch (const Json::exception& e) {
    throw ConfigError("config parse error in " + effective.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

void write_run_config(const std::filesystem::path& path, const RunConfig& config) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << to_json(config).dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace ultragest
