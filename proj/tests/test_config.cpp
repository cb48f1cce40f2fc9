#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "ultragest/config.hpp"
#include "ultragest/errors.hpp"

using namespace ultragest;
namespace fs = std::filesystem;

TEST_SUITE("config") {
  TEST_CASE("defaults round-trip through JSON") {
    const RunConfig config;
    const Json j = to_json(config);
    const RunConfig back = run_config_from_json(j);
    CHECK(to_json(back).dump() == j.dump());
    CHECK(back.pulse.carrier_freq_hz == config.pulse.carrier_freq_hz);
    CHECK(back.dsp.clutter_factor == config.dsp.clutter_factor);
    CHECK(back.kernel.degree == config.kernel.degree);
    CHECK(back.gamma == config.gamma);
    CHECK(back.dataset.master_seed == config.dataset.master_seed);
  }

  TEST_CASE("partial documents fill in defaults") {
    const Json j = {{"pulse", {{"sample_rate_hz", 96000.0}, {"half_bandwidth_hz", 2000.0}}}};
    const RunConfig config = run_config_from_json(j);
    CHECK(config.pulse.sample_rate_hz == 96000.0);
    CHECK(config.pulse.carrier_freq_hz == 38800.0);  // default retained
    CHECK(config.folds == 12);
  }

  TEST_CASE("unknown keys are rejected everywhere") {
    CHECK_THROWS_AS(run_config_from_json({{"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"pulse", {{"bogus", 1}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"dataset", {{"jitter", {{"bogus", 1}}}}}}),
                    ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"eval", {{"bogus", 1}}}}), ConfigError);
  }

  TEST_CASE("invalid values are rejected with ConfigError") {
    CHECK_THROWS_AS(run_config_from_json({{"pulse", {{"amplitude", 2.0}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"eval", {{"test_fraction", 1.5}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"dsp", {{"clutter_factor", -0.5}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"classifier", {{"gamma", 0.0}}}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"wav_format", "ogg"}}), ConfigError);
    CHECK_THROWS_AS(run_config_from_json({{"schema_version", 3}}), ConfigError);
  }

  TEST_CASE("config file loading and the environment fallback") {
    const fs::path dir = fs::temp_directory_path() / "ultragest_config_test";
    fs::create_directories(dir);
    const fs::path path = dir / "config.json";
    {
      RunConfig config;
      config.folds = 5;
      config.dataset.master_seed = 777;
      write_run_config(path, config);
    }

    const RunConfig from_path = load_run_config(path);
    CHECK(from_path.folds == 5);
    CHECK(from_path.dataset.master_seed == 777);

    setenv(kConfigEnvVar, path.string().c_str(), 1);
    const RunConfig from_env = load_run_config(std::nullopt);
    CHECK(from_env.folds == 5);
    unsetenv(kConfigEnvVar);

    const RunConfig defaults = load_run_config(std::nullopt);
    CHECK(defaults.folds == 12);

    CHECK_THROWS_AS(load_run_config(dir / "missing.json"), ConfigError);
    std::ofstream(dir / "broken.json") << "{ not json";
    CHECK_THROWS_AS(load_run_config(dir / "broken.json"), ConfigError);
    fs::remove_all(dir);
  }

  TEST_CASE("scene documents round-trip") {
    Scene scene;
    scene.trajectory = Trajectory::for_gesture(GestureKind::SwipeRTL);
    scene.trajectory.tremor_amp_m = 0.0015;
    scene.trajectory.wave_amp_m = 0.01;
    scene.static_clutter = {{0.2, 0.05}, {0.4, 0.02}};
    scene.multipath = {{0.5e-3, 0.2}};
    scene.noise_std = 0.22;
    scene.rng_seed = 123456789;
    scene.sub_reflectors = 2;

    const Json j = to_json(scene);
    const Scene back = scene_from_json(j);
    CHECK(to_json(back).dump() == j.dump());
    CHECK(back.trajectory.gesture == GestureKind::SwipeRTL);
    CHECK(back.static_clutter.size() == 2);
    CHECK(back.multipath.size() == 1);
    CHECK(back.rng_seed == 123456789);

    CHECK_THROWS_AS(scene_from_json({{"unknown_field", 1}}), ConfigError);
  }

  TEST_CASE("trajectory validation errors surface as ConfigError") {
    Json j = to_json(Trajectory::for_gesture(GestureKind::Fwd));
    j["start"] = {0.4};  // wrong arity
    CHECK_THROWS_AS(trajectory_from_json(j), ConfigError);
  }
}
