#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ultragest/errors.hpp"
#include "ultragest/eval.hpp"
#include "ultragest/features.hpp"
#include "ultragest/rng.hpp"
#include "ultragest/simulator.hpp"

using namespace ultragest;

namespace {

MotionFrame frame_of(std::vector<double> values, LagGate gate) {
  MotionFrame f;
  f.values = std::move(values);
  f.gate = gate;
  return f;
}

MotionFrame random_frame(Rng& rng, std::size_t len, LagGate gate) {
  MotionFrame f;
  f.gate = gate;
  f.values.assign(len, 0.0);
  for (std::size_t i = gate.min_lag; i <= gate.max_lag && i < len; ++i)
    f.values[i] = std::max(0.0, rng.gaussian());
  return f;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double num = 0, va = 0, vb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(va * vb);
}

// dominant-peak lag per frame; frames without peaks inherit the previous lag
std::vector<double> dominant_lags(const RangeMatrix& rm, std::size_t from, std::size_t to) {
  std::vector<double> lags;
  double last = 0.0;
  for (std::size_t i = from; i < to; ++i) {
    if (rm.rows[i][0].value > 0.0) last = static_cast<double>(rm.rows[i][0].lag_index);
    lags.push_back(last);
  }
  return lags;
}

}  // namespace

TEST_SUITE("features") {
  TEST_CASE("find_peaks basics") {
    const LagGate gate{2, 17};
    SUBCASE("all-zero frame has no peaks") {
      const auto peaks = find_peaks(frame_of(std::vector<double>(20, 0.0), gate));
      CHECK(peaks.empty());
    }
    SUBCASE("single triangular peak") {
      std::vector<double> v(20, 0.0);
      v[9] = 1.0;
      v[10] = 3.0;
      v[11] = 2.0;
      const auto peaks = find_peaks(frame_of(std::move(v), gate));
      REQUIRE(peaks.size() == 1);
      CHECK(peaks[0].lag_index == 10);
      CHECK(peaks[0].value == 3.0);
    }
    SUBCASE("plateau takes its leftmost index") {
      std::vector<double> v(20, 0.0);
      v[5] = 2.0;
      v[6] = 2.0;
      v[7] = 2.0;
      const auto peaks = find_peaks(frame_of(std::move(v), gate));
      REQUIRE(peaks.size() == 1);
      CHECK(peaks[0].lag_index == 5);
    }
    SUBCASE("sorted descending, ties to the smaller lag, capped at k") {
      std::vector<double> v(20, 0.0);
      v[4] = 5.0;
      v[8] = 7.0;
      v[12] = 5.0;
      v[15] = 1.0;
      const auto peaks = find_peaks(frame_of(std::move(v), gate), 3);
      REQUIRE(peaks.size() == 3);
      CHECK(peaks[0].lag_index == 8);
      CHECK(peaks[1].lag_index == 4);
      CHECK(peaks[2].lag_index == 12);
    }
    SUBCASE("values outside the gate never become peaks") {
      std::vector<double> v(20, 0.0);
      v[0] = 9.0;
      v[19] = 9.0;
      v[10] = 1.0;
      const auto peaks = find_peaks(frame_of(std::move(v), gate));
      REQUIRE(peaks.size() == 1);
      CHECK(peaks[0].lag_index == 10);
    }
  }

  TEST_CASE("two-reflector scene produces two dominant peaks at their delays") {
    const PulseTrainConfig config;
    const DspConfig dsp;
    Scene scene;
    scene.trajectory = Trajectory::for_gesture(GestureKind::HoldHand);
    scene.trajectory.hold_fraction = 1.0;
    scene.trajectory.end = {0.15, 0.0};
    scene.trajectory.tremor_amp_m = 0.0;
    scene.self_interference_gain = 0.0;
    scene.noise_std = 0.0;
    // second static reflector at 0.30 m, as strong as the hand echo so it
    // clears the hand's pulse-compression sidelobes
    const double alpha_hand = scene.reflection_coeff / (0.15 * 0.15);
    scene.static_clutter.push_back({0.30, alpha_hand});

    const Waveform block = simulate_block(scene, config, 0);
    const MotionFrame frame = gate_frame(block_correlate(block, config), dsp.gate(config));
    const auto peaks = find_peaks(frame, 20);
    REQUIRE(peaks.size() >= 2);

    const auto lag_hand = static_cast<double>(
        std::llround(range_to_delay({0.15, 0.0}, scene.tx_rx_baseline_m, 343.0) *
                     config.sample_rate_hz));
    const auto lag_clutter =
        static_cast<double>(std::llround(2.0 * 0.30 / 343.0 * config.sample_rate_hz));
    const double got0 = static_cast<double>(peaks[0].lag_index);
    const double got1 = static_cast<double>(peaks[1].lag_index);
    CHECK(std::min(std::abs(got0 - lag_hand), std::abs(got0 - lag_clutter)) <= 1.0);
    CHECK(std::min(std::abs(got1 - lag_hand), std::abs(got1 - lag_clutter)) <= 1.0);
    CHECK(std::abs(got0 - got1) > 10.0);
  }

  TEST_CASE("rss_vector basics") {
    const LagGate gate{1, 18};
    MotionProfile profile;
    for (int i = 0; i < 5; ++i) profile.frames.push_back(frame_of(std::vector<double>(20, 0.0), gate));
    SUBCASE("zero profile gives a zero vector") {
      const RssVector rss = rss_vector(profile);
      CHECK(rss.values == std::vector<double>(5, 0.0));
    }
    SUBCASE("scaling frames scales the vector exactly") {
      Rng rng(7);
      for (auto& f : profile.frames)
        for (std::size_t i = gate.min_lag; i <= gate.max_lag; ++i)
          f.values[i] = std::max(0.0, rng.gaussian());
      const RssVector base = rss_vector(profile);
      MotionProfile doubled = profile;
      for (auto& f : doubled.frames)
        for (auto& v : f.values) v *= 2.0;
      const RssVector scaled = rss_vector(doubled);
      for (std::size_t i = 0; i < base.values.size(); ++i)
        CHECK(scaled.values[i] == doctest::Approx(2.0 * base.values[i]).epsilon(1e-12));
    }
    SUBCASE("reversing the profile reverses the vector") {
      Rng rng(8);
      for (auto& f : profile.frames)
        for (std::size_t i = gate.min_lag; i <= gate.max_lag; ++i)
          f.values[i] = std::max(0.0, rng.gaussian());
      const RssVector forward = rss_vector(profile);
      MotionProfile reversed = profile;
      std::reverse(reversed.frames.begin(), reversed.frames.end());
      const RssVector backward = rss_vector(reversed);
      for (std::size_t i = 0; i < forward.values.size(); ++i)
        CHECK(backward.values[i] == forward.values[forward.values.size() - 1 - i]);
    }
  }

  TEST_CASE("fwd gesture RSS grows as the hand approaches") {
    const PulseTrainConfig config;
    const DspConfig dsp;
    DatasetSpec spec;
    spec.noise_std = 0.22;
    int wins = 0;
    for (std::size_t rep = 0; rep < 20; ++rep) {
      const Scene scene = make_scene(spec, GestureKind::Fwd, rep);
      const MotionProfile profile =
          assemble_profile(simulate_gesture(scene, config), config, dsp, GestureKind::Fwd);
      const RssVector rss = rss_vector(profile);
      const std::size_t q = rss.values.size() / 4;
      double first = 0.0, last = 0.0;
      for (std::size_t i = 0; i < q; ++i) first += rss.values[i];
      for (std::size_t i = rss.values.size() - q; i < rss.values.size(); ++i)
        last += rss.values[i];
      if (last > first) ++wins;
    }
    CHECK(wins == 20);
  }

  TEST_CASE("hold segment keeps the dominant lag constant") {
    // raw gated frames of a tremor-free hold: all frames identical
    const PulseTrainConfig config;
    const DspConfig dsp;
    Scene scene;
    scene.trajectory = Trajectory::for_gesture(GestureKind::HoldHand);
    scene.trajectory.tremor_amp_m = 0.0;
    scene.self_interference_gain = 0.0;
    scene.noise_std = 0.0;

    const auto blocks = simulate_gesture(scene, config);
    const BlockCorrelator correlate(config);
    MotionProfile profile;
    for (std::size_t b = 0; b < blocks.size(); ++b)
      profile.frames.push_back(gate_frame(correlate(blocks[b], b), dsp.gate(config)));
    const RangeMatrix rm = range_matrix(profile);

    // the hold spans the middle of the gesture
    const auto lags = dominant_lags(rm, 40, 60);
    for (double lag : lags) CHECK(std::abs(lag - lags.front()) <= 1.0);
  }

  TEST_CASE("ltr and rtl dominant-lag tracks are time reverses of each other") {
    // a geometry property of mirrored swipe trajectories: same swipe plane,
    // opposite direction. Quiet renders keep the dominant peak on the hand.
    const PulseTrainConfig config;
    const DspConfig dsp;
    for (double tilt : {0.12, 0.18, 0.25}) {
      auto track = [&](GestureKind g) {
        Scene scene;
        scene.trajectory = Trajectory::for_gesture(g);
        scene.trajectory.swipe_tilt = tilt;
        scene.trajectory.tremor_amp_m = 0.0008;
        scene.trajectory.tremor_phase = 1.2;
        scene.noise_std = 0.02;
        scene.rng_seed = static_cast<std::uint64_t>(tilt * 1000);
        const MotionProfile profile =
            assemble_profile(simulate_gesture(scene, config), config, dsp, g);
        return dominant_lags(range_matrix(profile), 20, 80);
      };
      std::vector<double> ltr = track(GestureKind::SwipeLTR);
      std::vector<double> rtl = track(GestureKind::SwipeRTL);
      std::reverse(rtl.begin(), rtl.end());
      CHECK(pearson(ltr, rtl) > 0.8);
    }
  }

  TEST_CASE("all-zero profile gives an all-(0,0) range matrix") {
    const LagGate gate{1, 18};
    MotionProfile profile;
    for (int i = 0; i < 3; ++i)
      profile.frames.push_back(frame_of(std::vector<double>(20, 0.0), gate));
    const RangeMatrix rm = range_matrix(profile, 20);
    for (const auto& row : rm.rows)
      for (const auto& p : row) {
        CHECK(p.lag_index == 0);
        CHECK(p.value == 0.0);
      }
  }

  TEST_CASE("range_matrix pads to k and keeps rows sorted") {
    const LagGate gate{1, 18};
    MotionProfile profile;
    MotionFrame f = frame_of(std::vector<double>(20, 0.0), gate);
    f.values[5] = 2.0;
    f.values[9] = 7.0;
    profile.frames.push_back(f);
    const RangeMatrix rm = range_matrix(profile, 20);
    REQUIRE(rm.rows.size() == 1);
    REQUIRE(rm.rows[0].size() == 20);
    CHECK(rm.rows[0][0].lag_index == 9);
    CHECK(rm.rows[0][1].lag_index == 5);
    for (std::size_t i = 2; i < 20; ++i) {
      CHECK(rm.rows[0][i].lag_index == 0);
      CHECK(rm.rows[0][i].value == 0.0);
    }
    for (std::size_t i = 1; i < 20; ++i)
      CHECK(rm.rows[0][i].value <= rm.rows[0][i - 1].value);
  }

  TEST_CASE("normalize_length crops and pads around the centre") {
    const LagGate gate{0, 9};
    MotionProfile profile;
    for (int i = 0; i < 10; ++i) {
      MotionFrame f = frame_of(std::vector<double>(10, 0.0), gate);
      f.values[0] = static_cast<double>(i);  // tag the frame
      profile.frames.push_back(f);
    }
    const MotionProfile cropped = normalize_length(profile, 6);
    REQUIRE(cropped.frames.size() == 6);
    CHECK(cropped.frames.front().values[0] == 2.0);
    CHECK(cropped.frames.back().values[0] == 7.0);

    const MotionProfile padded = normalize_length(profile, 14);
    REQUIRE(padded.frames.size() == 14);
    // pad_front = 2: indices 0-1 are zero frames, index 2 is the old frame 0
    CHECK(padded.frames[0].values[0] == 0.0);
    CHECK(padded.frames[3].values[0] == 1.0);
    CHECK(padded.frames[11].values[0] == 9.0);
    CHECK(padded.frames[13].values[0] == 0.0);
  }

  TEST_CASE("flatten dimensions and normalisations") {
    SUBCASE("zero rss vector with max norm flags degenerate") {
      RssVector rss;
      rss.values.assign(10, 0.0);
      const FlattenResult out = flatten_features(rss, FlattenNorm::Max);
      CHECK(out.degenerate);
      CHECK(out.values == std::vector<double>(10, 0.0));
    }
    SUBCASE("L=100, K=20 range matrix flattens to 4000 values") {
      const LagGate gate{1, 900};
      MotionProfile profile;
      for (int i = 0; i < 100; ++i) {
        MotionFrame f = frame_of(std::vector<double>(960, 0.0), gate);
        f.values[100 + i] = 5.0;
        profile.frames.push_back(f);
      }
      const RangeMatrix rm = range_matrix(profile, 20);
      const FlattenResult out = flatten_features(rm, FlattenNorm::None);
      CHECK(out.values.size() == 4000);
      // first pair of the first row: (lag/frame_len, value/max)
      CHECK(out.values[0] == doctest::Approx(100.0 / 960.0));
      CHECK(out.values[1] == doctest::Approx(1.0));
    }
    SUBCASE("zscore output has mean 0 and variance 1") {
      RssVector rss;
      Rng rng(11);
      rss.values.resize(64);
      for (auto& v : rss.values) v = rng.uniform(1.0, 9.0);
      const FlattenResult out = flatten_features(rss, FlattenNorm::ZScore);
      REQUIRE(!out.degenerate);
      double mean = 0.0;
      for (double v : out.values) mean += v;
      mean /= static_cast<double>(out.values.size());
      double var = 0.0;
      for (double v : out.values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(out.values.size());
      CHECK(std::abs(mean) <= 1e-9);
      CHECK(std::abs(var - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("scale equivariance of peaks and rss across random frames") {
    Rng rng(31337);
    const LagGate gate{5, 90};
    for (int trial = 0; trial < 20; ++trial) {
      MotionProfile profile;
      for (int i = 0; i < 4; ++i) profile.frames.push_back(random_frame(rng, 100, gate));
      const double s = rng.uniform(0.5, 4.0);
      MotionProfile scaled = profile;
      for (auto& f : scaled.frames)
        for (auto& v : f.values) v *= s;
      for (std::size_t i = 0; i < profile.frames.size(); ++i) {
        const auto base = find_peaks(profile.frames[i], 20);
        const auto more = find_peaks(scaled.frames[i], 20);
        REQUIRE(base.size() == more.size());
        for (std::size_t p = 0; p < base.size(); ++p) {
          CHECK(base[p].lag_index == more[p].lag_index);
          CHECK(more[p].value == doctest::Approx(s * base[p].value).epsilon(1e-12));
        }
      }
    }
  }

  TEST_CASE("empty profiles are rejected") {
    MotionProfile empty;
    CHECK_THROWS_AS(rss_vector(empty), DataError);
    CHECK_THROWS_AS(range_matrix(empty), DataError);
    CHECK_THROWS_AS(normalize_length(empty, 100), DataError);
  }
}
