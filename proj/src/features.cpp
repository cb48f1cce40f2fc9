#include "ultragest/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "ultragest/errors.hpp"

namespace ultragest {

std::vector<Peak> find_peaks(const MotionFrame& frame, std::size_t k) {
  if (k < 1) throw ConfigError("find_peaks: k must be >= 1");
  const auto& v = frame.values;
  const std::size_t n = v.size();

  std::vector<Peak> peaks;
  std::size_t i = frame.gate.min_lag;
  const std::size_t hi = std::min<std::size_t>(frame.gate.max_lag + 1, n);
  while (i < hi) {
    if (v[i] <= 0.0) {
      ++i;
      continue;
    }
    // extent of the plateau starting at i
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    const double left = i > 0 ? v[i - 1] : -1.0;
    const double right = j + 1 < n ? v[j + 1] : -1.0;
    if (v[i] > left && v[i] > right) peaks.push_back({i, v[i]});
    i = j + 1;
  }

  std::stable_sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.lag_index < b.lag_index;
  });
  if (peaks.size() > k) peaks.resize(k);
  return peaks;
}

RssVector rss_vector(const MotionProfile& profile, std::size_t k) {
  if (profile.frames.empty()) throw DataError("rss_vector: empty profile");
  RssVector out;
  out.values.reserve(profile.frames.size());
  for (const auto& frame : profile.frames) {
    double sum = 0.0;
    for (const auto& p : find_peaks(frame, k)) sum += p.value;
    out.values.push_back(sum);
  }
  return out;
}

RangeMatrix range_matrix(const MotionProfile& profile, std::size_t k) {
  if (profile.frames.empty()) throw DataError("range_matrix: empty profile");
  RangeMatrix rm;
  rm.peaks_per_frame = k;
  rm.frame_len = profile.frames.front().values.size();
  rm.rows.reserve(profile.frames.size());
  for (const auto& frame : profile.frames) {
    auto peaks = find_peaks(frame, k);
    peaks.resize(k, Peak{0, 0.0});
    rm.rows.push_back(std::move(peaks));
  }
  return rm;
}

MotionProfile normalize_length(const MotionProfile& profile, std::size_t target) {
  if (profile.frames.empty()) throw DataError("normalize_length: empty profile");
  const std::size_t len = profile.frames.size();
  MotionProfile out;
  out.label = profile.label;
  if (len == target) {
    out.frames = profile.frames;
    return out;
  }
  if (len > target) {
    const std::size_t drop_front = (len - target) / 2;
    out.frames.assign(profile.frames.begin() + static_cast<std::ptrdiff_t>(drop_front),
                      profile.frames.begin() + static_cast<std::ptrdiff_t>(drop_front + target));
    return out;
  }
  const std::size_t pad_front = (target - len) / 2;
  MotionFrame zero;
  zero.gate = profile.frames.front().gate;
  zero.values.assign(profile.frames.front().values.size(), 0.0);
  out.frames.assign(target, zero);
  for (std::size_t i = 0; i < len; ++i) out.frames[pad_front + i] = profile.frames[i];
  return out;
}

namespace {

void apply_norm(FlattenResult& result, FlattenNorm norm) {
  auto& v = result.values;
  switch (norm) {
    case FlattenNorm::None:
      return;
    case FlattenNorm::Max: {
      double mx = 0.0;
      for (double x : v) mx = std::max(mx, std::abs(x));
      if (mx == 0.0) {
        result.degenerate = true;
        return;
      }
      for (double& x : v) x /= mx;
      return;
    }
    case FlattenNorm::ZScore: {
      const double n = static_cast<double>(v.size());
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= n;
      double var = 0.0;
      for (double x : v) var += (x - mean) * (x - mean);
      var /= n;
      if (var == 0.0) {
        std::fill(v.begin(), v.end(), 0.0);
        result.degenerate = true;
        return;
      }
      const double inv = 1.0 / std::sqrt(var);
      for (double& x : v) x = (x - mean) * inv;
      return;
    }
  }
}

}  // namespace

FlattenResult flatten_features(const RssVector& rss, FlattenNorm norm) {
  FlattenResult result;
  result.values = rss.values;
  apply_norm(result, norm);
  return result;
}

FlattenResult flatten_features(const RangeMatrix& rm, FlattenNorm norm) {
  if (rm.frame_len == 0) throw DataError("flatten_features: frame_len not set");
  double max_value = 0.0;
  for (const auto& row : rm.rows)
    for (const auto& p : row) max_value = std::max(max_value, p.value);
  const double value_scale = max_value > 0.0 ? 1.0 / max_value : 0.0;
  const double lag_scale = 1.0 / static_cast<double>(rm.frame_len);

  FlattenResult result;
  result.values.reserve(2 * rm.rows.size() * rm.peaks_per_frame);
  for (const auto& row : rm.rows) {
    for (const auto& p : row) {
      result.values.push_back(static_cast<double>(p.lag_index) * lag_scale);
      result.values.push_back(p.value * value_scale);
    }
  }
  if (max_value == 0.0 && (norm == FlattenNorm::Max || norm == FlattenNorm::ZScore)) {
    result.degenerate = true;
    return result;
  }
  apply_norm(result, norm);
  return result;
}

MotionProfile assemble_profile(const std::vector<Waveform>& blocks,
                               const PulseTrainConfig& pulse, const DspConfig& dsp,
                               std::optional<GestureKind> label) {
  const BlockCorrelator correlate(pulse);
  const LagGate gate = dsp.gate(pulse);
  DeclutterState state(dsp.clutter_factor);

  MotionProfile profile;
  profile.label = label;
  profile.frames.reserve(blocks.size());
  for (std::size_t b = 0; b < blocks.size(); ++b)
    profile.frames.push_back(declutter(state, correlate(blocks[b], b), gate));
  return profile;
}

void write_features_csv(const std::filesystem::path& path,
                        const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  char buf[64];
  for (const auto& [label, values] : rows) {
    f << label;
    for (double v : values) {
      f.put(',');
      auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      f.write(buf, end - buf);
    }
    f.put('\n');
  }
  if (!f) throw IoError("write failed: " + path.string());
}

}  // namespace ultragest
