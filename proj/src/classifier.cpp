#include "ultragest/classifier.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ultragest/errors.hpp"

namespace ultragest {

using json = nlohmann::ordered_json;

void KernelParams::validate() const {
  if (degree < 1) throw ConfigError("kernel: degree must be >= 1");
  if (!(scale > 0.0)) throw ConfigError("kernel: scale must be positive");
  if (!std::isfinite(offset)) throw ConfigError("kernel: offset must be finite");
}

double kernel_eval(std::span<const double> a, std::span<const double> b,
                   const KernelParams& params) {
  if (a.size() != b.size())
    throw DataError("kernel_eval: length mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  const double base = params.scale * dot + params.offset;
  double result = 1.0;
  for (std::size_t d = 0; d < params.degree; ++d) result *= base;
  return result;
}

LsSvmModel lssvm_train(const std::vector<std::vector<double>>& inputs,
                       const std::vector<int>& labels, const KernelParams& kernel, double gamma) {
  kernel.validate();
  if (!(gamma > 0.0)) throw ConfigError("lssvm_train: gamma must be positive");
  if (inputs.size() != labels.size()) throw DataError("lssvm_train: inputs/labels size mismatch");
  const std::size_t n = inputs.size();
  if (n < 2) throw DataError("lssvm_train: need at least two examples");

  bool has_pos = false, has_neg = false;
  for (int y : labels) {
    if (y == 1) has_pos = true;
    else if (y == -1) has_neg = true;
    else throw DataError("lssvm_train: labels must be +1 or -1");
  }
  if (!has_pos || !has_neg) throw DataError("one-class-input: need examples of both classes");

  const std::size_t dim = inputs.front().size();
  for (const auto& x : inputs)
    if (x.size() != dim) throw DataError("lssvm_train: inconsistent feature dimensions");

  // Gram matrix via one matrix product, then the elementwise kernel map.
  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = inputs[i][j];

  Eigen::MatrixXd gram = x * x.transpose();
  for (Eigen::Index i = 0; i < gram.rows(); ++i) {
    for (Eigen::Index j = 0; j < gram.cols(); ++j) {
      const double base = kernel.scale * gram(i, j) + kernel.offset;
      double v = 1.0;
      for (std::size_t d = 0; d < kernel.degree; ++d) v *= base;
      gram(i, j) = v;
    }
  }

  const auto m = static_cast<Eigen::Index>(n + 1);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd rhs(m);
  rhs(0) = 0.0;
  a.block(1, 1, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = gram;
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i + 1);
    a(0, ii) = 1.0;
    a(ii, 0) = 1.0;
    a(ii, ii) += 1.0 / gamma;
    rhs(ii) = static_cast<double>(labels[i]);
  }

  const Eigen::VectorXd sol = Eigen::PartialPivLU<Eigen::MatrixXd>(a).solve(rhs);
  const double residual = (a * sol - rhs).norm();
  const double scale = std::max(rhs.norm(), 1.0);
  if (!sol.allFinite() || residual > 1e-6 * scale)
    throw DataError("singular-system: LS-SVM solve failed (residual " +
                    std::to_string(residual) + ")");

  LsSvmModel model;
  model.support_inputs = inputs;
  model.kernel = kernel;
  model.gamma = gamma;
  model.bias = sol(0);
  model.alphas.resize(n);
  for (std::size_t i = 0; i < n; ++i) model.alphas[i] = sol(static_cast<Eigen::Index>(i + 1));
  return model;
}

Decision lssvm_decide(const LsSvmModel& model, std::span<const double> x) {
  if (model.support_inputs.empty()) throw DataError("lssvm_decide: empty model");
  if (x.size() != model.support_inputs.front().size())
    throw DataError("dimension-mismatch: input has " + std::to_string(x.size()) +
                    " features, model expects " +
                    std::to_string(model.support_inputs.front().size()));
  double score = model.bias;
  for (std::size_t i = 0; i < model.support_inputs.size(); ++i)
    score += model.alphas[i] * kernel_eval(model.support_inputs[i], x, model.kernel);
  return Decision{score, score >= 0.0 ? 1 : -1};
}

GestureFeatures extract_features(const MotionProfile& profile, const FeatureConfig& config) {
  const MotionProfile fixed = normalize_length(profile, config.profile_len);
  const RssVector rss = rss_vector(fixed, config.peaks_per_frame);
  GestureFeatures out;
  out.rss_energy = flatten_features(rss, FlattenNorm::None).values;
  out.rss = flatten_features(rss, config.norm).values;
  out.range =
      flatten_features(range_matrix(fixed, config.peaks_per_frame), config.norm).values;
  return out;
}

FeatureScaler FeatureScaler::fit(const std::vector<const std::vector<double>*>& inputs) {
  if (inputs.empty()) throw DataError("feature scaler: no inputs");
  const std::size_t dim = inputs.front()->size();
  FeatureScaler scaler;
  scaler.mean.assign(dim, 0.0);
  scaler.inv_std.assign(dim, 0.0);
  const double n = static_cast<double>(inputs.size());
  for (const auto* x : inputs) {
    if (x->size() != dim) throw DataError("feature scaler: inconsistent dimensions");
    for (std::size_t f = 0; f < dim; ++f) scaler.mean[f] += (*x)[f];
  }
  for (double& m : scaler.mean) m /= n;
  for (const auto* x : inputs)
    for (std::size_t f = 0; f < dim; ++f) {
      const double d = (*x)[f] - scaler.mean[f];
      scaler.inv_std[f] += d * d;
    }
  for (std::size_t f = 0; f < dim; ++f) {
    const double var = scaler.inv_std[f] / n;
    scaler.inv_std[f] = var > 0.0 ? 1.0 / std::sqrt(var) : 0.0;  // constant feature -> 0
  }
  return scaler;
}

std::vector<double> FeatureScaler::apply(std::span<const double> x) const {
  if (x.size() != mean.size())
    throw DataError("feature scaler: input has " + std::to_string(x.size()) +
                    " features, expected " + std::to_string(mean.size()));
  std::vector<double> out(x.size());
  for (std::size_t f = 0; f < x.size(); ++f) out[f] = (x[f] - mean[f]) * inv_std[f];
  return out;
}

namespace {

bool is_push(GestureKind g) { return g == GestureKind::Fwd || g == GestureKind::FwdBwd; }

HierarchyNode train_node(const std::vector<const std::vector<double>*>& inputs,
                         const std::vector<int>& labels, const TrainingConfig& config,
                         const char* node, bool standardize) {
  if (inputs.empty()) throw DataError(std::string("class-missing: no examples for node ") + node);
  HierarchyNode out;
  std::vector<std::vector<double>> xs;
  xs.reserve(inputs.size());
  if (standardize) {
    out.scaler = FeatureScaler::fit(inputs);
    for (const auto* p : inputs) xs.push_back(out.scaler.apply(*p));
  } else {
    for (const auto* p : inputs) xs.push_back(*p);
  }
  try {
    out.model = lssvm_train(xs, labels, config.kernel, config.gamma);
  } catch (const DataError& e) {
    throw DataError(std::string("node ") + node + ": " + e.what());
  }
  return out;
}

}  // namespace

HierarchyModel train_hierarchy(const std::vector<GestureFeatures>& features,
                               const std::vector<GestureKind>& labels,
                               const TrainingConfig& config) {
  if (features.size() != labels.size())
    throw DataError("train_hierarchy: features/labels size mismatch");

  std::vector<const std::vector<double>*> in_detect, in_pushes, in_fwd, in_swipes, in_ltr;
  std::vector<int> y_detect, y_pushes, y_fwd, y_swipes, y_ltr;

  for (std::size_t i = 0; i < features.size(); ++i) {
    const GestureKind g = labels[i];
    in_detect.push_back(&features[i].rss_energy);
    y_detect.push_back(g == GestureKind::NoGesture ? -1 : 1);
    if (g == GestureKind::NoGesture) continue;

    in_pushes.push_back(&features[i].rss);
    y_pushes.push_back(is_push(g) ? 1 : -1);

    if (is_push(g)) {
      in_fwd.push_back(&features[i].range);
      y_fwd.push_back(g == GestureKind::Fwd ? 1 : -1);
    } else {
      in_swipes.push_back(&features[i].range);
      y_swipes.push_back(g == GestureKind::HoldHand ? -1 : 1);
      if (g != GestureKind::HoldHand) {
        in_ltr.push_back(&features[i].range);
        y_ltr.push_back(g == GestureKind::SwipeLTR ? 1 : -1);
      }
    }
  }

  HierarchyModel model;
  model.features = config.features;
  model.detect = train_node(in_detect, y_detect, config, "detect", /*standardize=*/true);
  model.pushes_vs_rest = train_node(in_pushes, y_pushes, config, "pushes_vs_rest", false);
  model.fwd_vs_fwdbwd = train_node(in_fwd, y_fwd, config, "fwd_vs_fwdbwd", false);
  model.swipes_vs_hold = train_node(in_swipes, y_swipes, config, "swipes_vs_hold", false);
  model.ltr_vs_rtl = train_node(in_ltr, y_ltr, config, "ltr_vs_rtl", false);
  return model;
}

GestureKind classify_gesture(const HierarchyModel& model, const GestureFeatures& features) {
  if (model.detect.decide(features.rss_energy).label < 0) return GestureKind::NoGesture;
  if (model.pushes_vs_rest.decide(features.rss).label > 0)
    return model.fwd_vs_fwdbwd.decide(features.range).label > 0 ? GestureKind::Fwd
                                                                : GestureKind::FwdBwd;
  if (model.swipes_vs_hold.decide(features.range).label < 0) return GestureKind::HoldHand;
  return model.ltr_vs_rtl.decide(features.range).label > 0 ? GestureKind::SwipeLTR
                                                           : GestureKind::SwipeRTL;
}

GestureKind classify_gesture(const HierarchyModel& model, const RssVector& rss,
                             const RangeMatrix& rm) {
  GestureFeatures f;
  f.rss_energy = flatten_features(rss, FlattenNorm::None).values;
  f.rss = flatten_features(rss, model.features.norm).values;
  f.range = flatten_features(rm, model.features.norm).values;
  return classify_gesture(model, f);
}

std::string to_string(FlattenNorm norm) {
  switch (norm) {
    case FlattenNorm::None: return "none";
    case FlattenNorm::Max: return "max";
    case FlattenNorm::ZScore: return "zscore";
  }
  return "none";
}

FlattenNorm flatten_norm_from_string(const std::string& name) {
  if (name == "none") return FlattenNorm::None;
  if (name == "max") return FlattenNorm::Max;
  if (name == "zscore") return FlattenNorm::ZScore;
  throw ConfigError("unknown feature norm '" + name + "'");
}

namespace {

json node_to_json(const HierarchyNode& node) {
  json j;
  j["kernel"] = {{"degree", node.model.kernel.degree},
                 {"offset", node.model.kernel.offset},
                 {"scale", node.model.kernel.scale}};
  j["gamma"] = node.model.gamma;
  j["bias"] = node.model.bias;
  j["alphas"] = node.model.alphas;
  j["support_inputs"] = node.model.support_inputs;
  j["norm_mean"] = node.scaler.mean;
  j["norm_inv_std"] = node.scaler.inv_std;
  return j;
}

HierarchyNode node_from_json(const json& j) {
  HierarchyNode node;
  node.model.kernel.degree = j.at("kernel").at("degree").get<std::size_t>();
  node.model.kernel.offset = j.at("kernel").at("offset").get<double>();
  node.model.kernel.scale = j.at("kernel").at("scale").get<double>();
  node.model.gamma = j.at("gamma").get<double>();
  node.model.bias = j.at("bias").get<double>();
  node.model.alphas = j.at("alphas").get<std::vector<double>>();
  node.model.support_inputs = j.at("support_inputs").get<std::vector<std::vector<double>>>();
  node.scaler.mean = j.at("norm_mean").get<std::vector<double>>();
  node.scaler.inv_std = j.at("norm_inv_std").get<std::vector<double>>();
  if (node.model.alphas.size() != node.model.support_inputs.size())
    throw DataError("model document: alphas/support_inputs size mismatch");
  if (node.scaler.mean.size() != node.scaler.inv_std.size())
    throw DataError("model document: normalisation statistics size mismatch");
  return node;
}

}  // namespace

void save_hierarchy(const std::filesystem::path& path, const HierarchyModel& model) {
  json j;
  j["schema_version"] = 1;
  j["type"] = "ultragest-hierarchy";
  j["features"] = {{"profile_len", model.features.profile_len},
                   {"peaks_per_frame", model.features.peaks_per_frame},
                   {"norm", to_string(model.features.norm)}};
  j["nodes"] = {{"detect", node_to_json(model.detect)},
                {"pushes_vs_rest", node_to_json(model.pushes_vs_rest)},
                {"fwd_vs_fwdbwd", node_to_json(model.fwd_vs_fwdbwd)},
                {"swipes_vs_hold", node_to_json(model.swipes_vs_hold)},
                {"ltr_vs_rtl", node_to_json(model.ltr_vs_rtl)}};
  std::ofstream f(path);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + path.string());
}

HierarchyModel load_hierarchy(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open model file: " + path.string());
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw DataError("model document parse error: " + std::string(e.what()));
  }
  try {
    if (j.at("schema_version").get<int>() != 1)
      throw DataError("unsupported model schema_version");
    if (j.at("type").get<std::string>() != "ultragest-hierarchy")
      throw DataError("not a hierarchy model document");
    HierarchyModel model;
    model.features.profile_len = j.at("features").at("profile_len").get<std::size_t>();
    model.features.peaks_per_frame = j.at("features").at("peaks_per_frame").get<std::size_t>();
    model.features.norm = flatten_norm_from_string(j.at("features").at("norm").get<std::string>());
    const auto& nodes = j.at("nodes");
    model.detect = node_from_json(nodes.at("detect"));
    model.pushes_vs_rest = node_from_json(nodes.at("pushes_vs_rest"));
    model.fwd_vs_fwdbwd = node_from_json(nodes.at("fwd_vs_fwdbwd"));
    model.swipes_vs_hold = node_from_json(nodes.at("swipes_vs_hold"));
    model.ltr_vs_rtl = node_from_json(nodes.at("ltr_vs_rtl"));
    return model;
  } catch (const json::exception& e) {
    throw DataError("model document missing fields: " + std::string(e.what()));
  }
}

}  // namespace ultragest
