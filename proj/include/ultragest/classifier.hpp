#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ultragest/features.hpp"
#include "ultragest/simulator.hpp"

namespace ultragest {

/// Polynomial kernel (scale * <a, b> + offset) ^ degree.
struct KernelParams {
  std::size_t degree = 3;
  double offset = 1.0;
  double scale = 1.0;

  void validate() const;
};

double kernel_eval(std::span<const double> a, std::span<const double> b,
                   const KernelParams& params);

/// Least-squares SVM: training solves the (n+1) x (n+1) saddle system
///
///   [ 0   1^T        ] [bias ]   [ 0 ]
///   [ 1   K + I/gamma] [alpha] = [ y ]
///
/// and the decision value for x is sum_i alpha_i K(x_i, x) + bias.
struct LsSvmModel {
  std::vector<std::vector<double>> support_inputs;
  std::vector<double> alphas;
  double bias = 0.0;
  KernelParams kernel;
  double gamma = 10.0;
};

/// Trains a binary LS-SVM. Labels must be +1/-1 with both classes present.
/// Throws DataError for one-class input or a singular system.
LsSvmModel lssvm_train(const std::vector<std::vector<double>>& inputs,
                       const std::vector<int>& labels, const KernelParams& kernel, double gamma);

struct Decision {
  double score = 0.0;
  int label = 1;  // sign(score), 0 maps to +1
};

Decision lssvm_decide(const LsSvmModel& model, std::span<const double> x);

/// Flattened features for one profile: RSS vector for the upper hierarchy
/// levels, range matrix for the lower ones. `rss_energy` keeps the raw
/// per-frame sums (detection needs absolute signal strength); `rss` and
/// `range` carry the configured per-vector normalisation for the shape-based
/// nodes.
struct GestureFeatures {
  std::vector<double> rss_energy;
  std::vector<double> rss;
  std::vector<double> range;
};

GestureFeatures extract_features(const MotionProfile& profile, const FeatureConfig& config);

struct TrainingConfig {
  KernelParams kernel;
  double gamma = 10.0;
  FeatureConfig features;
};

/// Per-feature z-score statistics fitted on a training set; constant features
/// map to zero. An empty scaler is the identity.
struct FeatureScaler {
  std::vector<double> mean;
  std::vector<double> inv_std;

  bool empty() const { return mean.empty(); }
  static FeatureScaler fit(const std::vector<const std::vector<double>*>& inputs);
  std::vector<double> apply(std::span<const double> x) const;
};

/// One binary node: the trained LS-SVM plus the normalisation fitted on its
/// training inputs. Only the detection node carries statistics (its inputs are
/// raw energies); shape nodes are normalised per vector upstream.
struct HierarchyNode {
  FeatureScaler scaler;
  LsSvmModel model;

  Decision decide(std::span<const double> x) const {
    return scaler.empty() ? lssvm_decide(model, x) : lssvm_decide(model, scaler.apply(x));
  }
};

/// The five binary nodes of the decision tree. Positive class is the left
/// branch at each node:
///   detect          gesture (+1)        / no gesture (-1)     RSS
///   pushes_vs_rest  fwd, fwd_bwd (+1)   / swipes, hold (-1)   RSS
///   fwd_vs_fwdbwd   fwd (+1)            / fwd_bwd (-1)        range
///   swipes_vs_hold  swipes (+1)         / hold_hand (-1)      range
///   ltr_vs_rtl      swipe_ltr (+1)      / swipe_rtl (-1)      range
struct HierarchyModel {
  HierarchyNode detect;
  HierarchyNode pushes_vs_rest;
  HierarchyNode fwd_vs_fwdbwd;
  HierarchyNode swipes_vs_hold;
  HierarchyNode ltr_vs_rtl;
  FeatureConfig features;
};

/// Trains all five nodes from labeled features. Every node must see both of
/// its classes. NoGesture examples feed only the detect node.
HierarchyModel train_hierarchy(const std::vector<GestureFeatures>& features,
                               const std::vector<GestureKind>& labels,
                               const TrainingConfig& config);

/// Walks the tree and returns exactly one leaf.
GestureKind classify_gesture(const HierarchyModel& model, const GestureFeatures& features);
GestureKind classify_gesture(const HierarchyModel& model, const RssVector& rss,
                             const RangeMatrix& rm);

void save_hierarchy(const std::filesystem::path& path, const HierarchyModel& model);
HierarchyModel load_hierarchy(const std::filesystem::path& path);

std::string to_string(FlattenNorm norm);
FlattenNorm flatten_norm_from_string(const std::string& name);

}  // namespace ultragest
