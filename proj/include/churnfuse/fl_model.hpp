#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "churnfuse/numeric.hpp"

namespace churnfuse::fl {

struct LabeledExample {
  std::vector<double> features;
  double target = 0.0;
  bool operator==(const LabeledExample&) const = default;
};

struct SmognConfig {
  double relevance_threshold = 0.6;
  std::size_t k_neighbors = 5;
  double gaussian_perturbation = 0.05;
  double oversample_ratio = 1.0;
  std::uint64_t seed = 1;
};

struct SmognResult {
  // The input examples, unchanged and in order, followed by the synthetic ones.
  std::vector<LabeledExample> samples;
  std::vector<SyntheticOrigin> origins;
  std::vector<double> relevance;  // one per input example
  std::size_t n_original = 0;
};

void validate(const SmognConfig& cfg);

// |y - median(y)| rescaled so the largest deviation is 1 (all zero when every
// target equals the median).
std::vector<double> relevance_scores(std::span<const double> targets);

// Rare-target oversampling for regression: SMOTER interpolation between a rare
// example and a rare neighbor among its k nearest, Gaussian jitter when no
// rare neighbor is close. Emits ceil(oversample_ratio * #rare) new examples.
SmognResult smogn_resample(std::span<const LabeledExample> labeled, const SmognConfig& cfg);

// k-nearest-neighbor mean regressor under a Minkowski metric; ties go to the
// lower training index.
struct KnnRegressor {
  std::size_t k = 3;
  double p = 2.0;
  Matrix x;
  std::vector<double> y;

  double predict(std::span<const double> query) const;
  std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }
  bool operator==(const KnnRegressor&) const = default;
};

struct CoregConfig {
  std::size_t k1 = 3;
  std::size_t k2 = 3;
  double p1 = 2.0;
  double p2 = 5.0;
  std::size_t max_iterations = 100;
  std::size_t pool_size = 100;
  std::size_t batch_per_iter = 5;
  std::uint64_t seed = 1;
};

void validate(const CoregConfig& cfg);

// One accepted pseudo-label: `learner` (1 or 2) labeled unlabeled row
// `unlabeled_index` with `value`, which lowered its neighborhood
// leave-one-out squared error by `delta` (> 0); the pair went to the peer.
struct PseudoLabel {
  std::size_t iteration = 0;
  int learner = 1;
  std::size_t unlabeled_index = 0;
  double value = 0.0;
  double delta = 0.0;
  bool operator==(const PseudoLabel&) const = default;
};

struct FLModel {
  KnnRegressor learner1;
  KnnRegressor learner2;
  std::vector<PseudoLabel> transcript;
};

FLModel coreg_train(std::span<const LabeledExample> labeled, const Matrix& unlabeled,
                    const SmognConfig& smogn, const CoregConfig& cfg);

// Mean of the two learners, clipped to [0, 1].
double predict_fl(const FLModel& model, std::span<const double> features);

// "FLKN" | u16 version | u32 dim | per learner: u32 k, f64 p, u64 n,
// f64[n*dim] features, f64[n] targets. Little-endian.
std::vector<std::uint8_t> serialize(const FLModel& model);
FLModel deserialize_fl_model(std::span<const std::uint8_t> bytes);

inline constexpr std::uint16_t kFlFormatVersion = 1;

}  // namespace churnfuse::fl
