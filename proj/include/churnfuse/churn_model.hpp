#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "churnfuse/mlp.hpp"
#include "churnfuse/numeric.hpp"

namespace churnfuse::churn {

struct RfeResult {
  std::vector<std::size_t> selected;           // ascending column indices
  std::vector<std::size_t> elimination_order;  // first removed first
};

// Recursive feature elimination: fit an L2-regularised logistic model on the
// standardized remaining columns, drop the column with the smallest absolute
// coefficient, repeat until target_k remain.
RfeResult rfe_select(const Matrix& x, std::span<const int> y, std::size_t target_k);

// Coefficients (intercept last) of the logistic scoring model RFE uses,
// fitted on already-standardized columns.
std::vector<double> fit_logistic(const Matrix& x, std::span<const int> y, double ridge = 1e-2);

struct SmoteResult {
  Matrix x;  // originals in input order, then synthetic rows
  std::vector<int> y;
  std::vector<SyntheticOrigin> origins;
  std::size_t n_original = 0;
  int minority_label = 1;
};

// Adds minority rows a + t * (b - a) (b among the k nearest minority rows of
// a, t ~ U[0,1]) until the minority count reaches ceil(ratio * majority).
SmoteResult smote_oversample(const Matrix& x, std::span<const int> y, double ratio, std::size_t k,
                             std::uint64_t seed);

struct ChurnConfig {
  std::size_t rfe_k = 8;
  double smote_ratio = 1.0;
  std::size_t smote_k = 5;
  std::vector<std::size_t> hidden{32, 32};
  nn::TrainConfig train{0.005, 40, 64, 1e-3, 1};
};

struct ChurnModel {
  std::size_t input_width = 0;
  std::vector<std::size_t> selected_features;
  Standardizer normalization;  // over the selected features
  nn::MLPParams mlp;
  double final_loss = 0.0;
  double train_accuracy = 0.0;

  bool operator==(const ChurnModel&) const = default;
};

// RFE -> normalize -> SMOTE -> MLP on cross-entropy.
ChurnModel train_churn(const Matrix& x, std::span<const int> y, const ChurnConfig& cfg);

// Churn propensity in (0, 1).
double predict_churn(const ChurnModel& model, std::span<const double> features);

// "CHRN" | u16 version | u32 input_width | u32 n_selected | u32[n_selected]
// | f64[n_selected] mean | f64[n_selected] scale | f64 final_loss
// | f64 train_accuracy | MLP block. Little-endian.
std::vector<std::uint8_t> serialize(const ChurnModel& model);
ChurnModel deserialize_churn_model(std::span<const std::uint8_t> bytes);

inline constexpr std::uint16_t kChurnFormatVersion = 1;

}  // namespace churnfuse::churn
