#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "churnfuse/binary_io.hpp"
#include "churnfuse/numeric.hpp"

namespace churnfuse::nn {

// Feed-forward binary classifier: rectifier hidden layers, one logistic output.
// weights[l] is row-major [layer_dims[l+1] x layer_dims[l]].
struct MLPParams {
  std::vector<std::size_t> layer_dims;
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  std::size_t input_dim() const { return layer_dims.empty() ? 0 : layer_dims.front(); }
  bool operator==(const MLPParams&) const = default;
};

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 60;
  std::size_t batch_size = 32;
  double l2_penalty = 1e-4;
  std::uint64_t seed = 1;
};

void validate(const TrainConfig& cfg);
void validate(const MLPParams& params);

inline constexpr double kHiddenBiasInit = 0.01;

// He-initialised weights; hidden biases kHiddenBiasInit, output bias 0.
// layer_dims must end in 1.
MLPParams init_mlp(std::vector<std::size_t> layer_dims, std::uint64_t seed);

MLPParams zeros_like(const MLPParams& params);

double logit(const MLPParams& params, std::span<const double> x);
double predict_proba(const MLPParams& params, std::span<const double> x);

// Mean binary cross-entropy over the rows plus 0.5 * l2 * sum of squared
// weights (biases unpenalised). Writes the gradient when `grad` is non-null.
double loss_and_gradient(const MLPParams& params, const Matrix& x, std::span<const int> y,
                         double l2_penalty, MLPParams* grad);

struct TrainResult {
  MLPParams params;
  double final_loss = 0.0;
};

// Mini-batch gradient descent with Adam steps. Batches are reshuffled each
// epoch from the config seed; batch_size >= rows means full-batch training.
TrainResult train_mlp(MLPParams init, const Matrix& x, std::span<const int> y, const TrainConfig& cfg);

void write_mlp(ByteWriter& w, const MLPParams& params);
MLPParams read_mlp(ByteReader& r);

}  // namespace churnfuse::nn
