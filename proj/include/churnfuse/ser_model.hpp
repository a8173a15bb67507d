#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "churnfuse/audio_features.hpp"
#include "churnfuse/data_model.hpp"
#include "churnfuse/mlp.hpp"

namespace churnfuse::ser {

// Binary emotion classifier on flattened [3 x n_mels] feature maps: one
// rectifier hidden layer and a logistic output giving P(negative).
struct EmotionModel {
  nn::MLPParams mlp;
  std::size_t n_mels = 0;
  Standardizer normalization;
  double final_loss = 0.0;

  std::size_t input_dim() const { return 3 * n_mels; }
  bool operator==(const EmotionModel&) const = default;
};

struct SerConfig {
  std::size_t hidden = 16;
  nn::TrainConfig train{0.01, 80, 32, 1e-4, 1};
};

// labels: 0 = positive emotion, 1 = negative emotion.
EmotionModel train_emotion(std::span<const audio::FeatureMap> maps, std::span<const int> labels,
                           const SerConfig& cfg);

// {P(positive), P(negative)}.
std::array<double, 2> class_probabilities(const EmotionModel& model, const audio::FeatureMap& map);

// Only the binary outcome is known, so the label is the representative of its
// class: Neutral for 0, Anger for 1.
data::EmotionPrediction predict_emotion(const EmotionModel& model, const audio::FeatureMap& map);

// "SERM" | u16 version | u32 n_mels | f64[3*n_mels] mean | f64[3*n_mels] scale
// | f64 final_loss | MLP block. Little-endian throughout.
std::vector<std::uint8_t> serialize(const EmotionModel& model);
EmotionModel deserialize_emotion_model(std::span<const std::uint8_t> bytes);

inline constexpr std::uint16_t kSerFormatVersion = 1;

}  // namespace churnfuse::ser
