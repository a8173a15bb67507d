#include "churnfuse/ser_model.hpp"

#include "churnfuse/error.hpp"

namespace churnfuse::ser {

namespace {

std::vector<double> model_input(const EmotionModel& model, const audio::FeatureMap& map) {
  if (map.image.rows != 3 || map.n_mels != model.n_mels || map.image.cols != model.n_mels) {
    throw Error(ErrorCode::ShapeMismatch, "feature map is [" + std::to_string(map.image.rows) + " x " +
                                              std::to_string(map.image.cols) + "], model expects [3 x " +
                                              std::to_string(model.n_mels) + "]");
  }
  return model.normalization.apply(map.image.values);
}

}  // namespace

EmotionModel train_emotion(std::span<const audio::FeatureMap> maps, std::span<const int> labels,
                           const SerConfig& cfg) {
  if (maps.size() != labels.size() || maps.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "need one label per feature map");
  }
  const std::size_t n_mels = maps.front().n_mels;
  std::size_t counts[2] = {0, 0};
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i].image.rows != 3 || maps[i].n_mels != n_mels || maps[i].image.cols != n_mels) {
      throw Error(ErrorCode::ShapeMismatch, "feature maps differ in shape");
    }
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::ValueError, "labels must be 0 or 1");
    ++counts[labels[i]];
  }
  if (counts[0] < 2 || counts[1] < 2) {
    throw Error(ErrorCode::DegenerateData, "need at least two examples of each emotion class");
  }
  if (cfg.hidden < 1) throw Error(ErrorCode::InvalidConfig, "hidden width must be >= 1");

  Matrix x;
  x.reserve(maps.size());
  for (const auto& m : maps) x.push_back(m.image.values);

  EmotionModel model;
  model.n_mels = n_mels;
  model.normalization = Standardizer::fit(x);
  const Matrix xs = model.normalization.apply(x);
  auto init = nn::init_mlp({3 * n_mels, cfg.hidden, 1}, cfg.train.seed);
  auto trained = nn::train_mlp(std::move(init), xs, labels, cfg.train);
  model.mlp = std::move(trained.params);
  model.final_loss = trained.final_loss;
  return model;
}

std::array<double, 2> class_probabilities(const EmotionModel& model, const audio::FeatureMap& map) {
  const double p_negative = nn::predict_proba(model.mlp, model_input(model, map));
  return {1.0 - p_negative, p_negative};
}

data::EmotionPrediction predict_emotion(const EmotionModel& model, const audio::FeatureMap& map) {
  const auto probs = class_probabilities(model, map);
  data::EmotionPrediction p;
  p.binary = probs[1] > probs[0] ? 1 : 0;
  p.label = p.binary == 1 ? data::Emotion::Anger : data::Emotion::Neutral;
  p.confidence = probs[static_cast<std::size_t>(p.binary)];
  return p;
}

std::vector<std::uint8_t> serialize(const EmotionModel& model) {
  ByteWriter w;
  w.magic("SERM");
  w.u16(kSerFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.n_mels));
  w.f64s(model.normalization.mean);
  w.f64s(model.normalization.scale);
  w.f64(model.final_loss);
  nn::write_mlp(w, model.mlp);
  return w.take();
}

EmotionModel deserialize_emotion_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("SERM");
  if (r.u16() != kSerFormatVersion) throw Error(ErrorCode::BadFormat, "unsupported SERM version");
  EmotionModel m;
  m.n_mels = r.u32();
  m.normalization.mean = r.f64s(3 * m.n_mels);
  m.normalization.scale = r.f64s(3 * m.n_mels);
  m.final_loss = r.f64();
  m.mlp = nn::read_mlp(r);
  if (m.mlp.input_dim() != m.input_dim()) throw Error(ErrorCode::BadFormat, "SERM input width mismatch");
  if (!r.at_end()) throw Error(ErrorCode::BadFormat, "trailing bytes in SERM file");
  return m;
}

}  // namespace churnfuse::ser
