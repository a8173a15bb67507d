#include <cmath>
#include <random>

#include "churnfuse/mlp.hpp"
#include "churnfuse/ser_model.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace churnfuse;

namespace {

Matrix random_rows(std::mt19937_64& g, std::size_t n, std::size_t d) {
  std::normal_distribution<double> z(0.0, 1.0);
  Matrix x(n, std::vector<double>(d));
  for (auto& r : x) {
    for (double& v : r) v = z(g);
  }
  return x;
}

std::vector<int> random_labels(std::mt19937_64& g, std::size_t n) {
  std::vector<int> y(n);
  for (auto& v : y) v = static_cast<int>(g() & 1U);
  return y;
}

// Two Gaussian blobs in feature-map space, label 1 shifted by +shift.
std::pair<std::vector<audio::FeatureMap>, std::vector<int>> blobs(std::size_t n, std::size_t n_mels, double shift,
                                                                   std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<audio::FeatureMap> maps;
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) {
    const int y = static_cast<int>(i % 2);
    audio::FeatureMap m;
    m.n_mels = n_mels;
    m.image = audio::Grid(3, n_mels);
    for (double& v : m.image.values) v = z(g) + (y == 1 ? shift : 0.0);
    maps.push_back(std::move(m));
    labels.push_back(y);
  }
  return {maps, labels};
}

}  // namespace

TEST(Mlp, InitShapesAndZeroBiases) {
  const auto p = nn::init_mlp({5, 7, 3, 1}, 4);
  ASSERT_EQ(p.weights.size(), 3U);
  EXPECT_EQ(p.weights[0].size(), 35U);
  EXPECT_EQ(p.weights[1].size(), 21U);
  EXPECT_EQ(p.weights[2].size(), 3U);
  for (std::size_t l = 0; l < p.biases.size(); ++l) {
    const double want = l + 1 < p.biases.size() ? nn::kHiddenBiasInit : 0.0;
    for (double v : p.biases[l]) EXPECT_EQ(v, want);
  }
  EXPECT_EQ(p, nn::init_mlp({5, 7, 3, 1}, 4));
  EXPECT_NE(p, nn::init_mlp({5, 7, 3, 1}, 5));
}

TEST(Mlp, ZeroNetworkPredictsHalf) {
  const auto p = nn::zeros_like(nn::init_mlp({4, 6, 1}, 1));
  const std::vector<double> x{1.0, -2.0, 3.0, 0.5};
  EXPECT_EQ(nn::predict_proba(p, x), 0.5);
  // log(2) is the cross-entropy of a coin flip.
  Matrix xs{x, x};
  const std::vector<int> y{0, 1};
  EXPECT_NEAR(nn::loss_and_gradient(p, xs, y, 0.0, nullptr), std::log(2.0), 1e-15);
}

TEST(Mlp, LossIncludesHalfL2OfWeightsOnly) {
  auto p = nn::init_mlp({3, 4, 1}, 2);
  for (auto& b : p.biases) {
    for (double& v : b) v = 0.3;
  }
  Matrix x{{0.1, 0.2, 0.3}};
  const std::vector<int> y{1};
  double sq = 0.0;
  for (const auto& w : p.weights) {
    for (double v : w) sq += v * v;
  }
  const double plain = nn::loss_and_gradient(p, x, y, 0.0, nullptr);
  EXPECT_NEAR(nn::loss_and_gradient(p, x, y, 0.1, nullptr), plain + 0.05 * sq, 1e-12);
}

// Analytic backpropagation against central differences, for the shapes the
// emotion and churn models use.
TEST(Mlp, GradientMatchesFiniteDifferences) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 40; ++trial) {
    const bool ser_shape = trial % 2 == 0;
    const std::size_t d = 2 + g() % 5;
    std::vector<std::size_t> dims{ser_shape ? 3 * d : d, 2 + g() % 6};
    if (!ser_shape) dims.push_back(2 + g() % 6);
    dims.push_back(1);
    auto p = nn::init_mlp(dims, g());
    std::normal_distribution<double> z(0.0, 0.1);
    for (auto& b : p.biases) {
      for (double& v : b) v = z(g);
    }
    const std::size_t n = 3 + g() % 6;
    const Matrix x = random_rows(g, n, dims.front());
    const auto y = random_labels(g, n);
    EXPECT_LT(oracle::gradient_rel_error(p, x, y, 1e-3), 1e-4) << "trial " << trial;
  }
}

TEST(Mlp, TrainingSeparatesLinearData) {
  std::mt19937_64 g(3);
  const Matrix x = random_rows(g, 300, 2);
  std::vector<int> y;
  for (const auto& r : x) y.push_back(r[0] + r[1] > 0.0 ? 1 : 0);
  const auto res = nn::train_mlp(nn::init_mlp({2, 8, 1}, 1), x, y, nn::TrainConfig{0.02, 60, 32, 1e-4, 1});
  std::size_t correct = 0;
  for (std::size_t i = 0; i < x.size(); ++i) correct += (nn::predict_proba(res.params, x[i]) > 0.5) == (y[i] == 1);
  EXPECT_GE(static_cast<double>(correct) / 300.0, 0.95);
  EXPECT_LT(res.final_loss, 0.3);
}

TEST(Mlp, TrainingIsDeterministic) {
  std::mt19937_64 g(5);
  const Matrix x = random_rows(g, 50, 3);
  const auto y = random_labels(g, 50);
  const nn::TrainConfig cfg{0.01, 5, 8, 1e-4, 9};
  const auto a = nn::train_mlp(nn::init_mlp({3, 4, 1}, 2), x, y, cfg);
  const auto b = nn::train_mlp(nn::init_mlp({3, 4, 1}, 2), x, y, cfg);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.final_loss, b.final_loss);
}

TEST(Mlp, InvalidConfigRejected) {
  EXPECT_CODE(nn::validate(nn::TrainConfig{0.0, 1, 1, 0.0, 1}), ErrorCode::InvalidConfig);
  EXPECT_CODE(nn::validate(nn::TrainConfig{0.01, 0, 1, 0.0, 1}), ErrorCode::InvalidConfig);
  EXPECT_CODE(nn::validate(nn::TrainConfig{0.01, 1, 0, 0.0, 1}), ErrorCode::InvalidConfig);
  EXPECT_CODE(nn::validate(nn::TrainConfig{0.01, 1, 1, -1.0, 1}), ErrorCode::InvalidConfig);
}

TEST(Ser, LearnsSeparableBlobs) {
  auto [maps, labels] = blobs(200, 4, 1.5, 1);
  const auto model = ser::train_emotion(maps, labels, ser::SerConfig{});
  auto [test_maps, test_labels] = blobs(400, 4, 1.5, 2);

  // Nearest-centroid reference on the same data.
  std::vector<double> centroid[2] = {std::vector<double>(12, 0.0), std::vector<double>(12, 0.0)};
  for (std::size_t i = 0; i < maps.size(); ++i) {
    for (std::size_t j = 0; j < 12; ++j) centroid[labels[i]][j] += maps[i].image.values[j] / 100.0;
  }
  std::size_t model_ok = 0, centroid_ok = 0;
  for (std::size_t i = 0; i < test_maps.size(); ++i) {
    const auto pred = ser::predict_emotion(model, test_maps[i]);
    model_ok += pred.binary == test_labels[i];
    double d[2] = {0.0, 0.0};
    for (int c = 0; c < 2; ++c) {
      for (std::size_t j = 0; j < 12; ++j) {
        const double diff = test_maps[i].image.values[j] - centroid[c][j];
        d[c] += diff * diff;
      }
    }
    centroid_ok += (d[1] < d[0] ? 1 : 0) == test_labels[i];
  }
  const double n = static_cast<double>(test_maps.size());
  EXPECT_GE(centroid_ok / n, 0.95);
  EXPECT_GE(model_ok / n, 0.95);
}

TEST(Ser, PredictionsAreConsistent) {
  auto [maps, labels] = blobs(40, 3, 1.0, 4);
  const auto model = ser::train_emotion(maps, labels, ser::SerConfig{4, {0.01, 5, 8, 1e-4, 2}});
  for (const auto& m : maps) {
    const auto probs = ser::class_probabilities(model, m);
    EXPECT_NEAR(probs[0] + probs[1], 1.0, 1e-15);
    const auto pred = ser::predict_emotion(model, m);
    EXPECT_NO_THROW(data::validate(pred));
    EXPECT_EQ(pred.binary, data::map_emotion_to_binary(pred.label));
    EXPECT_EQ(pred.confidence, probs[static_cast<std::size_t>(pred.binary)]);
  }
  EXPECT_EQ(model, ser::train_emotion(maps, labels, ser::SerConfig{4, {0.01, 5, 8, 1e-4, 2}}));
}

TEST(Ser, Rejections) {
  auto [maps, labels] = blobs(10, 3, 1.0, 5);
  std::vector<int> one_class(10, 1);
  one_class[0] = 0;
  EXPECT_CODE(ser::train_emotion(maps, one_class, ser::SerConfig{}), ErrorCode::DegenerateData);
  std::vector<int> short_labels(labels.begin(), labels.begin() + 5);
  EXPECT_CODE(ser::train_emotion(maps, short_labels, ser::SerConfig{}), ErrorCode::ShapeMismatch);

  const auto model = ser::train_emotion(maps, labels, ser::SerConfig{4, {0.01, 2, 8, 1e-4, 2}});
  auto [wide, wide_labels] = blobs(1, 5, 0.0, 6);
  EXPECT_CODE(ser::predict_emotion(model, wide.front()), ErrorCode::ShapeMismatch);
}

TEST(Ser, SerializationRoundTrip) {
  auto [maps, labels] = blobs(20, 3, 1.0, 7);
  const auto model = ser::train_emotion(maps, labels, ser::SerConfig{4, {0.01, 3, 8, 1e-4, 2}});
  const auto bytes = ser::serialize(model);
  EXPECT_EQ(ser::deserialize_emotion_model(bytes), model);
  EXPECT_EQ(ser::serialize(ser::deserialize_emotion_model(bytes)), bytes);

  auto truncated = bytes;
  truncated.pop_back();
  EXPECT_CODE(ser::deserialize_emotion_model(truncated), ErrorCode::BadFormat);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_CODE(ser::deserialize_emotion_model(bad_magic), ErrorCode::BadFormat);
}
