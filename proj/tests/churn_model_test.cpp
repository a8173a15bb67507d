#include <algorithm>
#include <cmath>
#include <random>

#include "churnfuse/churn_model.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace churnfuse;
using namespace churnfuse::churn;

namespace {

struct Data {
  Matrix x;
  std::vector<int> y;
};

// Labels depend on column 0 only; the other columns are noise.
Data signal_in_first_column(std::size_t n, std::size_t d, std::uint64_t seed, double minority_share = 0.5) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  Data out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (double& v : r) v = z(g);
    const int y = std::uniform_real_distribution<double>(0, 1)(g) < minority_share ? 1 : 0;
    r[0] += y == 1 ? 3.0 : -3.0;
    out.x.push_back(std::move(r));
    out.y.push_back(y);
  }
  return out;
}

}  // namespace

TEST(Rfe, FullWidthKeepsEverything) {
  const auto d = signal_in_first_column(60, 4, 1);
  const auto r = rfe_select(d.x, d.y, 4);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_TRUE(r.elimination_order.empty());
}

TEST(Rfe, KeepsTheInformativeColumn) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto d = signal_in_first_column(200, 6, seed);
    const auto r = rfe_select(d.x, d.y, 1);
    EXPECT_EQ(r.selected, std::vector<std::size_t>{0});
    EXPECT_EQ(r.elimination_order.size(), 5U);
    auto all = r.elimination_order;
    all.push_back(0);
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2, 3, 4, 5}));
  }
}

TEST(Rfe, Rejections) {
  const auto d = signal_in_first_column(20, 3, 2);
  EXPECT_CODE(rfe_select(d.x, std::vector<int>(20, 1), 1), ErrorCode::SingleClass);
  EXPECT_CODE(rfe_select(d.x, d.y, 0), ErrorCode::BadK);
  EXPECT_CODE(rfe_select(d.x, d.y, 4), ErrorCode::BadK);
  EXPECT_CODE(rfe_select(d.x, std::vector<int>(3, 1), 1), ErrorCode::ShapeMismatch);
}

TEST(Logistic, RecoversSlopeSign) {
  const auto d = signal_in_first_column(300, 2, 3);
  const auto w = fit_logistic(Standardizer::fit(d.x).apply(d.x), d.y);
  ASSERT_EQ(w.size(), 3U);
  EXPECT_GT(w[0], 1.0);
  EXPECT_LT(std::abs(w[1]), 0.5);
}

TEST(Smote, BalancedInputIsUnchanged) {
  Matrix x{{0}, {1}, {2}, {3}, {4}, {5}, {6}, {7}};
  std::vector<int> y{0, 1, 0, 1, 0, 1, 0, 1};
  const auto r = smote_oversample(x, y, 1.0, 3, 1);
  EXPECT_EQ(r.x, x);
  EXPECT_EQ(r.y, y);
  EXPECT_TRUE(r.origins.empty());
}

TEST(Smote, TenPercentMinorityReachesExactCount) {
  const auto d = signal_in_first_column(400, 3, 4, 0.1);
  const auto minority = static_cast<std::size_t>(std::count(d.y.begin(), d.y.end(), 1));
  const std::size_t majority = d.y.size() - minority;
  const auto r = smote_oversample(d.x, d.y, 1.0, 5, 7);
  EXPECT_EQ(r.minority_label, 1);
  EXPECT_EQ(static_cast<std::size_t>(std::count(r.y.begin(), r.y.end(), 1)), majority);
  EXPECT_EQ(static_cast<std::size_t>(std::count(r.y.begin(), r.y.end(), 0)), majority);
}

TEST(Smote, GeometryCountsAndPreservation) {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 12 + g() % 40;
    const std::size_t d = 1 + g() % 4;
    const std::size_t k = 1 + g() % 4;
    Matrix x(n, std::vector<double>(d));
    for (auto& r : x) {
      for (double& v : r) v = u(g);
    }
    std::vector<int> y(n, 0);
    const std::size_t n_min = k + 1 + g() % (n / 2 - k);
    for (std::size_t i = 0; i < n_min; ++i) y[g() % n] = 1;
    const auto ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (ones < k + 1 || ones == n) continue;
    const std::size_t minority = std::min(ones, n - ones);
    const std::size_t majority = n - minority;
    const double ratio = 0.75 + 0.5 * u(g);  // [0.25, 1.25]
    const auto r = smote_oversample(x, y, ratio, k, g());

    const auto wanted = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(majority)));
    ASSERT_EQ(r.x.size(), n + (wanted > minority ? wanted - minority : 0));
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_EQ(r.x[i], x[i]);
      EXPECT_EQ(r.y[i], y[i]);
    }
    for (const auto& o : r.origins) {
      ASSERT_TRUE(o.parent_b.has_value());
      EXPECT_EQ(y[o.parent_a], r.minority_label);
      EXPECT_EQ(y[*o.parent_b], r.minority_label);
      EXPECT_EQ(r.y[o.output_index], r.minority_label);
      EXPECT_TRUE(oracle::on_segment(r.x[o.output_index], x[o.parent_a], x[*o.parent_b], o.t, 1e-9));
    }
  }
}

TEST(Smote, TooFewMinority) {
  Matrix x{{0}, {1}, {2}, {3}, {4}};
  std::vector<int> y{0, 0, 0, 1, 1};
  EXPECT_CODE(smote_oversample(x, y, 1.0, 2, 1), ErrorCode::TooFewMinority);
}

TEST(ChurnModel, SeparableDataIsLearned) {
  const auto d = signal_in_first_column(300, 5, 6, 0.3);
  ChurnConfig cfg;
  cfg.rfe_k = 3;
  const auto m = train_churn(d.x, d.y, cfg);
  EXPECT_GE(m.train_accuracy, 0.95);
  EXPECT_EQ(m.selected_features.size(), 3U);
  EXPECT_NE(std::find(m.selected_features.begin(), m.selected_features.end(), 0U), m.selected_features.end());
  std::vector<double> deep(5, 0.0);
  deep[0] = 8.0;
  EXPECT_GT(predict_churn(m, deep), 0.9);
  deep[0] = -8.0;
  EXPECT_LT(predict_churn(m, deep), 0.1);
  EXPECT_CODE(predict_churn(m, std::vector<double>(4, 0.0)), ErrorCode::DimensionMismatch);
}

TEST(ChurnModel, ZeroWeightsGiveHalf) {
  const auto d = signal_in_first_column(60, 3, 7);
  ChurnConfig cfg;
  cfg.train.epochs = 1;
  auto m = train_churn(d.x, d.y, cfg);
  m.mlp = nn::zeros_like(m.mlp);
  EXPECT_EQ(predict_churn(m, d.x[0]), 0.5);
}

TEST(ChurnModel, DeterministicBytesAndRoundTrip) {
  const auto d = signal_in_first_column(120, 6, 8, 0.25);
  ChurnConfig cfg;
  cfg.train.epochs = 5;
  const auto a = train_churn(d.x, d.y, cfg);
  const auto b = train_churn(d.x, d.y, cfg);
  const auto bytes = serialize(a);
  EXPECT_EQ(bytes, serialize(b));
  const auto back = deserialize_churn_model(bytes);
  EXPECT_EQ(back, a);
  for (const auto& r : d.x) EXPECT_EQ(predict_churn(back, r), predict_churn(a, r));

  auto bad = bytes;
  bad[4] = 9;  // version
  EXPECT_CODE(deserialize_churn_model(bad), ErrorCode::BadFormat);
  bad = bytes;
  bad.resize(bytes.size() / 2);
  EXPECT_CODE(deserialize_churn_model(bad), ErrorCode::BadFormat);
}

TEST(ChurnModel, NormalizationUsesSelectedColumns) {
  const auto d = signal_in_first_column(100, 4, 9);
  ChurnConfig cfg;
  cfg.rfe_k = 2;
  cfg.train.epochs = 2;
  const auto m = train_churn(d.x, d.y, cfg);
  ASSERT_EQ(m.normalization.mean.size(), 2U);
  Matrix sel;
  for (const auto& r : d.x) sel.push_back({r[m.selected_features[0]], r[m.selected_features[1]]});
  const auto z = m.normalization.apply(sel);
  for (std::size_t j = 0; j < 2; ++j) {
    double s = 0.0, ss = 0.0;
    for (const auto& r : z) {
      s += r[j];
      ss += r[j] * r[j];
    }
    EXPECT_NEAR(s / 100.0, 0.0, 1e-12);
    EXPECT_NEAR(ss / 100.0, 1.0, 1e-12);
  }
}
