#include <algorithm>
#include <cmath>
#include <random>

#include "churnfuse/metrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace churnfuse;
using namespace churnfuse::metrics;
using data::RiskLabel;

namespace {

fusion::RiskAssignment assignment(std::string id, double rank_score) {
  fusion::RiskAssignment a;
  a.id = std::move(id);
  a.decision.rank_score = rank_score;
  return a;
}

std::vector<RiskLabel> random_labels(std::mt19937_64& g, std::size_t n) {
  std::vector<RiskLabel> out(n);
  for (auto& l : out) l = static_cast<RiskLabel>(g() % 3);
  return out;
}

}  // namespace

TEST(AveragePrecision, HandExamples) {
  EXPECT_DOUBLE_EQ(average_precision(std::vector<int>{1, 0, 1, 0, 0}, 2), (1.0 + 2.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(average_precision(std::vector<int>{1, 1, 0}, 3), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(average_precision(std::vector<int>{0, 1, 1}, 2), (0.5 + 2.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(average_precision(std::vector<int>{1, 1, 1}, 3), 1.0);
  EXPECT_DOUBLE_EQ(average_precision(std::vector<int>{0, 0, 0}, 1), 0.0);
  EXPECT_CODE(average_precision(std::vector<int>{1, 0}, 0), ErrorCode::NoRelevant);
  EXPECT_CODE(average_precision(std::vector<int>{1, 1}, 1), ErrorCode::ValueError);
}

TEST(AveragePrecision, QueryFormAndMap) {
  RiskQuery q1{RiskLabel::High, {"a", "b", "c", "d"}, {"a", "c"}};
  RiskQuery q2{RiskLabel::Low, {"d", "c", "b", "a"}, {"b"}};
  EXPECT_DOUBLE_EQ(average_precision(q1), 5.0 / 6.0);
  EXPECT_DOUBLE_EQ(average_precision(q2), 1.0 / 3.0);
  const std::vector<RiskQuery> qs{q1, q2};
  EXPECT_DOUBLE_EQ(mean_average_precision(qs), (5.0 / 6.0 + 1.0 / 3.0) / 2.0);
  EXPECT_CODE(mean_average_precision(std::vector<RiskQuery>{}), ErrorCode::EmptyQuerySet);
}

TEST(Queries, LevelOrientedOrdering) {
  const fusion::RiskAssignments as{assignment("a", 0.01), assignment("b", 4.09), assignment("c", 2.05),
                                   assignment("d", 3.07), assignment("e", 1.1)};
  const std::vector<RiskLabel> truth{RiskLabel::Low, RiskLabel::High, RiskLabel::Mid, RiskLabel::High,
                                     RiskLabel::Low};
  const auto qs = build_risk_queries(as, truth);
  ASSERT_EQ(qs.size(), 3U);
  EXPECT_EQ(qs[0].ranked_ids, (std::vector<std::string>{"a", "e", "c", "d", "b"}));
  EXPECT_EQ(qs[1].ranked_ids, (std::vector<std::string>{"c", "e", "d", "a", "b"}));
  EXPECT_EQ(qs[2].ranked_ids, (std::vector<std::string>{"b", "d", "c", "e", "a"}));
  EXPECT_DOUBLE_EQ(mean_average_precision(qs), 1.0);

  const auto desc = build_risk_queries(as, truth, QueryOrder::Descending);
  for (const auto& q : desc) EXPECT_EQ(q.ranked_ids, qs[2].ranked_ids);
}

TEST(Queries, TiesKeepCohortOrderAndEmptyLevelsAreSkipped) {
  const fusion::RiskAssignments as{assignment("x", 2.0), assignment("y", 2.0), assignment("z", 2.0)};
  const std::vector<RiskLabel> truth(3, RiskLabel::High);
  const auto qs = build_risk_queries(as, truth);
  ASSERT_EQ(qs.size(), 1U);
  EXPECT_EQ(qs[0].level, RiskLabel::High);
  EXPECT_EQ(qs[0].ranked_ids, (std::vector<std::string>{"x", "y", "z"}));
}

TEST(F1, HandExample) {
  const std::vector<RiskLabel> truth{RiskLabel::Low, RiskLabel::Low, RiskLabel::Mid, RiskLabel::High};
  const std::vector<RiskLabel> pred{RiskLabel::Low, RiskLabel::Mid, RiskLabel::Mid, RiskLabel::Low};
  const auto f1 = per_class_f1(pred, truth);
  EXPECT_DOUBLE_EQ(f1[0], 2.0 / 4.0);  // tp 1, fp 1, fn 1
  EXPECT_DOUBLE_EQ(f1[1], 2.0 / 3.0);  // tp 1, fp 1, fn 0
  EXPECT_DOUBLE_EQ(f1[2], 0.0);
  EXPECT_DOUBLE_EQ(macro_f1(pred, truth), (0.5 + 2.0 / 3.0) / 3.0);
  EXPECT_DOUBLE_EQ(accuracy(pred, truth), 0.5);
  EXPECT_CODE(macro_f1(pred, std::vector<RiskLabel>{}), ErrorCode::LengthMismatch);
  EXPECT_CODE(macro_f1(std::vector<RiskLabel>{}, std::vector<RiskLabel>{}), ErrorCode::LengthMismatch);
}

TEST(Auc, HandExamplesAndTies) {
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<int>{0, 0, 1, 1}), 0.75);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.5, 0.5}, std::vector<int>{0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.9, 0.1}, std::vector<int>{0, 1}), 0.0);
  EXPECT_CODE(roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}), ErrorCode::SingleClass);
}

TEST(Oracles, RandomInstancesAgree) {
  std::mt19937_64 g(17);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + g() % 8;
    std::vector<int> rel(n);
    for (int& r : rel) r = static_cast<int>(g() % 2);
    std::size_t hits = 0;
    for (int r : rel) hits += static_cast<std::size_t>(r);
    const std::size_t m = hits + g() % 3;
    if (m > 0) { EXPECT_EQ(average_precision(rel, m), oracle::average_precision(rel, m)); }

    const auto truth = random_labels(g, n);
    const auto pred = random_labels(g, n);
    EXPECT_EQ(macro_f1(pred, truth), oracle::macro_f1(pred, truth));

    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = static_cast<double>(g() % 5) / 4.0;
      labels[i] = static_cast<int>(g() % 2);
    }
    const bool both = std::count(labels.begin(), labels.end(), 1) > 0 && std::count(labels.begin(), labels.end(), 0) > 0;
    if (both) { EXPECT_NEAR(roc_auc(scores, labels), oracle::auc(scores, labels), 1e-12); }
  }
}

TEST(Invariances, AucUnderMonotoneTransformAndF1UnderRelabeling) {
  std::mt19937_64 g(18);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> s(30), t(30);
    std::vector<int> y(30);
    for (std::size_t i = 0; i < 30; ++i) {
      s[i] = u(g);
      t[i] = std::exp(3.0 * s[i]) - 7.0;
      y[i] = static_cast<int>(i % 2);
    }
    EXPECT_DOUBLE_EQ(roc_auc(s, y), roc_auc(t, y));
    std::vector<int> flipped(30);
    for (std::size_t i = 0; i < 30; ++i) flipped[i] = 1 - y[i];
    EXPECT_NEAR(roc_auc(s, y) + roc_auc(s, flipped), 1.0, 1e-12);

    const auto truth = random_labels(g, 30);
    const auto pred = random_labels(g, 30);
    auto rotate = [](std::vector<RiskLabel> v) {
      for (auto& l : v) l = static_cast<RiskLabel>((static_cast<int>(l) + 1) % 3);
      return v;
    };
    EXPECT_NEAR(macro_f1(pred, truth), macro_f1(rotate(pred), rotate(truth)), 1e-15);
    EXPECT_DOUBLE_EQ(macro_f1(truth, truth), 1.0);
  }
}

TEST(Correlations, KeysAndDegenerateColumns) {
  fusion::RiskAssignments as;
  const double fl[] = {0.9, 0.6, 0.3, 0.1};
  const int emo[] = {0, 0, 1, 1};
  const double p[] = {0.2, 0.4, 0.6, 0.9};
  for (int i = 0; i < 4; ++i) {
    data::ModalityScores s;
    s.fl_score = fl[i];
    s.churn_propensity = p[i];
    s.emotion.binary = emo[i];
    s.emotion.label = emo[i] ? data::Emotion::Anger : data::Emotion::Neutral;
    fusion::RiskAssignment a;
    a.id = "c" + std::to_string(i);
    a.fl_score = fl[i];
    a.churn_propensity = p[i];
    a.emotion_binary = emo[i];
    a.decision = fusion::decision_fuse(fusion::translate(s, {}), p[i]);
    as.push_back(a);
  }
  const auto c = correlation_report(as);
  EXPECT_EQ(c.size(), 6U);
  EXPECT_GT(c.at("emotion_binary~D"), 0.0);
  EXPECT_LT(c.at("fl_score~D"), 0.0);
  EXPECT_NEAR(c.at("fl_score~churn_propensity"), -0.9807415054124509, 1e-12);

  auto flat = as;
  for (auto& a : flat) a.emotion_binary = 1;
  EXPECT_CODE(correlation_report(flat), ErrorCode::DegenerateColumn);
  auto churn_only = as;
  churn_only[2].fl_score.reset();
  EXPECT_CODE(correlation_report(churn_only), ErrorCode::MissingModality);
}

TEST(Evaluate, ReportFields) {
  fusion::RiskAssignments as;
  const double p[] = {0.1, 0.6, 0.9, 0.2};
  for (int i = 0; i < 4; ++i) {
    fusion::RiskAssignment a;
    a.id = "c" + std::to_string(i);
    a.churn_propensity = p[i];
    a.decision = fusion::churn_only_decision(p[i]);
    as.push_back(a);
  }
  const std::vector<RiskLabel> truth{RiskLabel::Low, RiskLabel::Mid, RiskLabel::High, RiskLabel::Mid};
  const std::vector<int> churned{0, 1, 1, 0};
  const auto r = evaluate("none", as, truth, churned);
  EXPECT_EQ(r.risk_histogram, (std::array<std::size_t, 3>{2, 1, 1}));
  EXPECT_DOUBLE_EQ(r.accuracy, 0.75);
  EXPECT_DOUBLE_EQ(r.auc, 1.0);
  EXPECT_TRUE(r.correlations.empty());
  const auto text = format_report(r);
  for (const char* key : {"strategy = none\n", "map = ", "macro_f1 = ", "accuracy = 0.75\n", "auc = 1\n",
                          "f1_low = ", "f1_mid = ", "f1_high = ", "count_low = 2\n", "count_mid = 1\n",
                          "count_high = 1\n"}) {
    EXPECT_NE(text.find(key), std::string::npos) << key;
  }
  EXPECT_CODE(evaluate("none", as, truth, std::vector<int>{0, 1}), ErrorCode::LengthMismatch);
}
