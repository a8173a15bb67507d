#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "churnfuse/data_model.hpp"
#include "churnfuse/fusion.hpp"

namespace churnfuse::metrics {

// (1/m) * sum_k P(k) * rel(k), P(k) the precision of the top k.
double average_precision(std::span<const int> ranked_relevance, std::size_t m);

struct RiskQuery {
  data::RiskLabel level = data::RiskLabel::Low;
  std::vector<std::string> ranked_ids;
  std::vector<std::string> relevant_ids;
};

double average_precision(const RiskQuery& query);
double mean_average_precision(std::span<const RiskQuery> queries);

// How each level's query orders the cohort by rank_score.
enum class QueryOrder {
  // high: descending; low: ascending; mid: closest to the mid band centre
  // (D = 2, propensity 0.5) first. Every level can reach AP = 1.
  LevelOriented,
  // Every level ranks the whole cohort by rank_score descending.
  Descending,
};

// One query per risk level that has at least one member in `truth`; ties in
// rank_score keep cohort order.
std::vector<RiskQuery> build_risk_queries(const fusion::RiskAssignments& assignments,
                                          std::span<const data::RiskLabel> truth,
                                          QueryOrder order = QueryOrder::LevelOriented);

// Per-class F1 = 2TP / (2TP + FP + FN), 0 when the denominator is 0.
std::array<double, 3> per_class_f1(std::span<const data::RiskLabel> predicted,
                                   std::span<const data::RiskLabel> truth);
double macro_f1(std::span<const data::RiskLabel> predicted, std::span<const data::RiskLabel> truth);
double accuracy(std::span<const data::RiskLabel> predicted, std::span<const data::RiskLabel> truth);

// Mann-Whitney statistic with midranks; ties count 1/2.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

// Pearson coefficients keyed "a~b" over fl_score, churn_propensity,
// emotion_binary and D.
std::map<std::string, double> correlation_report(const fusion::RiskAssignments& assignments);

struct MetricReport {
  std::string strategy;
  double map = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  double auc = 0.0;
  std::array<double, 3> per_class_f1{};
  std::array<std::size_t, 3> risk_histogram{};
  std::map<std::string, double> correlations;
};

// `truth` is the ground-truth risk tier per assignment, `churned` the
// observed outcome used for the AUC. Correlations are skipped (left empty)
// for strategies without FL/emotion columns.
MetricReport evaluate(std::string strategy, const fusion::RiskAssignments& assignments,
                      std::span<const data::RiskLabel> truth, std::span<const int> churned,
                      QueryOrder order = QueryOrder::LevelOriented);

// "key = value" lines.
std::string format_report(const MetricReport& report);

}  // namespace churnfuse::metrics
