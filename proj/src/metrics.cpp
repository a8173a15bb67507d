#include "churnfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "churnfuse/error.hpp"
#include "churnfuse/numeric.hpp"

namespace churnfuse::metrics {

using data::RiskLabel;

double average_precision(std::span<const int> ranked_relevance, std::size_t m) {
  if (m == 0) throw Error(ErrorCode::NoRelevant, "average precision needs at least one relevant item");
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < ranked_relevance.size(); ++k) {
    const int rel = ranked_relevance[k];
    if (rel != 0 && rel != 1) throw Error(ErrorCode::ValueError, "relevance must be 0 or 1");
    if (rel == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  if (hits > m) throw Error(ErrorCode::ValueError, "more relevant items ranked than m");
  return sum / static_cast<double>(m);
}

double average_precision(const RiskQuery& query) {
  const std::unordered_set<std::string> relevant(query.relevant_ids.begin(), query.relevant_ids.end());
  std::vector<int> rel;
  rel.reserve(query.ranked_ids.size());
  for (const auto& id : query.ranked_ids) rel.push_back(relevant.count(id) ? 1 : 0);
  return average_precision(rel, relevant.size());
}

double mean_average_precision(std::span<const RiskQuery> queries) {
  if (queries.empty()) throw Error(ErrorCode::EmptyQuerySet, "MAP needs at least one query");
  double sum = 0.0;
  for (const auto& q : queries) sum += average_precision(q);
  return sum / static_cast<double>(queries.size());
}

std::vector<RiskQuery> build_risk_queries(const fusion::RiskAssignments& assignments,
                                          std::span<const RiskLabel> truth, QueryOrder order) {
  if (assignments.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "one truth label per assignment");
  constexpr double kMidCentre = 2.05;
  std::vector<RiskQuery> queries;
  for (RiskLabel level : {RiskLabel::Low, RiskLabel::Mid, RiskLabel::High}) {
    RiskQuery q;
    q.level = level;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] == level) q.relevant_ids.push_back(assignments[i].id);
    }
    if (q.relevant_ids.empty()) continue;

    std::vector<double> key(assignments.size());
    for (std::size_t i = 0; i < assignments.size(); ++i) {
      const double s = assignments[i].decision.rank_score;
      if (order == QueryOrder::Descending || level == RiskLabel::High) {
        key[i] = -s;
      } else if (level == RiskLabel::Low) {
        key[i] = s;
      } else {
        key[i] = std::abs(s - kMidCentre);
      }
    }
    std::vector<std::size_t> idx(assignments.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] < key[b]; });
    for (std::size_t i : idx) q.ranked_ids.push_back(assignments[i].id);
    queries.push_back(std::move(q));
  }
  return queries;
}

std::array<double, 3> per_class_f1(std::span<const RiskLabel> predicted, std::span<const RiskLabel> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "predicted and truth differ in length");
  if (predicted.empty()) throw Error(ErrorCode::LengthMismatch, "macro-F1 needs at least one label");
  std::array<std::size_t, 3> tp{}, fp{}, fn{};
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto p = static_cast<std::size_t>(predicted[i]);
    const auto t = static_cast<std::size_t>(truth[i]);
    if (p == t) {
      ++tp[p];
    } else {
      ++fp[p];
      ++fn[t];
    }
  }
  std::array<double, 3> f1{};
  for (std::size_t c = 0; c < 3; ++c) {
    const std::size_t denom = 2 * tp[c] + fp[c] + fn[c];
    f1[c] = denom == 0 ? 0.0 : static_cast<double>(2 * tp[c]) / static_cast<double>(denom);
  }
  return f1;
}

double macro_f1(std::span<const RiskLabel> predicted, std::span<const RiskLabel> truth) {
  const auto f1 = per_class_f1(predicted, truth);
  return (f1[0] + f1[1] + f1[2]) / 3.0;
}

double accuracy(std::span<const RiskLabel> predicted, std::span<const RiskLabel> truth) {
  if (predicted.size() != truth.size() || predicted.empty()) {
    throw Error(ErrorCode::LengthMismatch, "accuracy needs equal-length non-empty inputs");
  }
  std::size_t hit = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hit += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(predicted.size());
}

double roc_auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "scores and labels differ in length");
  const std::size_t n = scores.size();
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[idx[j + 1]] == scores[idx[i]]) ++j;
    const double mid = (static_cast<double>(i + j) + 2.0) / 2.0;  // 1-based midrank
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = mid;
    i = j + 1;
  }
  double pos = 0.0, rank_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != 0 && labels[i] != 1) throw Error(ErrorCode::ValueError, "labels must be 0 or 1");
    if (labels[i] == 1) {
      pos += 1.0;
      rank_sum += rank[i];
    }
  }
  const double neg = static_cast<double>(n) - pos;
  if (pos == 0.0 || neg == 0.0) throw Error(ErrorCode::SingleClass, "AUC needs both classes");
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

std::map<std::string, double> correlation_report(const fusion::RiskAssignments& assignments) {
  if (assignments.size() < 3) throw Error(ErrorCode::DegenerateColumn, "correlations need at least 3 customers");
  std::array<std::vector<double>, 4> cols;
  for (const auto& a : assignments) {
    if (!a.fl_score || !a.emotion_binary) {
      throw Error(ErrorCode::MissingModality, "correlations need FL and emotion scores");
    }
    cols[0].push_back(*a.fl_score);
    cols[1].push_back(a.churn_propensity);
    cols[2].push_back(*a.emotion_binary);
    cols[3].push_back(a.decision.d);
  }
  static const char* names[4] = {"fl_score", "churn_propensity", "emotion_binary", "D"};
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      out[std::string(names[i]) + "~" + names[j]] = pearson(cols[i], cols[j]);
    }
  }
  return out;
}

MetricReport evaluate(std::string strategy, const fusion::RiskAssignments& assignments,
                      std::span<const RiskLabel> truth, std::span<const int> churned, QueryOrder order) {
  if (churned.size() != assignments.size()) throw Error(ErrorCode::LengthMismatch, "one outcome per assignment");
  MetricReport r;
  r.strategy = std::move(strategy);
  std::vector<RiskLabel> predicted;
  std::vector<double> propensity;
  for (const auto& a : assignments) {
    predicted.push_back(a.decision.risk);
    propensity.push_back(a.churn_propensity);
    ++r.risk_histogram[static_cast<std::size_t>(a.decision.risk)];
  }
  const auto queries = build_risk_queries(assignments, truth, order);
  r.map = mean_average_precision(queries);
  r.per_class_f1 = per_class_f1(predicted, truth);
  r.macro_f1 = (r.per_class_f1[0] + r.per_class_f1[1] + r.per_class_f1[2]) / 3.0;
  r.accuracy = accuracy(predicted, truth);
  r.auc = roc_auc(propensity, churned);
  const bool multimodal = !assignments.empty() && assignments.front().fl_score && assignments.front().emotion_binary;
  if (multimodal) r.correlations = correlation_report(assignments);
  return r;
}

std::string format_report(const MetricReport& r) {
  auto line = [](const std::string& k, const std::string& v) { return k + " = " + v + "\n"; };
  std::string out;
  out += line("strategy", r.strategy);
  out += line("map", data::format_double(r.map));
  out += line("macro_f1", data::format_double(r.macro_f1));
  out += line("accuracy", data::format_double(r.accuracy));
  out += line("auc", data::format_double(r.auc));
  for (std::size_t c = 0; c < 3; ++c) {
    const std::string name(data::risk_label_name(static_cast<RiskLabel>(c)));
    out += line("f1_" + name, data::format_double(r.per_class_f1[c]));
  }
  for (std::size_t c = 0; c < 3; ++c) {
    const std::string name(data::risk_label_name(static_cast<RiskLabel>(c)));
    out += line("count_" + name, std::to_string(r.risk_histogram[c]));
  }
  for (const auto& [k, v] : r.correlations) out += line("corr_" + k, data::format_double(v));
  return out;
}

}  // namespace churnfuse::metrics
