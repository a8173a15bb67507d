#include "churnfuse/fusion.hpp"

#include <cmath>

#include "churnfuse/error.hpp"

namespace churnfuse::fusion {

using data::RiskLabel;

void validate(const TranslationConfig& cfg) {
  if (!(cfg.fl_threshold > 0.0 && cfg.fl_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "fl_threshold must lie in (0, 1)");
  }
  if (!(cfg.churn_threshold > 0.0 && cfg.churn_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "churn_threshold must lie in (0, 1)");
  }
  const auto& w = cfg.weights;
  if (w.literacy != w.emotion || w.literacy < 0 || w.churn <= 0 || w.churn < w.literacy) {
    throw Error(ErrorCode::InvalidConfig, "weights must satisfy w_C > 0 and w_C >= w_F == w_V >= 0");
  }
}

IndicatorTriple translate(const data::ModalityScores& scores, const TranslationConfig& cfg) {
  IndicatorTriple t;
  t.f = scores.fl_score < cfg.fl_threshold ? cfg.weights.literacy : 0;
  t.c = scores.churn_propensity <= cfg.churn_threshold ? 0 : cfg.weights.churn;
  t.v = data::map_emotion_to_binary(scores.emotion.label) == 1 ? cfg.weights.emotion : 0;
  return t;
}

namespace {

struct Switches {
  bool c, f, v;
};

Switches switches(const IndicatorTriple& t, const IndicatorWeights& w) {
  auto on = [](int value, int weight, char name) {
    if (value == weight && weight != 0) return true;
    if (value == 0) return false;
    throw Error(ErrorCode::InvalidTriple,
                std::string("indicator ") + name + "=" + std::to_string(value) + " is neither 0 nor its weight");
  };
  return {on(t.c, w.churn, 'C'), on(t.f, w.literacy, 'F'), on(t.v, w.emotion, 'V')};
}

}  // namespace

std::array<int, 3> risk_indicators(const IndicatorTriple& triple, const IndicatorWeights& weights) {
  const auto [c, f, v] = switches(triple, weights);
  const int low = (!c && !f && !v) || (!c && f && !v) || (!c && !f && v);
  const int mid = (c && !f && !v) || (!c && f && v);
  const int high = (c && f && v) || (c && f && !v) || (c && !f && v);
  return {low, mid, high};
}

FusionDecision decision_fuse(const IndicatorTriple& triple, double churn_propensity,
                             const IndicatorWeights& weights) {
  const auto ind = risk_indicators(triple, weights);
  if (ind[0] + ind[1] + ind[2] != 1) throw Error(ErrorCode::InvalidTriple, "risk blocks do not partition");
  FusionDecision d;
  d.d = triple.sum();
  d.risk = ind[0] ? RiskLabel::Low : ind[1] ? RiskLabel::Mid : RiskLabel::High;
  d.triple = triple;
  d.rank_score = d.d + churn_propensity / 10.0;
  return d;
}

FusionDecision churn_only_decision(double churn_propensity) {
  if (!(churn_propensity >= 0.0 && churn_propensity <= 1.0)) {
    throw Error(ErrorCode::ValueError, "churn propensity must lie in [0, 1]");
  }
  const double scaled = 4.0 * churn_propensity;
  FusionDecision d;
  if (scaled <= 2.0) {
    d.d = 0;
    d.risk = RiskLabel::Low;
  } else if (scaled < 3.0) {
    d.d = 2;
    d.risk = RiskLabel::Mid;
  } else {
    d.d = 4;
    d.risk = RiskLabel::High;
  }
  d.rank_score = d.d + churn_propensity / 10.0;
  return d;
}

ModalityColumns ModalityColumns::from_schema(const data::SchemaSpec& schema) {
  ModalityColumns cols;
  cols.financial = schema.columns_with_prefix(data::SchemaSpec::kFinancialPrefix);
  cols.crm = schema.columns_with_prefix(data::SchemaSpec::kCrmPrefix);
  if (cols.financial.empty() || cols.crm.empty()) {
    throw Error(ErrorCode::SchemaMismatch, "schema needs both fin_* and crm_* feature columns");
  }
  return cols;
}

namespace {

void require_maps(const data::CustomerTable& table, FeatureMapRefs maps) {
  if (maps.size() != table.size()) {
    throw Error(ErrorCode::MissingModality, "expected one feature map per customer");
  }
  for (std::size_t i = 0; i < maps.size(); ++i) {
    if (maps[i] == nullptr) throw Error(ErrorCode::MissingModality, "customer " + table[i].id + " has no audio");
  }
}

void require_width(const churn::ChurnModel& model, std::size_t width, const char* what) {
  if (model.input_width != width) {
    throw Error(ErrorCode::SchemaMismatch, std::string(what) + ": churn model expects " +
                                               std::to_string(model.input_width) + " inputs, cohort provides " +
                                               std::to_string(width));
  }
}

RiskAssignment fuse(const std::string& id, const data::ModalityScores& scores, const TranslationConfig& cfg) {
  data::validate(scores);
  RiskAssignment a;
  a.id = id;
  a.fl_score = scores.fl_score;
  a.churn_propensity = scores.churn_propensity;
  a.emotion_binary = scores.emotion.binary;
  a.decision = decision_fuse(translate(scores, cfg), scores.churn_propensity, cfg.weights);
  return a;
}

}  // namespace

RiskAssignments run_none(const data::CustomerTable& table, const churn::ChurnModel& churn_model,
                         const ModalityColumns& cols) {
  require_width(churn_model, cols.crm.size(), "none");
  RiskAssignments out;
  out.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    RiskAssignment a;
    a.id = table[i].id;
    a.churn_propensity = churn::predict_churn(churn_model, table.project(i, cols.crm));
    a.decision = churn_only_decision(a.churn_propensity);
    out.push_back(std::move(a));
  }
  return out;
}

RiskAssignments run_late_fusion(const data::CustomerTable& table, FeatureMapRefs maps, const UnimodalModels& models,
                                const ModalityColumns& cols, const TranslationConfig& cfg) {
  validate(cfg);
  require_maps(table, maps);
  require_width(models.churn, cols.crm.size(), "late fusion");
  RiskAssignments out;
  out.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    data::ModalityScores s;
    s.fl_score = fl::predict_fl(models.fl, table.project(i, cols.financial));
    s.churn_propensity = churn::predict_churn(models.churn, table.project(i, cols.crm));
    s.emotion = ser::predict_emotion(models.ser, *maps[i]);
    out.push_back(fuse(table[i].id, s, cfg));
  }
  return out;
}

Matrix augmented_churn_inputs(const data::CustomerTable& table, FeatureMapRefs maps, const fl::FLModel& fl_model,
                              const ser::EmotionModel& ser_model, const ModalityColumns& cols) {
  require_maps(table, maps);
  Matrix x;
  x.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto row = table.project(i, cols.crm);
    row.push_back(fl::predict_fl(fl_model, table.project(i, cols.financial)));
    row.push_back(ser::predict_emotion(ser_model, *maps[i]).binary);
    x.push_back(std::move(row));
  }
  return x;
}

RiskAssignments run_hybrid_fusion(const data::CustomerTable& table, FeatureMapRefs maps, const UnimodalModels& models,
                                  const ModalityColumns& cols, const TranslationConfig& cfg) {
  validate(cfg);
  require_maps(table, maps);
  require_width(models.churn, cols.crm.size() + 2, "hybrid fusion");
  RiskAssignments out;
  out.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    data::ModalityScores s;
    s.fl_score = fl::predict_fl(models.fl, table.project(i, cols.financial));
    s.emotion = ser::predict_emotion(models.ser, *maps[i]);
    auto row = table.project(i, cols.crm);
    row.push_back(s.fl_score);
    row.push_back(s.emotion.binary);
    s.churn_propensity = churn::predict_churn(models.churn, row);
    out.push_back(fuse(table[i].id, s, cfg));
  }
  return out;
}

std::string write_assignments(const RiskAssignments& assignments) {
  std::string out = "id,fl_score,churn_propensity,emotion_binary,C,F,V,D,risk,rank_score\n";
  for (const auto& a : assignments) {
    out += a.id;
    out += ',';
    if (a.fl_score) out += data::format_double(*a.fl_score);
    out += ',';
    out += data::format_double(a.churn_propensity);
    out += ',';
    if (a.emotion_binary) out += std::to_string(*a.emotion_binary);
    for (auto member : {&IndicatorTriple::c, &IndicatorTriple::f, &IndicatorTriple::v}) {
      out += ',';
      if (a.decision.triple) out += std::to_string((*a.decision.triple).*member);
    }
    out += ',';
    out += std::to_string(a.decision.d);
    out += ',';
    out += data::risk_label_name(a.decision.risk);
    out += ',';
    out += data::format_double(a.decision.rank_score);
    out += '\n';
  }
  return out;
}

}  // namespace churnfuse::fusion
