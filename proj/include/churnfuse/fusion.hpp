#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "churnfuse/audio_features.hpp"
#include "churnfuse/churn_model.hpp"
#include "churnfuse/data_model.hpp"
#include "churnfuse/fl_model.hpp"
#include "churnfuse/ser_model.hpp"

namespace churnfuse::fusion {

struct IndicatorWeights {
  int churn = 2;      // w_C
  int literacy = 1;   // w_F
  int emotion = 1;    // w_V
  bool operator==(const IndicatorWeights&) const = default;
};

struct TranslationConfig {
  double fl_threshold = 0.5;     // F fires when fl_score < threshold
  double churn_threshold = 0.5;  // C stays 0 when propensity <= threshold
  IndicatorWeights weights;
};

// Thresholds in (0,1); w_C > 0 and w_C >= w_F == w_V >= 0.
void validate(const TranslationConfig& cfg);

struct IndicatorTriple {
  int c = 0;
  int f = 0;
  int v = 0;
  int sum() const { return c + f + v; }
  bool operator==(const IndicatorTriple&) const = default;
};

struct FusionDecision {
  int d = 0;
  data::RiskLabel risk = data::RiskLabel::Low;
  std::optional<IndicatorTriple> triple;  // absent for the churn-only strategy
  double rank_score = 0.0;
};

IndicatorTriple translate(const data::ModalityScores& scores, const TranslationConfig& cfg);

// The three condition blocks, evaluated on which indicators are switched on:
//   low : C off and at most one of F, V on
//   mid : C on alone, or C off with both F and V on
//   high: C on with F or V on
// Exactly one block holds for every valid triple. rank_score = D + p / 10.
FusionDecision decision_fuse(const IndicatorTriple& triple, double churn_propensity = 0.0,
                             const IndicatorWeights& weights = {});

// Indicator values of the three risk blocks, in low/mid/high order.
std::array<int, 3> risk_indicators(const IndicatorTriple& triple, const IndicatorWeights& weights = {});

// Churn-only banding: 4p on the D scale, low up to 2 (where C would stay off),
// mid below 3, high from 3: p <= 0.5 low, p >= 0.75 high. D is reported as 0, 2 or 4.
FusionDecision churn_only_decision(double churn_propensity);

struct RiskAssignment {
  std::string id;
  std::optional<double> fl_score;
  double churn_propensity = 0.0;
  std::optional<int> emotion_binary;
  FusionDecision decision;
};

using RiskAssignments = std::vector<RiskAssignment>;

struct UnimodalModels {
  fl::FLModel fl;
  ser::EmotionModel ser;
  churn::ChurnModel churn;
};

// Which table columns feed which tabular model.
struct ModalityColumns {
  std::vector<std::size_t> financial;  // FL model inputs
  std::vector<std::size_t> crm;        // churn model inputs

  static ModalityColumns from_schema(const data::SchemaSpec& schema);
};

// Feature maps aligned with table rows; nullptr marks a customer without audio.
using FeatureMapRefs = std::span<const audio::FeatureMap* const>;

// Churn-only scoring ("None").
RiskAssignments run_none(const data::CustomerTable& table, const churn::ChurnModel& churn_model,
                         const ModalityColumns& cols);

// Each modality scores its own source; no cross-modal features.
RiskAssignments run_late_fusion(const data::CustomerTable& table, FeatureMapRefs maps, const UnimodalModels& models,
                                const ModalityColumns& cols, const TranslationConfig& cfg);

// `models.churn` must have been trained on crm features + [fl_score, emotion_binary]
// (see augmented_churn_inputs); the decision stage is the same as late fusion.
RiskAssignments run_hybrid_fusion(const data::CustomerTable& table, FeatureMapRefs maps, const UnimodalModels& models,
                                  const ModalityColumns& cols, const TranslationConfig& cfg);

// Crm features of every row with the FL score and emotion binary appended.
Matrix augmented_churn_inputs(const data::CustomerTable& table, FeatureMapRefs maps, const fl::FLModel& fl_model,
                              const ser::EmotionModel& ser_model, const ModalityColumns& cols);

// id,fl_score,churn_propensity,emotion_binary,C,F,V,D,risk,rank_score
// (empty cells where a strategy has no such value).
std::string write_assignments(const RiskAssignments& assignments);

}  // namespace churnfuse::fusion
