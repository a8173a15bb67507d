#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "churnfuse/audio_features.hpp"
#include "churnfuse/churn_model.hpp"
#include "churnfuse/fl_model.hpp"
#include "churnfuse/fusion.hpp"
#include "churnfuse/metrics.hpp"
#include "churnfuse/ser_model.hpp"
#include "churnfuse/synth.hpp"

namespace churnfuse::experiment {

struct RunConfig {
  std::filesystem::path data_dir = "data";
  std::filesystem::path model_dir = "models";
  std::filesystem::path report_dir = "reports";

  std::uint64_t seed = 1;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};

  synth::SynthConfig synth;
  audio::FeatureParams features;
  fl::SmognConfig smogn;
  fl::CoregConfig coreg;
  ser::SerConfig ser;
  churn::ChurnConfig churn;
  fusion::TranslationConfig translation;

  double test_fraction = 0.3;
  metrics::QueryOrder query_order = metrics::QueryOrder::LevelOriented;
};

void validate(const RunConfig& cfg);

// Flat "key = value" text; '#' starts a comment. Unknown keys are rejected.
// Keys not present keep their current value in `base`. The result is validated.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});
std::string format_run_config(const RunConfig& cfg);

// Sets every component seed from one top-level seed.
void apply_seed(RunConfig& cfg, std::uint64_t seed);

struct Split {
  std::vector<std::size_t> train;  // ascending row indices
  std::vector<std::size_t> test;
};

// round(n * test_fraction) rows (at least 1, at most n - 1) go to test.
Split split_rows(std::size_t n, double test_fraction, std::uint64_t seed);
std::uint64_t split_seed(std::uint64_t seed);

// A cohort with everything the models need, rows aligned throughout.
struct PreparedCohort {
  data::CustomerTable table;
  std::vector<audio::FeatureMap> maps;
  std::vector<int> emotion_binary;            // labels for the emotion model
  std::vector<data::RiskLabel> tier;          // empty when no ground truth
  std::vector<double> true_fl;                // empty when no ground truth

  PreparedCohort subset(const std::vector<std::size_t>& rows) const;
  std::vector<const audio::FeatureMap*> map_refs() const;
  std::vector<int> churn_outcomes() const;
};

PreparedCohort prepare(const synth::SyntheticCohort& cohort, const audio::FeatureParams& params);
// Needs manifest.csv (MissingModality otherwise); ground truth is optional.
PreparedCohort prepare(const synth::LoadedCohort& cohort, const audio::FeatureParams& params);

fl::FLModel train_fl_model(const PreparedCohort& train, const RunConfig& cfg);
ser::EmotionModel train_ser_model(const PreparedCohort& train, const RunConfig& cfg);
churn::ChurnModel train_churn_model(const PreparedCohort& train, const RunConfig& cfg);
// Stage one of hybrid fusion: retrain on crm features + FL score + emotion
// binary, keeping two more features through RFE.
churn::ChurnModel train_hybrid_churn_model(const PreparedCohort& train, const fl::FLModel& fl_model,
                                           const ser::EmotionModel& ser_model, const RunConfig& cfg);

// Labeled-only k-NN (k1, p1) on the financial columns: the reference the
// co-trained model is compared against.
fl::KnnRegressor train_fl_baseline(const PreparedCohort& train, const RunConfig& cfg);

struct SeedResult {
  std::uint64_t seed = 0;
  metrics::MetricReport none;
  metrics::MetricReport late;
  metrics::MetricReport hybrid;
  double fl_rmse_coreg = 0.0;     // held-out RMSE against true FL
  double fl_rmse_baseline = 0.0;
  double seconds = 0.0;
};

// Generate, featurize, split, train, and evaluate all three strategies.
SeedResult run_seed(const RunConfig& cfg, std::uint64_t seed);

struct StrategySummary {
  std::string strategy;
  double map_mean = 0, map_std = 0;
  double f1_mean = 0, f1_std = 0;
  double acc_mean = 0, acc_std = 0;
  double auc_mean = 0, auc_std = 0;
};

std::vector<StrategySummary> summarize(const std::vector<SeedResult>& results);
// Metrics (x100) as mean ± sample std, one row per strategy.
std::string format_comparison(const std::vector<StrategySummary>& rows);

double rmse(std::span<const double> predicted, std::span<const double> truth);

}  // namespace churnfuse::experiment
