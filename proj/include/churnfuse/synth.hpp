#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "churnfuse/audio_features.hpp"
#include "churnfuse/data_model.hpp"

namespace churnfuse::synth {

struct SynthConfig {
  std::size_t n_customers = 2000;
  std::size_t n_features = 20;
  double labeled_fl_fraction = 0.2;
  double churn_base_rate = 0.3;
  double coupling = 0.9;
  std::uint64_t seed = 1;
  double clip_seconds = 1.0;
  double sample_rate = 16000.0;
};

void validate(const SynthConfig& cfg);

struct GroundTruth {
  data::RiskLabel tier = data::RiskLabel::Low;
  double true_fl = 0.0;
  data::Emotion emotion = data::Emotion::Neutral;
};

struct SyntheticCohort {
  data::CustomerTable table;
  std::map<std::string, audio::AudioClip> audio_clips;  // keyed by audio_ref
  std::vector<GroundTruth> ground_truth;                // aligned with table rows
};

// Feature column counts for a given width: "fin_*" first, then "crm_*".
std::size_t financial_feature_count(std::size_t n_features);
data::SchemaSpec make_schema(std::size_t n_features);

// One latent tier (low/mid/high) per customer drives financial literacy, the
// emotion of the call recording and the churn probability; `coupling` scales
// how strongly. Deterministic for a fixed seed.
SyntheticCohort generate_cohort(const SynthConfig& cfg);

// Parametric stand-in for a call recording: positive emotions are sustained
// harmonic tone stacks, negative emotions are sparse noise bursts and clicks.
audio::AudioClip synth_audio(data::Emotion emotion, double duration_s, std::uint64_t seed,
                             double sample_rate = 16000.0);

// On-disk cohort layout:
//   customers.csv       customer table
//   manifest.csv        id,audio_path,emotion
//   ground_truth.csv    id,tier,true_fl,emotion
//   audio/<id>.wav      16-bit PCM mono
void write_cohort(const SyntheticCohort& cohort, const std::filesystem::path& dir);

struct ManifestEntry {
  std::string audio_path;
  data::Emotion emotion = data::Emotion::Neutral;
};

struct LoadedCohort {
  data::CustomerTable table;
  std::map<std::string, ManifestEntry> manifest;  // keyed by customer id
  std::map<std::string, audio::AudioClip> audio_clips;  // keyed by audio_ref
  std::optional<std::vector<GroundTruth>> ground_truth;
};

// Reads customers.csv plus, when present, manifest.csv, the referenced audio
// and ground_truth.csv.
LoadedCohort load_cohort(const std::filesystem::path& dir);

std::string write_manifest(const SyntheticCohort& cohort);
std::string write_ground_truth(const SyntheticCohort& cohort);
std::vector<GroundTruth> parse_ground_truth(std::string_view text, const data::CustomerTable& table);

}  // namespace churnfuse::synth
