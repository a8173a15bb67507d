#include "churnfuse/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "churnfuse/binary_io.hpp"
#include "churnfuse/error.hpp"
#include "churnfuse/rng.hpp"
#include "churnfuse/wav.hpp"

namespace churnfuse::synth {

namespace {

constexpr std::uint64_t kStreamLoadings = 1;
constexpr std::uint64_t kStreamCustomer = 2;
constexpr std::uint64_t kStreamAudio = 3;
constexpr std::uint64_t kStreamLabels = 4;

// Tier mix and the zero-mean churn offsets per tier; sum(pi * z) == 0 keeps the
// expected churn rate at churn_base_rate for every coupling.
constexpr double kTierProb[3] = {0.5, 0.3, 0.2};
constexpr double kChurnOffset[3] = {-0.6, -0.1, 1.65};

// Per-tier shift of P(negative emotion) at full coupling.
constexpr double kEmotionSlope = 0.45;

// CRM features are deliberately weak on their own: a churn-only model sees
// the tier through heavy noise, the other modalities carry the rest.
constexpr double kLatentNoise = 0.5;
constexpr double kCrmNoise = 3.5;
constexpr double kFinNoise = 1.0;
constexpr double kFlNoise = 0.1;

std::string customer_id(std::size_t i, std::size_t n) {
  std::string digits = std::to_string(i);
  const std::size_t width = std::max<std::size_t>(5, std::to_string(n - 1).size());
  return "c" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

data::RiskLabel draw_tier(Rng& rng) {
  const double u = uniform01(rng);
  if (u < kTierProb[0]) return data::RiskLabel::Low;
  if (u < kTierProb[0] + kTierProb[1]) return data::RiskLabel::Mid;
  return data::RiskLabel::High;
}

void add_tone_stack(std::vector<double>& out, double sr, double f0, std::size_t harmonics,
                    double amp, double vibrato_hz, double vibrato_depth, double phase0) {
  double phase = phase0;
  for (std::size_t n = 0; n < out.size(); ++n) {
    const double t = static_cast<double>(n) / sr;
    const double f = f0 * (1.0 + vibrato_depth * std::sin(2.0 * std::numbers::pi * vibrato_hz * t));
    phase += 2.0 * std::numbers::pi * f / sr;
    double s = 0.0;
    for (std::size_t h = 1; h <= harmonics; ++h) {
      if (f0 * static_cast<double>(h) >= sr / 2.0) break;
      s += std::sin(static_cast<double>(h) * phase) / static_cast<double>(h);
    }
    out[n] += amp * s;
  }
}

void add_bursts(std::vector<double>& out, Rng& rng, double sr, double interval_lo,
                double interval_hi, double burst_s, double decay_s, double amp, double smoothing,
                bool click) {
  double t = uniform01(rng) * interval_lo;
  const auto burst_len = static_cast<std::size_t>(burst_s * sr);
  while (true) {
    const auto start = static_cast<std::size_t>(t * sr);
    if (start >= out.size()) break;
    double lp = 0.0;
    for (std::size_t k = 0; k < burst_len && start + k < out.size(); ++k) {
      const double env = std::exp(-static_cast<double>(k) / (decay_s * sr));
      lp = smoothing * lp + (1.0 - smoothing) * standard_normal(rng);
      out[start + k] += amp * env * lp;
    }
    if (click) out[start] += amp;
    t += interval_lo + (interval_hi - interval_lo) * uniform01(rng);
  }
}

}  // namespace

void validate(const SynthConfig& c) {
  if (c.n_customers < 1) throw Error(ErrorCode::InvalidConfig, "n_customers must be positive");
  if (c.n_features < 2) {
    throw Error(ErrorCode::InvalidConfig, "n_features must be >= 2 (financial + CRM columns)");
  }
  if (!(c.labeled_fl_fraction > 0.0 && c.labeled_fl_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "labeled_fl_fraction must be in (0,1]");
  }
  if (!(c.churn_base_rate > 0.0 && c.churn_base_rate < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "churn_base_rate must be in (0,1)");
  }
  if (!(c.coupling >= 0.0 && c.coupling <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "coupling must be in [0,1]");
  }
  if (!(c.clip_seconds >= 0.5 && c.clip_seconds <= 10.0)) {
    throw Error(ErrorCode::InvalidConfig, "clip_seconds must be in [0.5,10]");
  }
  if (!(c.sample_rate >= 8000.0)) throw Error(ErrorCode::InvalidConfig, "sample_rate too low");
}

std::size_t financial_feature_count(std::size_t n_features) { return n_features * 2 / 5; }

data::SchemaSpec make_schema(std::size_t n_features) {
  data::SchemaSpec schema;
  const std::size_t n_fin = std::max<std::size_t>(1, financial_feature_count(n_features));
  for (std::size_t j = 0; j < n_features; ++j) {
    schema.feature_columns.push_back(j < n_fin ? "fin_" + std::to_string(j)
                                               : "crm_" + std::to_string(j - n_fin));
  }
  return schema;
}

audio::AudioClip synth_audio(data::Emotion emotion, double duration_s, std::uint64_t seed,
                             double sample_rate) {
  if (!(duration_s >= 0.5 && duration_s <= 10.0)) {
    throw Error(ErrorCode::InvalidDuration, "duration must be in [0.5, 10] seconds");
  }
  Rng rng(seed);
  const auto n = static_cast<std::size_t>(std::lround(duration_s * sample_rate));
  std::vector<double> x(n, 0.0);

  switch (emotion) {
    case data::Emotion::Happiness: {
      const double f0 = 180.0 + 100.0 * uniform01(rng);
      add_tone_stack(x, sample_rate, f0, 6, 0.3, 4.0 + 2.0 * uniform01(rng), 0.01,
                     2.0 * std::numbers::pi * uniform01(rng));
      break;
    }
    case data::Emotion::Neutral: {
      const double f0 = 100.0 + 60.0 * uniform01(rng);
      add_tone_stack(x, sample_rate, f0, 8, 0.25, 0.0, 0.0, 2.0 * std::numbers::pi * uniform01(rng));
      break;
    }
    case data::Emotion::Sadness:
      add_bursts(x, rng, sample_rate, 0.35, 0.5, 0.025, 0.008, 0.6, 0.6, false);
      break;
    case data::Emotion::Anger:
      add_bursts(x, rng, sample_rate, 0.25, 0.32, 0.01, 0.003, 0.8, 0.0, true);
      break;
  }

  // Fade in/out over 10 ms, then a faint noise floor.
  const auto fade = std::min(n / 2, static_cast<std::size_t>(0.01 * sample_rate));
  for (std::size_t k = 0; k < fade; ++k) {
    const double g = static_cast<double>(k) / static_cast<double>(fade);
    x[k] *= g;
    x[n - 1 - k] *= g;
  }
  audio::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double v = x[k] + 0.002 * standard_normal(rng);
    clip.samples[k] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  audio::quantize_pcm16(clip);
  return clip;
}

SyntheticCohort generate_cohort(const SynthConfig& cfg) {
  validate(cfg);
  const data::SchemaSpec schema = make_schema(cfg.n_features);
  const std::size_t n_fin = schema.columns_with_prefix(data::SchemaSpec::kFinancialPrefix).size();
  const std::size_t n_crm = cfg.n_features - n_fin;
  const double c = cfg.coupling;
  const double base = cfg.churn_base_rate;
  // Keeps every tier probability inside (0, 1).
  const double spread = std::min(base, (1.0 - base) / kChurnOffset[2]);

  // Per-column loadings: magnitude in [0.5, 1], random sign.
  Rng loadings_rng(derive_seed(cfg.seed, kStreamLoadings));
  auto loading = [&] {
    const double mag = 0.5 + 0.5 * uniform01(loadings_rng);
    return uniform01(loadings_rng) < 0.5 ? -mag : mag;
  };
  std::vector<double> fin_load(n_fin), crm_load(n_crm);
  for (double& a : fin_load) a = loading();
  for (double& b : crm_load) b = loading();

  // Exactly round(fraction * n) rows keep their FL label, chosen uniformly.
  const auto n_labeled = static_cast<std::size_t>(
      std::lround(cfg.labeled_fl_fraction * static_cast<double>(cfg.n_customers)));
  std::vector<std::size_t> order(cfg.n_customers);
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng label_rng(derive_seed(cfg.seed, kStreamLabels));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[uniform_index(label_rng, i)]);
  }
  std::vector<bool> labeled(cfg.n_customers, false);
  for (std::size_t i = 0; i < std::min(n_labeled, order.size()); ++i) labeled[order[i]] = true;

  std::vector<data::CustomerRecord> rows;
  rows.reserve(cfg.n_customers);
  std::map<std::string, audio::AudioClip> clips;
  std::vector<GroundTruth> truth;
  truth.reserve(cfg.n_customers);

  for (std::size_t i = 0; i < cfg.n_customers; ++i) {
    Rng rng(derive_seed(cfg.seed, kStreamCustomer, i));
    GroundTruth gt;
    gt.tier = draw_tier(rng);
    const int t = static_cast<int>(gt.tier);
    const double latent = static_cast<double>(t) + kLatentNoise * standard_normal(rng);

    gt.true_fl = std::clamp(0.5 + c * 0.2 * static_cast<double>(1 - t) + kFlNoise * standard_normal(rng),
                            0.0, 1.0);

    const double p_negative = 0.5 + c * kEmotionSlope * static_cast<double>(t - 1);
    const bool negative = uniform01(rng) < p_negative;
    const bool second = uniform01(rng) < 0.5;
    gt.emotion = negative ? (second ? data::Emotion::Anger : data::Emotion::Sadness)
                          : (second ? data::Emotion::Neutral : data::Emotion::Happiness);

    const double p_churn = base + c * spread * kChurnOffset[t];
    const int churned = uniform01(rng) < p_churn ? 1 : 0;

    data::CustomerRecord r;
    r.id = customer_id(i, cfg.n_customers);
    r.features.reserve(cfg.n_features);
    for (std::size_t j = 0; j < n_fin; ++j) {
      r.features.push_back(fin_load[j] * 4.0 * (gt.true_fl - 0.5) + kFinNoise * standard_normal(rng));
    }
    for (std::size_t j = 0; j < n_crm; ++j) {
      r.features.push_back(crm_load[j] * (latent - 1.0) + kCrmNoise * standard_normal(rng));
    }
    if (labeled[i]) r.fl_label = gt.true_fl;
    r.churn_outcome = churned;
    r.audio_ref = "audio/" + r.id + ".wav";
    clips.emplace(*r.audio_ref, synth_audio(gt.emotion, cfg.clip_seconds,
                                            derive_seed(cfg.seed, kStreamAudio, i), cfg.sample_rate));
    rows.push_back(std::move(r));
    truth.push_back(gt);
  }
  return SyntheticCohort{data::CustomerTable(schema, std::move(rows)), std::move(clips),
                         std::move(truth)};
}

std::string write_manifest(const SyntheticCohort& cohort) {
  std::string out = "id,audio_path,emotion\n";
  for (std::size_t i = 0; i < cohort.table.size(); ++i) {
    const auto& r = cohort.table[i];
    if (!r.audio_ref) continue;
    out += r.id + "," + *r.audio_ref + "," +
           std::string(data::emotion_name(cohort.ground_truth[i].emotion)) + "\n";
  }
  return out;
}

std::string write_ground_truth(const SyntheticCohort& cohort) {
  std::string out = "id,tier,true_fl,emotion\n";
  for (std::size_t i = 0; i < cohort.table.size(); ++i) {
    const auto& gt = cohort.ground_truth[i];
    out += cohort.table[i].id + "," + std::string(data::risk_label_name(gt.tier)) + "," +
           data::format_double(gt.true_fl) + "," + std::string(data::emotion_name(gt.emotion)) +
           "\n";
  }
  return out;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_bytes(path.string(), std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                            text.size()));
}

std::string read_text(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path.string());
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

void write_cohort(const SyntheticCohort& cohort, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "audio", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + (dir / "audio").string() + ": " + ec.message());
  write_text(dir / "customers.csv", data::write_customer_table(cohort.table));
  write_text(dir / "manifest.csv", write_manifest(cohort));
  write_text(dir / "ground_truth.csv", write_ground_truth(cohort));
  for (const auto& [ref, clip] : cohort.audio_clips) {
    write_file_bytes((dir / ref).string(), audio::encode_wav_pcm16(clip));
  }
}

std::vector<GroundTruth> parse_ground_truth(std::string_view text, const data::CustomerTable& table) {
  const auto lines = data::split_lines(text);
  if (lines.empty() || lines[0] != "id,tier,true_fl,emotion") {
    throw Error(ErrorCode::SchemaMismatch, "ground truth header must be id,tier,true_fl,emotion");
  }
  std::vector<GroundTruth> truth(table.size());
  std::vector<bool> seen(table.size(), false);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = data::split_fields(lines[i]);
    if (f.size() != 4) throw Error(ErrorCode::ValueError, "ground truth line " + std::to_string(i + 1));
    const auto row = table.find(std::string(f[0]));
    if (!row) throw Error(ErrorCode::SchemaMismatch, "ground truth id not in table: " + std::string(f[0]));
    const auto fl = data::parse_double(f[2]);
    if (!fl) throw Error(ErrorCode::ValueError, "bad true_fl on line " + std::to_string(i + 1));
    truth[*row] = GroundTruth{data::parse_risk_label(f[1]), *fl, data::parse_emotion(f[3])};
    seen[*row] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw Error(ErrorCode::SchemaMismatch, "ground truth does not cover every customer");
  }
  return truth;
}

LoadedCohort load_cohort(const std::filesystem::path& dir) {
  const auto customers = dir / "customers.csv";
  if (!std::filesystem::exists(customers)) {
    throw Error(ErrorCode::IoError, "no customers.csv in " + dir.string());
  }
  const std::string text = read_text(customers);
  const auto header_end = text.find('\n');
  std::string_view header(text.data(), header_end == std::string::npos ? text.size() : header_end);
  if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
  const auto schema = data::SchemaSpec::from_header(header);

  LoadedCohort out{data::parse_customer_table(text, schema), {}, {}, std::nullopt};

  const auto manifest_path = dir / "manifest.csv";
  if (std::filesystem::exists(manifest_path)) {
    const std::string manifest = read_text(manifest_path);
    const auto lines = data::split_lines(manifest);
    if (lines.empty() || lines[0] != "id,audio_path,emotion") {
      throw Error(ErrorCode::SchemaMismatch, "manifest header must be id,audio_path,emotion");
    }
    for (std::size_t i = 1; i < lines.size(); ++i) {
      if (lines[i].empty()) continue;
      const auto f = data::split_fields(lines[i]);
      if (f.size() != 3) throw Error(ErrorCode::ValueError, "manifest line " + std::to_string(i + 1));
      ManifestEntry entry{std::string(f[1]), data::parse_emotion(f[2])};
      if (!out.audio_clips.contains(entry.audio_path)) {
        out.audio_clips.emplace(entry.audio_path,
                                audio::decode_wav_pcm16(read_file_bytes((dir / entry.audio_path).string())));
      }
      out.manifest.emplace(std::string(f[0]), std::move(entry));
    }
  }

  const auto truth_path = dir / "ground_truth.csv";
  if (std::filesystem::exists(truth_path)) {
    out.ground_truth = parse_ground_truth(read_text(truth_path), out.table);
  }
  return out;
}

}  // namespace churnfuse::synth
