#include "churnfuse/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "churnfuse/binary_io.hpp"
#include "churnfuse/error.hpp"
#include "churnfuse/rng.hpp"

namespace churnfuse::experiment {

namespace {

// Seed streams under the top-level seed.
enum Stream : std::uint64_t {
  kSmogn = 51,
  kCoreg = 52,
  kSer = 53,
  kChurn = 54,
  kSplit = 55,
};

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorCode::InvalidConfig, "bad value '" + std::string(value) + "' for " + std::string(key));
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_real(std::string_view key, std::string_view v) {
  const auto d = data::parse_double(v);
  if (!d) bad_value(key, v);
  return *d;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) bad_value(key, v);
  return out;
}

std::vector<std::uint64_t> to_u64_list(std::string_view key, std::string_view v) {
  std::vector<std::uint64_t> out;
  for (auto field : data::split_fields(v, ',')) out.push_back(to_u64(key, trim(field)));
  if (out.empty()) bad_value(key, v);
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v);
}

template <class T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Key size_key(std::string name, T RunConfig::*group, std::size_t T::*field) {
  return {name,
          [=](RunConfig& c, std::string_view v) { (c.*group).*field = to_u64(name, v); },
          [=](const RunConfig& c) { return std::to_string((c.*group).*field); }};
}

template <class T>
Key real_key(std::string name, T RunConfig::*group, double T::*field) {
  return {name,
          [=](RunConfig& c, std::string_view v) { (c.*group).*field = to_real(name, v); },
          [=](const RunConfig& c) { return data::format_double((c.*group).*field); }};
}

Key train_key(std::string name, nn::TrainConfig& (*pick)(RunConfig&), char which) {
  auto get_ref = [pick](const RunConfig& c) -> const nn::TrainConfig& { return pick(const_cast<RunConfig&>(c)); };
  switch (which) {
    case 'r':
      return {name, [=](RunConfig& c, std::string_view v) { pick(c).learning_rate = to_real(name, v); },
              [=](const RunConfig& c) { return data::format_double(get_ref(c).learning_rate); }};
    case 'e':
      return {name, [=](RunConfig& c, std::string_view v) { pick(c).epochs = to_u64(name, v); },
              [=](const RunConfig& c) { return std::to_string(get_ref(c).epochs); }};
    case 'b':
      return {name, [=](RunConfig& c, std::string_view v) { pick(c).batch_size = to_u64(name, v); },
              [=](const RunConfig& c) { return std::to_string(get_ref(c).batch_size); }};
    default:
      return {name, [=](RunConfig& c, std::string_view v) { pick(c).l2_penalty = to_real(name, v); },
              [=](const RunConfig& c) { return data::format_double(get_ref(c).l2_penalty); }};
  }
}

nn::TrainConfig& ser_train(RunConfig& c) { return c.ser.train; }
nn::TrainConfig& churn_train(RunConfig& c) { return c.churn.train; }

Key int_weight_key(std::string name, int fusion::IndicatorWeights::*field) {
  return {name,
          [=](RunConfig& c, std::string_view v) {
            c.translation.weights.*field = static_cast<int>(to_u64(name, v));
          },
          [=](const RunConfig& c) { return std::to_string(c.translation.weights.*field); }};
}

const std::vector<Key>& keys() {
  using RC = RunConfig;
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back({"paths.data", [](RC& c, std::string_view v) { c.data_dir = std::string(v); },
                 [](const RC& c) { return c.data_dir.string(); }});
    k.push_back({"paths.models", [](RC& c, std::string_view v) { c.model_dir = std::string(v); },
                 [](const RC& c) { return c.model_dir.string(); }});
    k.push_back({"paths.reports", [](RC& c, std::string_view v) { c.report_dir = std::string(v); },
                 [](const RC& c) { return c.report_dir.string(); }});
    k.push_back({"seed", [](RC& c, std::string_view v) { c.seed = to_u64("seed", v); },
                 [](const RC& c) { return std::to_string(c.seed); }});
    k.push_back({"seeds", [](RC& c, std::string_view v) { c.seeds = to_u64_list("seeds", v); },
                 [](const RC& c) { return join(c.seeds); }});

    k.push_back(size_key("synth.n_customers", &RC::synth, &synth::SynthConfig::n_customers));
    k.push_back(size_key("synth.n_features", &RC::synth, &synth::SynthConfig::n_features));
    k.push_back(real_key("synth.labeled_fl_fraction", &RC::synth, &synth::SynthConfig::labeled_fl_fraction));
    k.push_back(real_key("synth.churn_base_rate", &RC::synth, &synth::SynthConfig::churn_base_rate));
    k.push_back(real_key("synth.coupling", &RC::synth, &synth::SynthConfig::coupling));
    k.push_back(real_key("synth.clip_seconds", &RC::synth, &synth::SynthConfig::clip_seconds));
    k.push_back(real_key("synth.sample_rate", &RC::synth, &synth::SynthConfig::sample_rate));

    k.push_back(size_key("features.frame_size", &RC::features, &audio::FeatureParams::frame_size));
    k.push_back(size_key("features.hop_size", &RC::features, &audio::FeatureParams::hop_size));
    k.push_back(size_key("features.n_mels", &RC::features, &audio::FeatureParams::n_mels));
    k.push_back(real_key("features.f_min", &RC::features, &audio::FeatureParams::f_min));
    k.push_back(real_key("features.f_max", &RC::features, &audio::FeatureParams::f_max));
    k.push_back(size_key("features.kernel_time", &RC::features, &audio::FeatureParams::kernel_time));
    k.push_back(size_key("features.kernel_freq", &RC::features, &audio::FeatureParams::kernel_freq));
    k.push_back({"features.standardize",
                 [](RC& c, std::string_view v) { c.features.standardize = to_bool("features.standardize", v); },
                 [](const RC& c) { return std::string(c.features.standardize ? "true" : "false"); }});

    k.push_back(real_key("smogn.relevance_threshold", &RC::smogn, &fl::SmognConfig::relevance_threshold));
    k.push_back(size_key("smogn.k", &RC::smogn, &fl::SmognConfig::k_neighbors));
    k.push_back(real_key("smogn.gaussian_perturbation", &RC::smogn, &fl::SmognConfig::gaussian_perturbation));
    k.push_back(real_key("smogn.oversample_ratio", &RC::smogn, &fl::SmognConfig::oversample_ratio));

    k.push_back(size_key("coreg.k1", &RC::coreg, &fl::CoregConfig::k1));
    k.push_back(size_key("coreg.k2", &RC::coreg, &fl::CoregConfig::k2));
    k.push_back(real_key("coreg.p1", &RC::coreg, &fl::CoregConfig::p1));
    k.push_back(real_key("coreg.p2", &RC::coreg, &fl::CoregConfig::p2));
    k.push_back(size_key("coreg.max_iterations", &RC::coreg, &fl::CoregConfig::max_iterations));
    k.push_back(size_key("coreg.pool_size", &RC::coreg, &fl::CoregConfig::pool_size));
    k.push_back(size_key("coreg.batch_per_iter", &RC::coreg, &fl::CoregConfig::batch_per_iter));

    k.push_back(size_key("ser.hidden", &RC::ser, &ser::SerConfig::hidden));
    k.push_back(train_key("ser.learning_rate", ser_train, 'r'));
    k.push_back(train_key("ser.epochs", ser_train, 'e'));
    k.push_back(train_key("ser.batch_size", ser_train, 'b'));
    k.push_back(train_key("ser.l2", ser_train, 'l'));

    k.push_back(size_key("churn.rfe_k", &RC::churn, &churn::ChurnConfig::rfe_k));
    k.push_back(real_key("churn.smote_ratio", &RC::churn, &churn::ChurnConfig::smote_ratio));
    k.push_back(size_key("churn.smote_k", &RC::churn, &churn::ChurnConfig::smote_k));
    k.push_back({"churn.hidden",
                 [](RC& c, std::string_view v) {
                   auto dims = to_u64_list("churn.hidden", v);
                   c.churn.hidden.assign(dims.begin(), dims.end());
                 },
                 [](const RC& c) { return join(c.churn.hidden); }});
    k.push_back(train_key("churn.learning_rate", churn_train, 'r'));
    k.push_back(train_key("churn.epochs", churn_train, 'e'));
    k.push_back(train_key("churn.batch_size", churn_train, 'b'));
    k.push_back(train_key("churn.l2", churn_train, 'l'));

    k.push_back({"fusion.fl_threshold",
                 [](RC& c, std::string_view v) { c.translation.fl_threshold = to_real("fusion.fl_threshold", v); },
                 [](const RC& c) { return data::format_double(c.translation.fl_threshold); }});
    k.push_back({"fusion.churn_threshold",
                 [](RC& c, std::string_view v) {
                   c.translation.churn_threshold = to_real("fusion.churn_threshold", v);
                 },
                 [](const RC& c) { return data::format_double(c.translation.churn_threshold); }});
    k.push_back(int_weight_key("fusion.w_c", &fusion::IndicatorWeights::churn));
    k.push_back(int_weight_key("fusion.w_f", &fusion::IndicatorWeights::literacy));
    k.push_back(int_weight_key("fusion.w_v", &fusion::IndicatorWeights::emotion));

    k.push_back({"eval.test_fraction",
                 [](RC& c, std::string_view v) { c.test_fraction = to_real("eval.test_fraction", v); },
                 [](const RC& c) { return data::format_double(c.test_fraction); }});
    k.push_back({"eval.query_order",
                 [](RC& c, std::string_view v) {
                   if (v == "level") {
                     c.query_order = metrics::QueryOrder::LevelOriented;
                   } else if (v == "descending") {
                     c.query_order = metrics::QueryOrder::Descending;
                   } else {
                     bad_value("eval.query_order", v);
                   }
                 },
                 [](const RC& c) {
                   return std::string(c.query_order == metrics::QueryOrder::LevelOriented ? "level" : "descending");
                 }});
    return k;
  }();
  return table;
}

}  // namespace

void validate(const RunConfig& cfg) {
  synth::validate(cfg.synth);
  audio::validate(cfg.features);
  fl::validate(cfg.smogn);
  fl::validate(cfg.coreg);
  nn::validate(cfg.ser.train);
  nn::validate(cfg.churn.train);
  fusion::validate(cfg.translation);
  if (cfg.ser.hidden == 0) throw Error(ErrorCode::InvalidConfig, "ser.hidden must be positive");
  if (cfg.churn.rfe_k == 0) throw Error(ErrorCode::InvalidConfig, "churn.rfe_k must be positive");
  for (auto h : cfg.churn.hidden) {
    if (h == 0) throw Error(ErrorCode::InvalidConfig, "churn.hidden entries must be positive");
  }
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "eval.test_fraction must lie in (0, 1)");
  }
  if (cfg.seeds.empty()) throw Error(ErrorCode::InvalidConfig, "seeds must not be empty");
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  for (auto raw : data::split_lines(text)) {
    auto line = raw.substr(0, raw.find('#'));
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidConfig, "expected 'key = value', got '" + trim(line) + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const Key& k) { return k.name == key; });
    if (it == table.end()) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    it->set(base, value);
  }
  validate(base);
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  const auto bytes = read_file_bytes(path);
  return parse_run_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                          std::move(base));
}

std::string format_run_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

void apply_seed(RunConfig& cfg, std::uint64_t seed) {
  cfg.seed = seed;
  cfg.synth.seed = seed;
  cfg.smogn.seed = derive_seed(seed, kSmogn);
  cfg.coreg.seed = derive_seed(seed, kCoreg);
  cfg.ser.train.seed = derive_seed(seed, kSer);
  cfg.churn.train.seed = derive_seed(seed, kChurn);
}

std::uint64_t split_seed(std::uint64_t seed) { return derive_seed(seed, kSplit); }

Split split_rows(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (n < 2) throw Error(ErrorCode::TooFewExamples, "need at least two rows to split");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) std::swap(order[i], order[uniform_index(rng, i + 1)]);
  auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
  Split s;
  s.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

PreparedCohort PreparedCohort::subset(const std::vector<std::size_t>& rows) const {
  PreparedCohort out{table.subset(rows), {}, {}, {}, {}};
  for (std::size_t r : rows) {
    if (!maps.empty()) out.maps.push_back(maps.at(r));
    if (!emotion_binary.empty()) out.emotion_binary.push_back(emotion_binary.at(r));
    if (!tier.empty()) out.tier.push_back(tier[r]);
    if (!true_fl.empty()) out.true_fl.push_back(true_fl[r]);
  }
  return out;
}

std::vector<const audio::FeatureMap*> PreparedCohort::map_refs() const {
  std::vector<const audio::FeatureMap*> refs;
  for (const auto& m : maps) refs.push_back(&m);
  return refs;
}

std::vector<int> PreparedCohort::churn_outcomes() const {
  std::vector<int> y;
  for (const auto& r : table.rows()) {
    if (!r.churn_outcome) throw Error(ErrorCode::ValueError, "customer " + r.id + " has no churn outcome");
    y.push_back(*r.churn_outcome);
  }
  return y;
}

namespace {

const audio::AudioClip& clip_for(const data::CustomerRecord& r, const std::map<std::string, audio::AudioClip>& clips) {
  if (!r.audio_ref) throw Error(ErrorCode::MissingModality, "customer " + r.id + " has no audio_ref");
  const auto it = clips.find(*r.audio_ref);
  if (it == clips.end()) throw Error(ErrorCode::MissingModality, "audio " + *r.audio_ref + " not found");
  return it->second;
}

}  // namespace

PreparedCohort prepare(const synth::SyntheticCohort& cohort, const audio::FeatureParams& params) {
  PreparedCohort out{cohort.table, {}, {}, {}, {}};
  for (std::size_t i = 0; i < cohort.table.size(); ++i) {
    out.maps.push_back(audio::build_feature_map(clip_for(cohort.table[i], cohort.audio_clips), params));
    const auto& gt = cohort.ground_truth.at(i);
    out.emotion_binary.push_back(data::map_emotion_to_binary(gt.emotion));
    out.tier.push_back(gt.tier);
    out.true_fl.push_back(gt.true_fl);
  }
  return out;
}

PreparedCohort prepare(const synth::LoadedCohort& cohort, const audio::FeatureParams& params) {
  if (cohort.manifest.empty()) throw Error(ErrorCode::MissingModality, "cohort has no audio manifest");
  PreparedCohort out{cohort.table, {}, {}, {}, {}};
  for (std::size_t i = 0; i < cohort.table.size(); ++i) {
    const auto& r = cohort.table[i];
    const auto m = cohort.manifest.find(r.id);
    if (m == cohort.manifest.end()) throw Error(ErrorCode::MissingModality, "customer " + r.id + " not in manifest");
    out.maps.push_back(audio::build_feature_map(clip_for(r, cohort.audio_clips), params));
    out.emotion_binary.push_back(data::map_emotion_to_binary(m->second.emotion));
    if (cohort.ground_truth) {
      out.tier.push_back((*cohort.ground_truth)[i].tier);
      out.true_fl.push_back((*cohort.ground_truth)[i].true_fl);
    }
  }
  return out;
}

fl::FLModel train_fl_model(const PreparedCohort& train, const RunConfig& cfg) {
  const auto cols = fusion::ModalityColumns::from_schema(train.table.schema());
  std::vector<fl::LabeledExample> labeled;
  Matrix unlabeled;
  for (std::size_t i = 0; i < train.table.size(); ++i) {
    auto x = train.table.project(i, cols.financial);
    if (train.table[i].fl_label) {
      labeled.push_back({std::move(x), *train.table[i].fl_label});
    } else {
      unlabeled.push_back(std::move(x));
    }
  }
  return fl::coreg_train(labeled, unlabeled, cfg.smogn, cfg.coreg);
}

fl::KnnRegressor train_fl_baseline(const PreparedCohort& train, const RunConfig& cfg) {
  const auto cols = fusion::ModalityColumns::from_schema(train.table.schema());
  fl::KnnRegressor knn;
  knn.k = cfg.coreg.k1;
  knn.p = cfg.coreg.p1;
  for (std::size_t i = 0; i < train.table.size(); ++i) {
    if (!train.table[i].fl_label) continue;
    knn.x.push_back(train.table.project(i, cols.financial));
    knn.y.push_back(*train.table[i].fl_label);
  }
  if (knn.x.empty()) throw Error(ErrorCode::EmptyLabeledSet, "no FL labels in the training split");
  return knn;
}

ser::EmotionModel train_ser_model(const PreparedCohort& train, const RunConfig& cfg) {
  return ser::train_emotion(train.maps, train.emotion_binary, cfg.ser);
}

churn::ChurnModel train_churn_model(const PreparedCohort& train, const RunConfig& cfg) {
  const auto cols = fusion::ModalityColumns::from_schema(train.table.schema());
  Matrix x;
  for (std::size_t i = 0; i < train.table.size(); ++i) x.push_back(train.table.project(i, cols.crm));
  return churn::train_churn(x, train.churn_outcomes(), cfg.churn);
}

churn::ChurnModel train_hybrid_churn_model(const PreparedCohort& train, const fl::FLModel& fl_model,
                                           const ser::EmotionModel& ser_model, const RunConfig& cfg) {
  const auto cols = fusion::ModalityColumns::from_schema(train.table.schema());
  const auto refs = train.map_refs();
  const Matrix x = fusion::augmented_churn_inputs(train.table, refs, fl_model, ser_model, cols);
  churn::ChurnConfig hybrid_cfg = cfg.churn;
  hybrid_cfg.rfe_k = cfg.churn.rfe_k + 2;
  return churn::train_churn(x, train.churn_outcomes(), hybrid_cfg);
}

double rmse(std::span<const double> predicted, std::span<const double> truth) {
  if (predicted.size() != truth.size() || predicted.empty()) {
    throw Error(ErrorCode::LengthMismatch, "rmse needs equal-length non-empty inputs");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) s += (predicted[i] - truth[i]) * (predicted[i] - truth[i]);
  return std::sqrt(s / static_cast<double>(predicted.size()));
}

SeedResult run_seed(const RunConfig& base, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RunConfig cfg = base;
  apply_seed(cfg, seed);
  validate(cfg);

  const PreparedCohort all = prepare(synth::generate_cohort(cfg.synth), cfg.features);
  const Split split = split_rows(all.table.size(), cfg.test_fraction, split_seed(seed));
  const PreparedCohort train = all.subset(split.train);
  const PreparedCohort test = all.subset(split.test);
  const auto cols = fusion::ModalityColumns::from_schema(all.table.schema());

  fusion::UnimodalModels models{train_fl_model(train, cfg), train_ser_model(train, cfg),
                                train_churn_model(train, cfg)};
  const auto refs = test.map_refs();
  const auto churned = test.churn_outcomes();

  SeedResult r;
  r.seed = seed;
  r.none = metrics::evaluate("none", fusion::run_none(test.table, models.churn, cols), test.tier, churned,
                             cfg.query_order);
  r.late = metrics::evaluate("late", fusion::run_late_fusion(test.table, refs, models, cols, cfg.translation),
                             test.tier, churned, cfg.query_order);
  models.churn = train_hybrid_churn_model(train, models.fl, models.ser, cfg);
  r.hybrid = metrics::evaluate("hybrid", fusion::run_hybrid_fusion(test.table, refs, models, cols, cfg.translation),
                               test.tier, churned, cfg.query_order);

  const auto baseline = train_fl_baseline(train, cfg);
  std::vector<double> pred_coreg, pred_base;
  for (std::size_t i = 0; i < test.table.size(); ++i) {
    const auto x = test.table.project(i, cols.financial);
    pred_coreg.push_back(fl::predict_fl(models.fl, x));
    pred_base.push_back(std::clamp(baseline.predict(x), 0.0, 1.0));
  }
  r.fl_rmse_coreg = rmse(pred_coreg, test.true_fl);
  r.fl_rmse_baseline = rmse(pred_base, test.true_fl);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

std::pair<double, double> mean_std(const std::vector<double>& v) {
  const double m = mean(v);
  if (v.size() < 2) return {m, 0.0};
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, std::sqrt(s / static_cast<double>(v.size() - 1))};
}

}  // namespace

std::vector<StrategySummary> summarize(const std::vector<SeedResult>& results) {
  std::vector<StrategySummary> rows;
  for (auto member : {&SeedResult::none, &SeedResult::late, &SeedResult::hybrid}) {
    std::vector<double> map, f1, acc, auc;
    StrategySummary s;
    for (const auto& r : results) {
      const auto& rep = r.*member;
      s.strategy = rep.strategy;
      map.push_back(rep.map);
      f1.push_back(rep.macro_f1);
      acc.push_back(rep.accuracy);
      auc.push_back(rep.auc);
    }
    std::tie(s.map_mean, s.map_std) = mean_std(map);
    std::tie(s.f1_mean, s.f1_std) = mean_std(f1);
    std::tie(s.acc_mean, s.acc_std) = mean_std(acc);
    std::tie(s.auc_mean, s.auc_std) = mean_std(auc);
    rows.push_back(s);
  }
  return rows;
}

std::string format_comparison(const std::vector<StrategySummary>& rows) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << "strategy,map,macro_f1,accuracy,auc\n";
  for (const auto& r : rows) {
    os << r.strategy << ',' << 100 * r.map_mean << " ± " << 100 * r.map_std << ',' << 100 * r.f1_mean << " ± "
       << 100 * r.f1_std << ',' << 100 * r.acc_mean << " ± " << 100 * r.acc_std << ',' << 100 * r.auc_mean
       << " ± " << 100 * r.auc_std << '\n';
  }
  return os.str();
}

}  // namespace churnfuse::experiment
