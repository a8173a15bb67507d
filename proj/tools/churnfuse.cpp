// churnfuse: generate cohorts, train the unimodal models, run and compare
// the none / late / hybrid risk strategies.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "churnfuse/binary_io.hpp"
#include "churnfuse/error.hpp"
#include "churnfuse/experiment.hpp"

namespace fs = std::filesystem;
using namespace churnfuse;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold_fl;
  std::optional<double> threshold_churn;
  std::string out;
  std::string data;
  std::string models;
};

experiment::RunConfig resolve(const Options& o) {
  experiment::RunConfig cfg;
  if (!o.config_path.empty()) cfg = experiment::load_run_config(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.threshold_fl) cfg.translation.fl_threshold = *o.threshold_fl;
  if (o.threshold_churn) cfg.translation.churn_threshold = *o.threshold_churn;
  if (!o.data.empty()) cfg.data_dir = o.data;
  if (!o.models.empty()) cfg.model_dir = o.models;
  experiment::apply_seed(cfg, cfg.seed);
  experiment::validate(cfg);
  return cfg;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

template <class T, class F>
T load_model(const fs::path& path, F deserialize) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::IoError, "model " + path.string() + " not found; run the matching train command first");
  }
  return deserialize(read_file_bytes(path));
}

struct Prepared {
  experiment::PreparedCohort train;
  experiment::PreparedCohort test;
};

Prepared load_split(const experiment::RunConfig& cfg) {
  const auto loaded = synth::load_cohort(cfg.data_dir);
  const auto all = experiment::prepare(loaded, cfg.features);
  const auto split = experiment::split_rows(all.table.size(), cfg.test_fraction, experiment::split_seed(cfg.seed));
  return {all.subset(split.train), all.subset(split.test)};
}

// Training only needs the tabular part, so skip audio decoding when possible.
experiment::PreparedCohort load_train_tabular(const experiment::RunConfig& cfg) {
  auto loaded = synth::load_cohort(cfg.data_dir);
  experiment::PreparedCohort all{loaded.table, {}, {}, {}, {}};
  all.maps.resize(all.table.size());
  all.emotion_binary.assign(all.table.size(), 0);
  const auto split = experiment::split_rows(all.table.size(), cfg.test_fraction, experiment::split_seed(cfg.seed));
  return all.subset(split.train);
}

void cmd_gen(const experiment::RunConfig& cfg, const fs::path& out) {
  const auto cohort = synth::generate_cohort(cfg.synth);
  synth::write_cohort(cohort, out);
  std::cout << "customers = " << cohort.table.size() << "\n"
            << "labeled_fl = "
            << std::count_if(cohort.table.rows().begin(), cohort.table.rows().end(),
                             [](const auto& r) { return r.fl_label.has_value(); })
            << "\n"
            << "out = " << out.string() << "\n";
}

void cmd_train(const experiment::RunConfig& cfg, const std::string& modality, const fs::path& out) {
  if (modality == "fl") {
    const auto train = load_train_tabular(cfg);
    const auto model = experiment::train_fl_model(train, cfg);
    ensure_dir(out);
    write_file_bytes(out / "fl.flkn", fl::serialize(model));
    std::cout << "model = fl\n"
              << "pseudo_labels = " << model.transcript.size() << "\n"
              << "learner1_size = " << model.learner1.x.size() << "\n"
              << "learner2_size = " << model.learner2.x.size() << "\n";
  } else if (modality == "ser") {
    const auto split = load_split(cfg);
    const auto model = experiment::train_ser_model(split.train, cfg);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < split.train.maps.size(); ++i) {
      correct += ser::predict_emotion(model, split.train.maps[i]).binary == split.train.emotion_binary[i];
    }
    ensure_dir(out);
    write_file_bytes(out / "ser.serm", ser::serialize(model));
    std::cout << "model = ser\n"
              << "final_loss = " << data::format_double(model.final_loss) << "\n"
              << "train_accuracy = "
              << data::format_double(static_cast<double>(correct) / static_cast<double>(split.train.maps.size()))
              << "\n";
  } else if (modality == "churn") {
    const auto train = load_train_tabular(cfg);
    const auto model = experiment::train_churn_model(train, cfg);
    ensure_dir(out);
    write_file_bytes(out / "churn.chrn", churn::serialize(model));
    // Selected indices refer to the crm_* columns the model was trained on.
    const auto crm = fusion::ModalityColumns::from_schema(train.table.schema()).crm;
    std::string selected;
    for (auto c : model.selected_features) {
      if (!selected.empty()) selected += ',';
      selected += train.table.schema().feature_columns[crm[c]];
    }
    std::cout << "model = churn\n"
              << "final_loss = " << data::format_double(model.final_loss) << "\n"
              << "train_accuracy = " << data::format_double(model.train_accuracy) << "\n"
              << "selected = " << selected << "\n";
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown modality '" + modality + "'");
  }
}

void cmd_evaluate(const experiment::RunConfig& cfg, const std::string& strategy, const fs::path& out) {
  if (strategy != "none" && strategy != "late" && strategy != "hybrid") {
    throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + strategy + "'");
  }
  const auto models_dir = cfg.model_dir;
  auto churn_model = load_model<churn::ChurnModel>(models_dir / "churn.chrn", [](const auto& b) {
    return churn::deserialize_churn_model(b);
  });
  const auto split = load_split(cfg);
  if (split.test.tier.empty()) throw Error(ErrorCode::IoError, "evaluation needs ground_truth.csv in the data dir");
  const auto cols = fusion::ModalityColumns::from_schema(split.test.table.schema());

  fusion::RiskAssignments assignments;
  if (strategy == "none") {
    assignments = fusion::run_none(split.test.table, churn_model, cols);
  } else {
    fusion::UnimodalModels models{
        load_model<fl::FLModel>(models_dir / "fl.flkn", [](const auto& b) { return fl::deserialize_fl_model(b); }),
        load_model<ser::EmotionModel>(models_dir / "ser.serm",
                                      [](const auto& b) { return ser::deserialize_emotion_model(b); }),
        std::move(churn_model)};
    const auto refs = split.test.map_refs();
    if (strategy == "late") {
      assignments = fusion::run_late_fusion(split.test.table, refs, models, cols, cfg.translation);
    } else {
      models.churn = experiment::train_hybrid_churn_model(split.train, models.fl, models.ser, cfg);
      ensure_dir(models_dir);
      write_file_bytes(models_dir / "churn_hybrid.chrn", churn::serialize(models.churn));
      assignments = fusion::run_hybrid_fusion(split.test.table, refs, models, cols, cfg.translation);
    }
  }
  const auto report =
      metrics::evaluate(strategy, assignments, split.test.tier, split.test.churn_outcomes(), cfg.query_order);
  const auto text = metrics::format_report(report);
  ensure_dir(out);
  write_text(out / ("assignments_" + strategy + ".csv"), fusion::write_assignments(assignments));
  write_text(out / ("report_" + strategy + ".txt"), text);
  std::cout << text;
}

void cmd_compare(const experiment::RunConfig& cfg, const fs::path& out) {
  std::vector<experiment::SeedResult> results;
  std::string per_seed = "seed,strategy,map,macro_f1,accuracy,auc\n";
  for (auto seed : cfg.seeds) {
    results.push_back(experiment::run_seed(cfg, seed));
    const auto& r = results.back();
    for (const auto* rep : {&r.none, &r.late, &r.hybrid}) {
      per_seed += std::to_string(seed) + "," + rep->strategy + "," + data::format_double(rep->map) + "," +
                  data::format_double(rep->macro_f1) + "," + data::format_double(rep->accuracy) + "," +
                  data::format_double(rep->auc) + "\n";
    }
    std::cerr << "seed " << seed << " done\n";
  }
  const auto table = experiment::format_comparison(experiment::summarize(results));
  ensure_dir(out);
  write_text(out / "comparison.csv", table);
  write_text(out / "comparison_seeds.csv", per_seed);
  std::cout << table;
}

void cmd_report(const fs::path& dir) {
  std::cout << "strategy,map,macro_f1,accuracy,auc,count_low,count_mid,count_high\n";
  bool any = false;
  for (const char* s : {"none", "late", "hybrid"}) {
    const auto path = dir / (std::string("report_") + s + ".txt");
    if (!fs::exists(path)) continue;
    any = true;
    std::map<std::string, std::string> kv;
    for (auto line : data::split_lines(read_text(path))) {
      const auto eq = line.find(" = ");
      if (eq != std::string_view::npos) kv[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 3));
    }
    std::cout << s;
    for (const char* key : {"map", "macro_f1", "accuracy", "auc", "count_low", "count_mid", "count_high"}) {
      std::cout << ',' << kv[key];
    }
    std::cout << '\n';
  }
  if (!any) throw Error(ErrorCode::IoError, "no report_*.txt files in " + dir.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multimodal churn-risk fusion: data generation, training and evaluation"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--config", o.config_path, "Flat key = value config file")->check(CLI::ExistingFile);
  app.add_option("--seed", o.seed, "Top-level seed (overrides the config)");
  app.add_option("--out", o.out, "Output directory for the command");
  app.add_option("--threshold-fl", o.threshold_fl, "FL threshold for the F indicator");
  app.add_option("--threshold-churn", o.threshold_churn, "Churn threshold for the C indicator");
  app.add_option("--data", o.data, "Cohort directory (overrides paths.data)");
  app.add_option("--models", o.models, "Model directory (overrides paths.models)");

  auto* gen = app.add_subcommand("gen", "Generate a synthetic cohort");
  auto* train = app.add_subcommand("train", "Train one unimodal model");
  std::string modality;
  train->add_option("modality", modality, "fl | ser | churn")->required()->check(CLI::IsMember({"fl", "ser", "churn"}));
  auto* evaluate = app.add_subcommand("evaluate", "Run one strategy on the held-out split");
  std::string strategy;
  evaluate->add_option("strategy", strategy, "none | late | hybrid")
      ->required()
      ->check(CLI::IsMember({"none", "late", "hybrid"}));
  auto* compare = app.add_subcommand("compare", "Run every strategy over the configured seeds");
  auto* report = app.add_subcommand("report", "Summarise existing evaluation reports");
  auto* config = app.add_subcommand("config", "Print the effective configuration");

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = resolve(o);
    auto out_or = [&](const fs::path& fallback) { return o.out.empty() ? fallback : fs::path(o.out); };
    if (*gen) cmd_gen(cfg, out_or(cfg.data_dir));
    if (*train) cmd_train(cfg, modality, out_or(cfg.model_dir));
    if (*evaluate) cmd_evaluate(cfg, strategy, out_or(cfg.report_dir));
    if (*compare) cmd_compare(cfg, out_or(cfg.report_dir));
    if (*report) cmd_report(out_or(cfg.report_dir));
    if (*config) std::cout << experiment::format_run_config(cfg);
  } catch (const Error& e) {
    std::cerr << "churnfuse: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "churnfuse: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
