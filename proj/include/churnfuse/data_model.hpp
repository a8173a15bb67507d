#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace churnfuse::data {

enum class Emotion { Happiness, Neutral, Sadness, Anger };

std::string_view emotion_name(Emotion e);
// Throws UnknownLabel for anything outside the four supported labels.
Emotion parse_emotion(std::string_view label);

// Happiness/Neutral -> 0 (positive), Sadness/Anger -> 1 (negative).
int map_emotion_to_binary(Emotion e);
int map_emotion_to_binary(std::string_view label);

enum class RiskLabel { Low = 0, Mid = 1, High = 2 };

std::string_view risk_label_name(RiskLabel r);  // "low" / "mid" / "high"
RiskLabel parse_risk_label(std::string_view name);

struct EmotionPrediction {
  Emotion label = Emotion::Neutral;
  int binary = 0;
  double confidence = 1.0;
};

void validate(const EmotionPrediction& p);

struct ModalityScores {
  double fl_score = 0.0;
  double churn_propensity = 0.0;
  EmotionPrediction emotion;
};

void validate(const ModalityScores& s);

struct CustomerRecord {
  std::string id;
  std::vector<double> features;
  std::optional<double> fl_label;
  std::optional<std::string> audio_ref;
  std::optional<int> churn_outcome;
};

// Column layout of a customer table: "id", the feature columns in order, then
// "fl_label", "audio_ref" and "churn". Feature columns prefixed "fin_" feed the
// financial-literacy modality, columns prefixed "crm_" feed the churn model.
struct SchemaSpec {
  std::vector<std::string> feature_columns;

  static constexpr std::string_view kId = "id";
  static constexpr std::string_view kFlLabel = "fl_label";
  static constexpr std::string_view kAudioRef = "audio_ref";
  static constexpr std::string_view kChurn = "churn";
  static constexpr std::string_view kFinancialPrefix = "fin_";
  static constexpr std::string_view kCrmPrefix = "crm_";

  std::size_t width() const { return feature_columns.size(); }
  std::vector<std::string> header() const;
  std::vector<std::size_t> columns_with_prefix(std::string_view prefix) const;

  // Schema whose feature columns are every header column other than the
  // fixed ones, in header order.
  static SchemaSpec from_header(std::string_view header_line);

  bool operator==(const SchemaSpec&) const = default;
};

// Immutable, validated table. Construction checks every record invariant and
// id uniqueness.
class CustomerTable {
 public:
  CustomerTable(SchemaSpec schema, std::vector<CustomerRecord> rows);

  const SchemaSpec& schema() const { return schema_; }
  const std::vector<CustomerRecord>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  const CustomerRecord& operator[](std::size_t i) const { return rows_[i]; }
  std::optional<std::size_t> find(const std::string& id) const;

  // Features of row i restricted to the given column indices.
  std::vector<double> project(std::size_t row, const std::vector<std::size_t>& columns) const;

  // New table holding the listed rows, in the listed order.
  CustomerTable subset(const std::vector<std::size_t>& row_indices) const;

 private:
  SchemaSpec schema_;
  std::vector<CustomerRecord> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

void validate_record(const CustomerRecord& r, const SchemaSpec& schema);

CustomerTable parse_customer_table(std::string_view raw, const SchemaSpec& schema);
std::string write_customer_table(const CustomerTable& table);

// Single-record "key = value" text, one line per column, in schema order.
// Optional fields that are absent are written with an empty value.
std::string format_record(const CustomerRecord& r, const SchemaSpec& schema);
CustomerRecord parse_record(std::string_view text, const SchemaSpec& schema);

// Shortest round-trip decimal text for a double.
std::string format_double(double v);
// Whole-string parse; rejects trailing text and non-finite values.
std::optional<double> parse_double(std::string_view s);

// Minimal comma-separated helpers shared by the text formats.
std::vector<std::string_view> split_lines(std::string_view text);
std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

}  // namespace churnfuse::data
