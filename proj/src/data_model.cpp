#include "churnfuse/data_model.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "churnfuse/error.hpp"

namespace churnfuse::data {

std::string_view emotion_name(Emotion e) {
  switch (e) {
    case Emotion::Happiness: return "Happiness";
    case Emotion::Neutral: return "Neutral";
    case Emotion::Sadness: return "Sadness";
    case Emotion::Anger: return "Anger";
  }
  return "Neutral";
}

Emotion parse_emotion(std::string_view label) {
  for (Emotion e : {Emotion::Happiness, Emotion::Neutral, Emotion::Sadness, Emotion::Anger}) {
    if (emotion_name(e) == label) return e;
  }
  throw Error(ErrorCode::UnknownLabel, "unsupported emotion label '" + std::string(label) + "'");
}

int map_emotion_to_binary(Emotion e) {
  return (e == Emotion::Happiness || e == Emotion::Neutral) ? 0 : 1;
}

int map_emotion_to_binary(std::string_view label) { return map_emotion_to_binary(parse_emotion(label)); }

std::string_view risk_label_name(RiskLabel r) {
  switch (r) {
    case RiskLabel::Low: return "low";
    case RiskLabel::Mid: return "mid";
    case RiskLabel::High: return "high";
  }
  return "low";
}

RiskLabel parse_risk_label(std::string_view name) {
  for (RiskLabel r : {RiskLabel::Low, RiskLabel::Mid, RiskLabel::High}) {
    if (risk_label_name(r) == name) return r;
  }
  throw Error(ErrorCode::UnknownLabel, "unknown risk label '" + std::string(name) + "'");
}

void validate(const EmotionPrediction& p) {
  if (p.binary != map_emotion_to_binary(p.label)) {
    throw Error(ErrorCode::ValueError, "emotion binary inconsistent with label");
  }
  if (!(p.confidence >= 0.0 && p.confidence <= 1.0)) {
    throw Error(ErrorCode::ValueError, "emotion confidence outside [0,1]");
  }
}

void validate(const ModalityScores& s) {
  if (!(s.fl_score >= 0.0 && s.fl_score <= 1.0)) {
    throw Error(ErrorCode::ValueError, "fl_score outside [0,1]");
  }
  if (!(s.churn_propensity >= 0.0 && s.churn_propensity <= 1.0)) {
    throw Error(ErrorCode::ValueError, "churn_propensity outside [0,1]");
  }
  validate(s.emotion);
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<std::string> SchemaSpec::header() const {
  std::vector<std::string> h;
  h.emplace_back(kId);
  h.insert(h.end(), feature_columns.begin(), feature_columns.end());
  h.emplace_back(kFlLabel);
  h.emplace_back(kAudioRef);
  h.emplace_back(kChurn);
  return h;
}

std::vector<std::size_t> SchemaSpec::columns_with_prefix(std::string_view prefix) const {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < feature_columns.size(); ++i) {
    if (std::string_view(feature_columns[i]).starts_with(prefix)) idx.push_back(i);
  }
  return idx;
}

SchemaSpec SchemaSpec::from_header(std::string_view header_line) {
  SchemaSpec s;
  for (auto col : split_fields(header_line)) {
    if (col == kId || col == kFlLabel || col == kAudioRef || col == kChurn) continue;
    s.feature_columns.emplace_back(col);
  }
  return s;
}

void validate_record(const CustomerRecord& r, const SchemaSpec& schema) {
  if (r.id.empty()) throw Error(ErrorCode::ValueError, "empty customer id");
  if (r.features.size() != schema.width()) {
    throw Error(ErrorCode::SchemaMismatch, "record '" + r.id + "' has " +
                                               std::to_string(r.features.size()) +
                                               " features, schema declares " +
                                               std::to_string(schema.width()));
  }
  for (double v : r.features) {
    if (!std::isfinite(v)) throw Error(ErrorCode::ValueError, "non-finite feature in '" + r.id + "'");
  }
  if (r.fl_label && !(*r.fl_label >= 0.0 && *r.fl_label <= 1.0)) {
    throw Error(ErrorCode::ValueError, "fl_label outside [0,1] in '" + r.id + "'");
  }
  if (r.churn_outcome && *r.churn_outcome != 0 && *r.churn_outcome != 1) {
    throw Error(ErrorCode::ValueError, "churn outcome not in {0,1} in '" + r.id + "'");
  }
}

CustomerTable::CustomerTable(SchemaSpec schema, std::vector<CustomerRecord> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  index_.reserve(rows_.size());
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    validate_record(rows_[i], schema_);
    if (!index_.emplace(rows_[i].id, i).second) {
      throw Error(ErrorCode::DuplicateId, "duplicate id '" + rows_[i].id + "'");
    }
  }
}

std::optional<std::size_t> CustomerTable::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> CustomerTable::project(std::size_t row,
                                           const std::vector<std::size_t>& columns) const {
  std::vector<double> out;
  out.reserve(columns.size());
  for (std::size_t c : columns) out.push_back(rows_[row].features.at(c));
  return out;
}

CustomerTable CustomerTable::subset(const std::vector<std::size_t>& row_indices) const {
  std::vector<CustomerRecord> rows;
  rows.reserve(row_indices.size());
  for (std::size_t i : row_indices) rows.push_back(rows_.at(i));
  return CustomerTable(schema_, std::move(rows));
}

namespace {

double parse_numeric_cell(std::string_view cell, const std::string& column, std::size_t line) {
  auto v = parse_double(cell);
  if (!v || !std::isfinite(*v)) {
    throw Error(ErrorCode::ValueError, "line " + std::to_string(line) + ": column '" + column +
                                           "' has non-numeric value '" + std::string(cell) + "'");
  }
  return *v;
}

CustomerRecord record_from_cells(const std::vector<std::string_view>& cells,
                                 const std::vector<std::size_t>& header_to_schema,
                                 const SchemaSpec& schema, std::size_t line) {
  // header_to_schema maps each input column to its schema position
  // (0 = id, 1..w = features, w+1 = fl_label, w+2 = audio_ref, w+3 = churn).
  const std::size_t w = schema.width();
  CustomerRecord r;
  r.features.assign(w, 0.0);
  const auto names = schema.header();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::size_t pos = header_to_schema[c];
    const std::string_view cell = cells[c];
    if (pos == 0) {
      r.id = std::string(cell);
    } else if (pos <= w) {
      if (cell.empty()) {
        throw Error(ErrorCode::ValueError, "line " + std::to_string(line) + ": missing value for '" +
                                               names[pos] + "'");
      }
      r.features[pos - 1] = parse_numeric_cell(cell, names[pos], line);
    } else if (pos == w + 1) {
      if (!cell.empty()) r.fl_label = parse_numeric_cell(cell, names[pos], line);
    } else if (pos == w + 2) {
      if (!cell.empty()) r.audio_ref = std::string(cell);
    } else {
      if (cell.empty()) continue;
      if (cell == "0") {
        r.churn_outcome = 0;
      } else if (cell == "1") {
        r.churn_outcome = 1;
      } else {
        throw Error(ErrorCode::ValueError, "line " + std::to_string(line) +
                                               ": churn outcome must be 0 or 1, got '" +
                                               std::string(cell) + "'");
      }
    }
  }
  return r;
}

}  // namespace

CustomerTable parse_customer_table(std::string_view raw, const SchemaSpec& schema) {
  auto lines = split_lines(raw);
  if (lines.empty()) throw Error(ErrorCode::SchemaMismatch, "missing header row");
  const auto expected = schema.header();
  const auto header = split_fields(lines[0]);
  if (header.size() != expected.size()) {
    throw Error(ErrorCode::SchemaMismatch, "header has " + std::to_string(header.size()) +
                                               " columns, schema expects " +
                                               std::to_string(expected.size()));
  }
  std::vector<std::size_t> header_to_schema(header.size());
  std::set<std::size_t> seen;
  for (std::size_t c = 0; c < header.size(); ++c) {
    std::size_t pos = expected.size();
    for (std::size_t k = 0; k < expected.size(); ++k) {
      if (expected[k] == header[c]) pos = k;
    }
    if (pos == expected.size() || !seen.insert(pos).second) {
      throw Error(ErrorCode::SchemaMismatch, "unexpected column '" + std::string(header[c]) + "'");
    }
    header_to_schema[c] = pos;
  }

  std::vector<CustomerRecord> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cells = split_fields(lines[i]);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::ValueError, "line " + std::to_string(i + 1) + " has " +
                                             std::to_string(cells.size()) + " cells, expected " +
                                             std::to_string(header.size()));
    }
    rows.push_back(record_from_cells(cells, header_to_schema, schema, i + 1));
  }
  return CustomerTable(schema, std::move(rows));
}

std::string write_customer_table(const CustomerTable& table) {
  std::string out;
  const auto header = table.schema().header();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& r : table.rows()) {
    out += r.id;
    for (double v : r.features) {
      out += ',';
      out += format_double(v);
    }
    out += ',';
    if (r.fl_label) out += format_double(*r.fl_label);
    out += ',';
    if (r.audio_ref) out += *r.audio_ref;
    out += ',';
    if (r.churn_outcome) out += std::to_string(*r.churn_outcome);
    out += '\n';
  }
  return out;
}

std::string format_record(const CustomerRecord& r, const SchemaSpec& schema) {
  validate_record(r, schema);
  std::string out = std::string(SchemaSpec::kId) + " = " + r.id + "\n";
  for (std::size_t i = 0; i < schema.width(); ++i) {
    out += schema.feature_columns[i] + " = " + format_double(r.features[i]) + "\n";
  }
  out += std::string(SchemaSpec::kFlLabel) + " = " + (r.fl_label ? format_double(*r.fl_label) : "") + "\n";
  out += std::string(SchemaSpec::kAudioRef) + " = " + r.audio_ref.value_or("") + "\n";
  out += std::string(SchemaSpec::kChurn) + " = " +
         (r.churn_outcome ? std::to_string(*r.churn_outcome) : "") + "\n";
  return out;
}

namespace {
std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}
}  // namespace

CustomerRecord parse_record(std::string_view text, const SchemaSpec& schema) {
  const auto names = schema.header();
  std::vector<std::string_view> values(names.size());
  std::vector<bool> present(names.size(), false);
  std::size_t line_no = 0;
  for (auto line : split_lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    std::size_t pos = names.size();
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (names[k] == key) pos = k;
    }
    if (pos == names.size() || present[pos]) {
      throw Error(ErrorCode::SchemaMismatch, "unexpected key '" + std::string(key) + "'");
    }
    present[pos] = true;
    values[pos] = value;
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    if (!present[k]) throw Error(ErrorCode::SchemaMismatch, "missing key '" + names[k] + "'");
  }
  std::vector<std::size_t> identity(names.size());
  for (std::size_t k = 0; k < names.size(); ++k) identity[k] = k;
  auto r = record_from_cells(values, identity, schema, line_no);
  validate_record(r, schema);
  return r;
}

}  // namespace churnfuse::data
