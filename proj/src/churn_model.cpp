#include "churnfuse/churn_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "churnfuse/error.hpp"
#include "churnfuse/rng.hpp"

namespace churnfuse::churn {

namespace {

constexpr std::uint64_t kStreamSmote = 31;

void require_both_classes(std::span<const int> y) {
  bool has[2] = {false, false};
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::ValueError, "labels must be 0 or 1");
    has[v] = true;
  }
  if (!has[0] || !has[1]) throw Error(ErrorCode::SingleClass, "both classes must be present");
}

Matrix select_columns(const Matrix& x, const std::vector<std::size_t>& cols) {
  Matrix out;
  out.reserve(x.size());
  for (const auto& row : x) {
    std::vector<double> r;
    r.reserve(cols.size());
    for (std::size_t c : cols) r.push_back(row[c]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace

std::vector<double> fit_logistic(const Matrix& x, std::span<const int> y, double ridge) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const auto d = static_cast<Eigen::Index>(x.empty() ? 0 : x.front().size());
  Eigen::MatrixXd design(n, d + 1);
  Eigen::VectorXd target(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) design(i, j) = x[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    design(i, d) = 1.0;
    target(i) = y[static_cast<std::size_t>(i)];
  }
  // Newton-Raphson on the mean log-loss + ridge/2 * |w|^2 (intercept unpenalised).
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d + 1);
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(d + 1, ridge);
  penalty(d) = 0.0;
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::VectorXd z = design * w;
    Eigen::VectorXd p(n), s(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p(i) = sigmoid(z(i));
      s(i) = std::max(p(i) * (1.0 - p(i)), 1e-12);
    }
    const Eigen::VectorXd grad =
        design.transpose() * (p - target) / static_cast<double>(n) + penalty.cwiseProduct(w);
    Eigen::MatrixXd hess = design.transpose() * s.asDiagonal() * design / static_cast<double>(n);
    hess.diagonal() += penalty + Eigen::VectorXd::Constant(d + 1, 1e-10);
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    w -= step;
    if (step.cwiseAbs().maxCoeff() < 1e-10) break;
  }
  return std::vector<double>(w.data(), w.data() + w.size());
}

RfeResult rfe_select(const Matrix& x, std::span<const int> y, std::size_t target_k) {
  if (x.size() != y.size() || x.empty()) throw Error(ErrorCode::ShapeMismatch, "need one label per row");
  require_both_classes(y);
  const std::size_t width = x.front().size();
  if (target_k < 1 || target_k > width) {
    throw Error(ErrorCode::BadK, "target_k must be in [1, " + std::to_string(width) + "]");
  }
  const Matrix xs = Standardizer::fit(x).apply(x);

  RfeResult out;
  std::vector<std::size_t> remaining(width);
  for (std::size_t j = 0; j < width; ++j) remaining[j] = j;
  while (remaining.size() > target_k) {
    const auto coef = fit_logistic(select_columns(xs, remaining), y);
    std::size_t weakest = 0;
    for (std::size_t j = 1; j < remaining.size(); ++j) {
      if (std::abs(coef[j]) < std::abs(coef[weakest])) weakest = j;
    }
    out.elimination_order.push_back(remaining[weakest]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(weakest));
  }
  out.selected = remaining;
  return out;
}

SmoteResult smote_oversample(const Matrix& x, std::span<const int> y, double ratio, std::size_t k,
                             std::uint64_t seed) {
  if (x.size() != y.size() || x.empty()) throw Error(ErrorCode::ShapeMismatch, "need one label per row");
  if (!(ratio > 0.0) || k < 1) throw Error(ErrorCode::InvalidConfig, "SMOTE needs ratio > 0 and k >= 1");
  require_both_classes(y);

  std::vector<std::size_t> members[2];
  for (std::size_t i = 0; i < y.size(); ++i) members[y[i]].push_back(i);
  const int minority = members[1].size() <= members[0].size() ? 1 : 0;
  const auto& minority_rows = members[minority];
  const std::size_t majority_count = members[1 - minority].size();
  if (minority_rows.size() < k + 1) {
    throw Error(ErrorCode::TooFewMinority, "minority class needs at least k + 1 rows");
  }

  SmoteResult out;
  out.x = x;
  out.y.assign(y.begin(), y.end());
  out.n_original = x.size();
  out.minority_label = minority;

  const auto wanted = static_cast<std::size_t>(std::ceil(ratio * static_cast<double>(majority_count)));
  if (wanted <= minority_rows.size()) return out;

  Rng rng(derive_seed(seed, kStreamSmote));
  const std::size_t dim = x.front().size();
  for (std::size_t s = minority_rows.size(); s < wanted; ++s) {
    const std::size_t a = minority_rows[uniform_index(rng, minority_rows.size())];
    const auto nb = k_nearest_among(x, minority_rows, x[a], k, 2.0, a);
    const std::size_t b = nb[uniform_index(rng, nb.size())];
    const double t = uniform01(rng);
    std::vector<double> row(dim);
    for (std::size_t j = 0; j < dim; ++j) row[j] = x[a][j] + t * (x[b][j] - x[a][j]);
    out.origins.push_back(SyntheticOrigin{out.x.size(), a, b, t, SyntheticOrigin::Kind::Interpolated});
    out.x.push_back(std::move(row));
    out.y.push_back(minority);
  }
  return out;
}

ChurnModel train_churn(const Matrix& x, std::span<const int> y, const ChurnConfig& cfg) {
  if (x.size() != y.size() || x.empty()) throw Error(ErrorCode::ShapeMismatch, "need one label per row");
  require_both_classes(y);
  nn::validate(cfg.train);
  const std::size_t width = x.front().size();
  for (const auto& row : x) {
    if (row.size() != width) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
  }

  ChurnModel model;
  model.input_width = width;
  model.selected_features = rfe_select(x, y, std::min(cfg.rfe_k, width)).selected;
  const Matrix selected = select_columns(x, model.selected_features);
  model.normalization = Standardizer::fit(selected);
  const Matrix normalized = model.normalization.apply(selected);
  const SmoteResult balanced = smote_oversample(normalized, y, cfg.smote_ratio, cfg.smote_k, cfg.train.seed);

  std::vector<std::size_t> dims{model.selected_features.size()};
  dims.insert(dims.end(), cfg.hidden.begin(), cfg.hidden.end());
  dims.push_back(1);
  auto trained = nn::train_mlp(nn::init_mlp(dims, cfg.train.seed), balanced.x, balanced.y, cfg.train);
  model.mlp = std::move(trained.params);
  model.final_loss = trained.final_loss;

  std::size_t correct = 0;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const int pred = nn::predict_proba(model.mlp, normalized[i]) > 0.5 ? 1 : 0;
    correct += pred == y[i] ? 1 : 0;
  }
  model.train_accuracy = static_cast<double>(correct) / static_cast<double>(normalized.size());
  return model;
}

double predict_churn(const ChurnModel& model, std::span<const double> features) {
  if (features.size() != model.input_width) {
    throw Error(ErrorCode::DimensionMismatch, "churn model expects " + std::to_string(model.input_width) +
                                                  " features, got " + std::to_string(features.size()));
  }
  std::vector<double> selected;
  selected.reserve(model.selected_features.size());
  for (std::size_t c : model.selected_features) selected.push_back(features[c]);
  return nn::predict_proba(model.mlp, model.normalization.apply(selected));
}

std::vector<std::uint8_t> serialize(const ChurnModel& model) {
  ByteWriter w;
  w.magic("CHRN");
  w.u16(kChurnFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.input_width));
  w.u32(static_cast<std::uint32_t>(model.selected_features.size()));
  for (std::size_t c : model.selected_features) w.u32(static_cast<std::uint32_t>(c));
  w.f64s(model.normalization.mean);
  w.f64s(model.normalization.scale);
  w.f64(model.final_loss);
  w.f64(model.train_accuracy);
  nn::write_mlp(w, model.mlp);
  return w.take();
}

ChurnModel deserialize_churn_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("CHRN");
  if (r.u16() != kChurnFormatVersion) throw Error(ErrorCode::BadFormat, "unsupported CHRN version");
  ChurnModel m;
  m.input_width = r.u32();
  const std::size_t n_sel = r.u32();
  if (n_sel == 0 || n_sel > m.input_width) throw Error(ErrorCode::BadFormat, "bad CHRN selection size");
  for (std::size_t i = 0; i < n_sel; ++i) {
    m.selected_features.push_back(r.u32());
    if (m.selected_features.back() >= m.input_width) throw Error(ErrorCode::BadFormat, "CHRN column out of range");
  }
  m.normalization.mean = r.f64s(n_sel);
  m.normalization.scale = r.f64s(n_sel);
  m.final_loss = r.f64();
  m.train_accuracy = r.f64();
  m.mlp = nn::read_mlp(r);
  if (m.mlp.input_dim() != n_sel) throw Error(ErrorCode::BadFormat, "CHRN MLP width mismatch");
  if (!r.at_end()) throw Error(ErrorCode::BadFormat, "trailing bytes in CHRN file");
  return m;
}

}  // namespace churnfuse::churn
