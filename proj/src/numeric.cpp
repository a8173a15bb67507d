#include "churnfuse/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "churnfuse/error.hpp"

namespace churnfuse {

namespace {

// Distance raised to the p-th power; monotone in the true distance, so it is
// what neighbor ranking compares.
double minkowski_pow(std::span<const double> a, std::span<const double> b, double p) {
  double s = 0.0;
  if (p == 2.0) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = a[i] - b[i];
      s += d * d;
    }
  } else if (p == 1.0) {
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  } else if (p == std::floor(p) && p <= 8.0) {
    const int ip = static_cast<int>(p);
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double d = std::abs(a[i] - b[i]);
      double term = d;
      for (int e = 1; e < ip; ++e) term *= d;
      s += term;
    }
  } else {
    for (std::size_t i = 0; i < a.size(); ++i) s += std::pow(std::abs(a[i] - b[i]), p);
  }
  return s;
}

std::vector<std::size_t> select_nearest(std::vector<std::pair<double, std::size_t>>& scored,
                                        std::size_t k) {
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = scored[i].second;
  return out;
}

}  // namespace

double minkowski(std::span<const double> a, std::span<const double> b, double p) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimensionMismatch, "vectors differ in length");
  const double s = minkowski_pow(a, b, p);
  if (p == 1.0) return s;
  if (p == 2.0) return std::sqrt(s);
  return std::pow(s, 1.0 / p);
}

std::vector<std::size_t> k_nearest(const Matrix& rows, std::span<const double> query, std::size_t k,
                                   double p, std::optional<std::size_t> exclude) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (exclude && *exclude == i) continue;
    scored.emplace_back(minkowski_pow(rows[i], query, p), i);
  }
  return select_nearest(scored, k);
}

std::vector<std::size_t> k_nearest_among(const Matrix& rows, std::span<const std::size_t> candidates,
                                         std::span<const double> query, std::size_t k, double p,
                                         std::optional<std::size_t> exclude) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t i : candidates) {
    if (exclude && *exclude == i) continue;
    scored.emplace_back(minkowski_pow(rows[i], query, p), i);
  }
  return select_nearest(scored, k);
}

Standardizer Standardizer::fit(const Matrix& rows) {
  Standardizer s;
  if (rows.empty()) return s;
  const std::size_t d = rows.front().size();
  s.mean.assign(d, 0.0);
  s.scale.assign(d, 1.0);
  const double n = static_cast<double>(rows.size());
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += r[j];
  }
  for (double& m : s.mean) m /= n;
  std::vector<double> var(d, 0.0);
  for (const auto& r : rows) {
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = r[j] - s.mean[j];
      var[j] += diff * diff;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    const double sd = std::sqrt(var[j] / n);
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  if (row.size() != mean.size()) {
    throw Error(ErrorCode::DimensionMismatch, "standardizer width " + std::to_string(mean.size()) +
                                                  ", row width " + std::to_string(row.size()));
  }
  std::vector<double> out(row.size());
  for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / scale[j];
  return out;
}

Matrix Standardizer::apply(const Matrix& rows) const {
  Matrix out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(apply(r));
  return out;
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "pearson inputs differ in length");
  const double mx = mean(x);
  const double my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateColumn, "constant column");
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace churnfuse
