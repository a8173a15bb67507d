#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace churnfuse {

// Row-major sample matrix: one inner vector per example.
using Matrix = std::vector<std::vector<double>>;

// Minkowski distance of order p (p >= 1).
double minkowski(std::span<const double> a, std::span<const double> b, double p);

// Indices of the k rows nearest to `query` under Minkowski order p, closest
// first. Equal distances are broken by the lower row index. `exclude` removes
// one row from consideration (leave-one-out queries).
std::vector<std::size_t> k_nearest(const Matrix& rows, std::span<const double> query, std::size_t k,
                                   double p, std::optional<std::size_t> exclude = std::nullopt);

// Same, restricted to the candidate row indices.
std::vector<std::size_t> k_nearest_among(const Matrix& rows, std::span<const std::size_t> candidates,
                                         std::span<const double> query, std::size_t k, double p,
                                         std::optional<std::size_t> exclude = std::nullopt);

// Per-column z-scoring fitted on training rows. Constant columns get scale 1.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const Matrix& rows);
  std::vector<double> apply(std::span<const double> row) const;
  Matrix apply(const Matrix& rows) const;
  bool operator==(const Standardizer&) const = default;
};

// Where a synthetic resampled row came from. Interpolated rows equal
// a + t * (b - a); perturbed rows are Gaussian jitter around a.
struct SyntheticOrigin {
  enum class Kind { Interpolated, Gaussian };
  std::size_t output_index = 0;
  std::size_t parent_a = 0;
  std::optional<std::size_t> parent_b;
  double t = 0.0;
  Kind kind = Kind::Interpolated;
};

double sigmoid(double z);
double mean(std::span<const double> v);
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace churnfuse
