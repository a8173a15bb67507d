#include "churnfuse/fl_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "churnfuse/binary_io.hpp"
#include "churnfuse/error.hpp"
#include "churnfuse/rng.hpp"

namespace churnfuse::fl {

namespace {

constexpr std::uint64_t kStreamSmogn = 21;
constexpr std::uint64_t kStreamPool = 22;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_learner(ByteWriter& w, const KnnRegressor& l) {
  w.u32(static_cast<std::uint32_t>(l.k));
  w.f64(l.p);
  w.u64(l.x.size());
  for (const auto& row : l.x) w.f64s(row);
  w.f64s(l.y);
}

KnnRegressor read_learner(ByteReader& r, std::size_t dim) {
  KnnRegressor l;
  l.k = r.u32();
  l.p = r.f64();
  const std::uint64_t n = r.u64();
  if (n == 0 || n > (1ULL << 32)) throw Error(ErrorCode::BadFormat, "implausible learner size");
  l.x.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) l.x.push_back(r.f64s(dim));
  l.y = r.f64s(n);
  return l;
}

// Leave-one-out neighborhood of a labeled row: neighbor indices, the sum of
// their targets and the distance of the farthest one.
struct LooNeighborhood {
  std::vector<std::size_t> idx;
  double target_sum = 0.0;
  double kth_distance = 0.0;
};

class CoregLearner {
 public:
  CoregLearner(KnnRegressor& reg) : reg_(reg) {}

  LooNeighborhood& loo(std::size_t i) {
    auto it = cache_.find(i);
    if (it != cache_.end()) return it->second;
    LooNeighborhood nb;
    nb.idx = k_nearest(reg_.x, reg_.x[i], reg_.k, reg_.p, i);
    for (std::size_t j : nb.idx) nb.target_sum += reg_.y[j];
    if (!nb.idx.empty()) nb.kth_distance = minkowski(reg_.x[i], reg_.x[nb.idx.back()], reg_.p);
    return cache_.emplace(i, std::move(nb)).first->second;
  }

  // Reduction in mean leave-one-out squared error over the candidate's
  // neighborhood if (x_u, y_hat) joined the training set.
  double error_reduction(std::span<const double> xu, double y_hat) {
    const auto omega = k_nearest(reg_.x, xu, reg_.k, reg_.p);
    double delta = 0.0;
    for (std::size_t i : omega) {
      const LooNeighborhood& nb = loo(i);
      const double yi = reg_.y[i];
      const double m = static_cast<double>(nb.idx.size());
      const double before = m > 0 ? nb.target_sum / m : 0.0;
      double after = before;
      const double du = minkowski(reg_.x[i], xu, reg_.p);
      if (nb.idx.size() < reg_.k) {
        after = (nb.target_sum + y_hat) / (m + 1.0);
      } else if (du < nb.kth_distance) {
        // The new row has the highest index, so it loses distance ties.
        after = (nb.target_sum - reg_.y[nb.idx.back()] + y_hat) / m;
      }
      delta += (yi - before) * (yi - before) - (yi - after) * (yi - after);
    }
    return omega.empty() ? 0.0 : delta / static_cast<double>(omega.size());
  }

  void reset_cache() { cache_.clear(); }

 private:
  KnnRegressor& reg_;
  std::map<std::size_t, LooNeighborhood> cache_;
};

}  // namespace

void validate(const SmognConfig& c) {
  if (c.k_neighbors < 1) throw Error(ErrorCode::InvalidConfig, "k_neighbors must be >= 1");
  if (!(c.relevance_threshold > 0.0 && c.relevance_threshold < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "relevance_threshold must be in (0,1)");
  }
  if (!(c.gaussian_perturbation >= 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "gaussian_perturbation must be >= 0");
  }
  if (!(c.oversample_ratio > 0.0)) throw Error(ErrorCode::InvalidConfig, "oversample_ratio must be > 0");
}

void validate(const CoregConfig& c) {
  if (c.k1 < 1 || c.k2 < 1) throw Error(ErrorCode::InvalidConfig, "COREG k must be >= 1");
  if (!(c.p1 >= 1.0) || !(c.p2 >= 1.0)) throw Error(ErrorCode::InvalidConfig, "Minkowski order must be >= 1");
  if (c.k1 == c.k2 && c.p1 == c.p2) {
    throw Error(ErrorCode::InvalidConfig, "COREG learners must differ in k or Minkowski order");
  }
  if (c.max_iterations < 1 || c.pool_size < 1 || c.batch_per_iter < 1) {
    throw Error(ErrorCode::InvalidConfig, "COREG iteration/pool/batch sizes must be >= 1");
  }
}

std::vector<double> relevance_scores(std::span<const double> targets) {
  std::vector<double> rel(targets.size(), 0.0);
  if (targets.empty()) return rel;
  const double med = median(std::vector<double>(targets.begin(), targets.end()));
  double max_dev = 0.0;
  for (double y : targets) max_dev = std::max(max_dev, std::abs(y - med));
  if (max_dev == 0.0) return rel;
  for (std::size_t i = 0; i < targets.size(); ++i) rel[i] = std::abs(targets[i] - med) / max_dev;
  return rel;
}

SmognResult smogn_resample(std::span<const LabeledExample> labeled, const SmognConfig& cfg) {
  validate(cfg);
  if (labeled.size() < cfg.k_neighbors + 1) {
    throw Error(ErrorCode::TooFewExamples, "SMOGN needs at least k_neighbors + 1 examples");
  }
  const std::size_t dim = labeled.front().features.size();
  std::vector<double> targets;
  Matrix x;
  for (const auto& ex : labeled) {
    if (!(ex.target >= 0.0 && ex.target <= 1.0)) {
      throw Error(ErrorCode::TargetOutOfRange, "SMOGN targets must lie in [0,1]");
    }
    if (ex.features.size() != dim) throw Error(ErrorCode::DimensionMismatch, "ragged feature rows");
    targets.push_back(ex.target);
    x.push_back(ex.features);
  }

  SmognResult out;
  out.samples.assign(labeled.begin(), labeled.end());
  out.n_original = labeled.size();
  out.relevance = relevance_scores(targets);

  std::vector<std::size_t> rare;
  std::vector<bool> is_rare(labeled.size(), false);
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    if (out.relevance[i] > cfg.relevance_threshold) {
      rare.push_back(i);
      is_rare[i] = true;
    }
  }
  if (rare.empty()) return out;

  const Standardizer spread = Standardizer::fit(x);
  Rng rng(derive_seed(cfg.seed, kStreamSmogn));
  const auto n_new = static_cast<std::size_t>(
      std::ceil(cfg.oversample_ratio * static_cast<double>(rare.size())));

  for (std::size_t s = 0; s < n_new; ++s) {
    const std::size_t a = rare[s % rare.size()];
    std::vector<std::size_t> rare_neighbors;
    for (std::size_t j : k_nearest(x, x[a], cfg.k_neighbors, 2.0, a)) {
      if (is_rare[j]) rare_neighbors.push_back(j);
    }
    SyntheticOrigin origin;
    origin.output_index = out.samples.size();
    origin.parent_a = a;
    LabeledExample ex;
    ex.features.resize(dim);
    if (!rare_neighbors.empty()) {
      const std::size_t b = rare_neighbors[uniform_index(rng, rare_neighbors.size())];
      const double t = uniform01(rng);
      for (std::size_t j = 0; j < dim; ++j) ex.features[j] = x[a][j] + t * (x[b][j] - x[a][j]);
      const double da = minkowski(ex.features, x[a], 2.0);
      const double db = minkowski(ex.features, x[b], 2.0);
      ex.target = da + db > 0.0 ? (db * targets[a] + da * targets[b]) / (da + db)
                                : 0.5 * (targets[a] + targets[b]);
      origin.parent_b = b;
      origin.t = t;
      origin.kind = SyntheticOrigin::Kind::Interpolated;
    } else {
      for (std::size_t j = 0; j < dim; ++j) {
        const double sd = spread.scale[j] * cfg.gaussian_perturbation;
        ex.features[j] = x[a][j] + sd * standard_normal(rng);
      }
      ex.target = targets[a];
      origin.kind = SyntheticOrigin::Kind::Gaussian;
    }
    ex.target = std::clamp(ex.target, 0.0, 1.0);
    out.samples.push_back(std::move(ex));
    out.origins.push_back(origin);
  }
  return out;
}

double KnnRegressor::predict(std::span<const double> query) const {
  if (x.empty()) throw Error(ErrorCode::EmptyLabeledSet, "k-NN regressor has no training rows");
  if (query.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "query has " + std::to_string(query.size()) +
                                                  " features, model expects " + std::to_string(dim()));
  }
  const auto nb = k_nearest(x, query, k, p);
  double s = 0.0;
  for (std::size_t i : nb) s += y[i];
  return s / static_cast<double>(nb.size());
}

FLModel coreg_train(std::span<const LabeledExample> labeled, const Matrix& unlabeled,
                    const SmognConfig& smogn, const CoregConfig& cfg) {
  validate(cfg);
  if (labeled.empty()) throw Error(ErrorCode::EmptyLabeledSet, "COREG needs labeled examples");
  const std::size_t dim = labeled.front().features.size();
  for (const auto& row : unlabeled) {
    if (row.size() != dim) throw Error(ErrorCode::DimensionMismatch, "unlabeled row width mismatch");
  }

  const SmognResult augmented = smogn_resample(labeled, smogn);
  FLModel model;
  model.learner1.k = cfg.k1;
  model.learner1.p = cfg.p1;
  model.learner2.k = cfg.k2;
  model.learner2.p = cfg.p2;
  for (const auto& ex : augmented.samples) {
    model.learner1.x.push_back(ex.features);
    model.learner1.y.push_back(ex.target);
  }
  model.learner2.x = model.learner1.x;
  model.learner2.y = model.learner1.y;
  if (unlabeled.empty()) return model;

  // Candidate pool drawn from a seeded shuffle of the unlabeled rows; the
  // remainder refills it as points are consumed.
  std::vector<std::size_t> order(unlabeled.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(cfg.seed, kStreamPool));
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
  std::vector<std::size_t> pool;
  std::size_t next = 0;
  auto refill = [&] {
    while (pool.size() < cfg.pool_size && next < order.size()) pool.push_back(order[next++]);
  };
  refill();

  KnnRegressor* learners[2] = {&model.learner1, &model.learner2};
  for (std::size_t iter = 0; iter < cfg.max_iterations && !pool.empty(); ++iter) {
    std::vector<PseudoLabel> picked[2];
    for (int j = 0; j < 2; ++j) {
      CoregLearner learner(*learners[j]);
      std::vector<std::pair<double, std::size_t>> scored;  // (-delta, pool position)
      std::vector<double> labels(pool.size());
      for (std::size_t c = 0; c < pool.size(); ++c) {
        const auto& xu = unlabeled[pool[c]];
        labels[c] = learners[j]->predict(xu);
        const double delta = learner.error_reduction(xu, labels[c]);
        if (delta > 0.0) scored.emplace_back(-delta, c);
      }
      std::sort(scored.begin(), scored.end());
      std::vector<std::size_t> taken;
      for (std::size_t s = 0; s < std::min(cfg.batch_per_iter, scored.size()); ++s) {
        const std::size_t c = scored[s].second;
        picked[j].push_back(PseudoLabel{iter, j + 1, pool[c], labels[c], -scored[s].first});
        taken.push_back(c);
      }
      std::sort(taken.rbegin(), taken.rend());
      for (std::size_t c : taken) pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(c));
    }
    if (picked[0].empty() && picked[1].empty()) break;
    for (int j = 0; j < 2; ++j) {
      KnnRegressor& peer = *learners[1 - j];
      for (const auto& pl : picked[j]) {
        peer.x.push_back(unlabeled[pl.unlabeled_index]);
        peer.y.push_back(pl.value);
        model.transcript.push_back(pl);
      }
    }
    refill();
  }
  return model;
}

double predict_fl(const FLModel& model, std::span<const double> features) {
  const double a = model.learner1.predict(features);
  const double b = model.learner2.predict(features);
  return std::clamp(0.5 * (a + b), 0.0, 1.0);
}

std::vector<std::uint8_t> serialize(const FLModel& model) {
  ByteWriter w;
  w.magic("FLKN");
  w.u16(kFlFormatVersion);
  w.u32(static_cast<std::uint32_t>(model.learner1.dim()));
  write_learner(w, model.learner1);
  write_learner(w, model.learner2);
  return w.take();
}

FLModel deserialize_fl_model(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  r.expect_magic("FLKN");
  if (r.u16() != kFlFormatVersion) throw Error(ErrorCode::BadFormat, "unsupported FLKN version");
  const std::size_t dim = r.u32();
  FLModel m;
  m.learner1 = read_learner(r, dim);
  m.learner2 = read_learner(r, dim);
  if (!r.at_end()) throw Error(ErrorCode::BadFormat, "trailing bytes in FLKN file");
  return m;
}

}  // namespace churnfuse::fl
