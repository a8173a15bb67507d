#include "churnfuse/mlp.hpp"

#include <cmath>

#include "churnfuse/error.hpp"
#include "churnfuse/rng.hpp"

namespace churnfuse::nn {

namespace {

constexpr std::uint64_t kStreamInit = 11;
constexpr std::uint64_t kStreamShuffle = 12;

// Cached activations of one forward pass; act[0] is the input.
struct Forward {
  std::vector<std::vector<double>> act;
  double z_out = 0.0;
};

void forward(const MLPParams& p, std::span<const double> x, Forward& f) {
  const std::size_t layers = p.weights.size();
  f.act.resize(layers);
  f.act[0].assign(x.begin(), x.end());
  for (std::size_t l = 0; l < layers; ++l) {
    const std::size_t in = p.layer_dims[l];
    const std::size_t out = p.layer_dims[l + 1];
    const auto& w = p.weights[l];
    const auto& prev = f.act[l];
    if (l + 1 == layers) {
      double z = p.biases[l][0];
      for (std::size_t i = 0; i < in; ++i) z += w[i] * prev[i];
      f.z_out = z;
    } else {
      auto& next = f.act[l + 1];
      next.assign(out, 0.0);
      for (std::size_t o = 0; o < out; ++o) {
        double z = p.biases[l][o];
        const double* row = &w[o * in];
        for (std::size_t i = 0; i < in; ++i) z += row[i] * prev[i];
        next[o] = z > 0.0 ? z : 0.0;
      }
    }
  }
}

// Stable log(1 + exp(-|z|)) form of the cross-entropy on a logit.
double bce_with_logit(double z, int y) {
  return std::max(z, 0.0) - z * static_cast<double>(y) + std::log1p(std::exp(-std::abs(z)));
}

}  // namespace

void validate(const TrainConfig& c) {
  if (!(c.learning_rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "learning_rate must be > 0");
  if (c.epochs < 1) throw Error(ErrorCode::InvalidConfig, "epochs must be >= 1");
  if (c.batch_size < 1) throw Error(ErrorCode::InvalidConfig, "batch_size must be >= 1");
  if (!(c.l2_penalty >= 0.0)) throw Error(ErrorCode::InvalidConfig, "l2_penalty must be >= 0");
}

void validate(const MLPParams& p) {
  if (p.layer_dims.size() < 2 || p.layer_dims.back() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "MLP needs >= 2 layer dims ending in 1");
  }
  if (p.weights.size() != p.layer_dims.size() - 1 || p.biases.size() != p.weights.size()) {
    throw Error(ErrorCode::ShapeMismatch, "MLP layer count mismatch");
  }
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    if (p.layer_dims[l] == 0 || p.weights[l].size() != p.layer_dims[l] * p.layer_dims[l + 1] ||
        p.biases[l].size() != p.layer_dims[l + 1]) {
      throw Error(ErrorCode::ShapeMismatch, "MLP layer " + std::to_string(l) + " shape mismatch");
    }
    for (double v : p.weights[l]) {
      if (!std::isfinite(v)) throw Error(ErrorCode::ValueError, "non-finite MLP weight");
    }
    for (double v : p.biases[l]) {
      if (!std::isfinite(v)) throw Error(ErrorCode::ValueError, "non-finite MLP bias");
    }
  }
}

MLPParams init_mlp(std::vector<std::size_t> layer_dims, std::uint64_t seed) {
  MLPParams p;
  p.layer_dims = std::move(layer_dims);
  if (p.layer_dims.size() < 2 || p.layer_dims.back() != 1) {
    throw Error(ErrorCode::ShapeMismatch, "MLP needs >= 2 layer dims ending in 1");
  }
  Rng rng(derive_seed(seed, kStreamInit));
  for (std::size_t l = 0; l + 1 < p.layer_dims.size(); ++l) {
    const std::size_t in = p.layer_dims[l];
    const std::size_t out = p.layer_dims[l + 1];
    if (in == 0 || out == 0) throw Error(ErrorCode::ShapeMismatch, "zero-width MLP layer");
    const double sd = std::sqrt(2.0 / static_cast<double>(in));
    std::vector<double> w(in * out);
    for (double& v : w) v = sd * standard_normal(rng);
    p.weights.push_back(std::move(w));
    // Hidden units start slightly active so none sits exactly on the ReLU kink.
    const bool hidden = l + 2 < p.layer_dims.size();
    p.biases.emplace_back(out, hidden ? kHiddenBiasInit : 0.0);
  }
  return p;
}

MLPParams zeros_like(const MLPParams& params) {
  MLPParams z = params;
  for (auto& w : z.weights) std::fill(w.begin(), w.end(), 0.0);
  for (auto& b : z.biases) std::fill(b.begin(), b.end(), 0.0);
  return z;
}

double logit(const MLPParams& params, std::span<const double> x) {
  if (x.size() != params.input_dim()) {
    throw Error(ErrorCode::ShapeMismatch, "input width " + std::to_string(x.size()) +
                                              ", model expects " + std::to_string(params.input_dim()));
  }
  Forward f;
  forward(params, x, f);
  return f.z_out;
}

double predict_proba(const MLPParams& params, std::span<const double> x) {
  return sigmoid(logit(params, x));
}

double loss_and_gradient(const MLPParams& params, const Matrix& x, std::span<const int> y,
                         double l2_penalty, MLPParams* grad) {
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "need equal, non-zero numbers of rows and labels");
  }
  const std::size_t layers = params.weights.size();
  if (grad) *grad = zeros_like(params);
  const double inv_n = 1.0 / static_cast<double>(x.size());

  double loss = 0.0;
  Forward f;
  std::vector<double> delta, prev_delta;
  for (std::size_t n = 0; n < x.size(); ++n) {
    if (x[n].size() != params.input_dim()) throw Error(ErrorCode::ShapeMismatch, "row width mismatch");
    forward(params, x[n], f);
    loss += bce_with_logit(f.z_out, y[n]);
    if (!grad) continue;

    delta.assign(1, (sigmoid(f.z_out) - static_cast<double>(y[n])) * inv_n);
    for (std::size_t l = layers; l-- > 0;) {
      const std::size_t in = params.layer_dims[l];
      const std::size_t out = params.layer_dims[l + 1];
      const auto& a = f.act[l];
      auto& gw = grad->weights[l];
      auto& gb = grad->biases[l];
      for (std::size_t o = 0; o < out; ++o) {
        gb[o] += delta[o];
        double* row = &gw[o * in];
        for (std::size_t i = 0; i < in; ++i) row[i] += delta[o] * a[i];
      }
      if (l == 0) break;
      prev_delta.assign(in, 0.0);
      const auto& w = params.weights[l];
      for (std::size_t o = 0; o < out; ++o) {
        const double* row = &w[o * in];
        for (std::size_t i = 0; i < in; ++i) prev_delta[i] += row[i] * delta[o];
      }
      for (std::size_t i = 0; i < in; ++i) {
        if (a[i] <= 0.0) prev_delta[i] = 0.0;
      }
      std::swap(delta, prev_delta);
    }
  }
  loss *= inv_n;

  double sq = 0.0;
  for (std::size_t l = 0; l < layers; ++l) {
    for (std::size_t i = 0; i < params.weights[l].size(); ++i) {
      const double w = params.weights[l][i];
      sq += w * w;
      if (grad) grad->weights[l][i] += l2_penalty * w;
    }
  }
  return loss + 0.5 * l2_penalty * sq;
}

TrainResult train_mlp(MLPParams init, const Matrix& x, std::span<const int> y, const TrainConfig& cfg) {
  validate(cfg);
  validate(init);
  if (x.size() != y.size() || x.empty()) {
    throw Error(ErrorCode::ShapeMismatch, "need equal, non-zero numbers of rows and labels");
  }
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;

  MLPParams params = std::move(init);
  MLPParams m = zeros_like(params);
  MLPParams v = zeros_like(params);
  MLPParams grad;
  std::vector<std::size_t> order(x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(derive_seed(cfg.seed, kStreamShuffle));
  const std::size_t batch = std::min(cfg.batch_size, x.size());

  Matrix bx;
  std::vector<int> by;
  std::uint64_t step = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < x.size()) {
      for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    for (std::size_t start = 0; start < x.size(); start += batch) {
      const std::size_t end = std::min(x.size(), start + batch);
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bx.push_back(x[order[i]]);
        by.push_back(y[order[i]]);
      }
      loss_and_gradient(params, bx, by, cfg.l2_penalty, &grad);
      ++step;
      const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(step));
      auto update = [&](std::vector<double>& p, std::vector<double>& mm, std::vector<double>& vv,
                        const std::vector<double>& g) {
        for (std::size_t i = 0; i < p.size(); ++i) {
          mm[i] = kBeta1 * mm[i] + (1.0 - kBeta1) * g[i];
          vv[i] = kBeta2 * vv[i] + (1.0 - kBeta2) * g[i] * g[i];
          p[i] -= cfg.learning_rate * (mm[i] / c1) / (std::sqrt(vv[i] / c2) + kEps);
        }
      };
      for (std::size_t l = 0; l < params.weights.size(); ++l) {
        update(params.weights[l], m.weights[l], v.weights[l], grad.weights[l]);
        update(params.biases[l], m.biases[l], v.biases[l], grad.biases[l]);
      }
    }
  }
  const double final_loss = loss_and_gradient(params, x, y, cfg.l2_penalty, nullptr);
  return TrainResult{std::move(params), final_loss};
}

void write_mlp(ByteWriter& w, const MLPParams& params) {
  w.u32(static_cast<std::uint32_t>(params.layer_dims.size()));
  for (std::size_t d : params.layer_dims) w.u32(static_cast<std::uint32_t>(d));
  for (std::size_t l = 0; l < params.weights.size(); ++l) {
    w.f64s(params.weights[l]);
    w.f64s(params.biases[l]);
  }
}

MLPParams read_mlp(ByteReader& r) {
  MLPParams p;
  const std::uint32_t n_dims = r.u32();
  if (n_dims < 2 || n_dims > 64) throw Error(ErrorCode::BadFormat, "implausible MLP depth");
  for (std::uint32_t i = 0; i < n_dims; ++i) p.layer_dims.push_back(r.u32());
  for (std::size_t l = 0; l + 1 < p.layer_dims.size(); ++l) {
    p.weights.push_back(r.f64s(p.layer_dims[l] * p.layer_dims[l + 1]));
    p.biases.push_back(r.f64s(p.layer_dims[l + 1]));
  }
  validate(p);
  return p;
}

}  // namespace churnfuse::nn
