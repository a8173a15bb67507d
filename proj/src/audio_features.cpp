#include "churnfuse/audio_features.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "churnfuse/error.hpp"

namespace churnfuse::audio {

namespace {

bool is_power_of_two(std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; }

// FFTW planning is not thread-safe; execution on fresh arrays is. Plans are
// created once per frame size and kept for the process lifetime.
class RealFftPlans {
 public:
  static fftw_plan get(std::size_t n) {
    static RealFftPlans instance;
    std::lock_guard lock(instance.mutex_);
    auto it = instance.plans_.find(n);
    if (it != instance.plans_.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                          FFTW_ESTIMATE | FFTW_UNALIGNED);
    instance.plans_.emplace(n, plan);
    return plan;
  }

 private:
  ~RealFftPlans() {
    for (auto& [n, plan] : plans_) fftw_destroy_plan(plan);
  }
  std::mutex mutex_;
  std::map<std::size_t, fftw_plan> plans_;
};

// Running median over a window of +-half samples, truncated at both ends.
// The window is kept sorted; each step removes one value and inserts one.
void median_filter_1d(const double* in, std::size_t n, std::size_t stride, std::size_t half,
                      double* out, std::size_t out_stride, std::vector<double>& window) {
  window.clear();
  const std::size_t first = std::min(n, half + 1);
  for (std::size_t i = 0; i < first; ++i) {
    window.insert(std::upper_bound(window.begin(), window.end(), in[i * stride]), in[i * stride]);
  }
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      if (t + half < n) {
        const double v = in[(t + half) * stride];
        window.insert(std::upper_bound(window.begin(), window.end(), v), v);
      }
      if (t > half) {
        const double v = in[(t - half - 1) * stride];
        window.erase(std::lower_bound(window.begin(), window.end(), v));
      }
    }
    const std::size_t count = window.size();
    out[t * out_stride] = count % 2 == 1 ? window[count / 2]
                                         : 0.5 * (window[count / 2 - 1] + window[count / 2]);
  }
}

}  // namespace

Spectrogram stft_magnitude(const AudioClip& clip, std::size_t frame_size, std::size_t hop_size) {
  if (!is_power_of_two(frame_size)) {
    throw Error(ErrorCode::BadFrameParams, "frame size must be a power of two");
  }
  if (hop_size == 0 || hop_size > frame_size) {
    throw Error(ErrorCode::BadFrameParams, "hop size must be in (0, frame_size]");
  }
  if (!(clip.sample_rate > 0.0)) throw Error(ErrorCode::ValueError, "sample rate must be positive");
  if (clip.samples.size() < frame_size) {
    throw Error(ErrorCode::ClipTooShort, "clip has " + std::to_string(clip.samples.size()) +
                                             " samples, frame needs " + std::to_string(frame_size));
  }
  for (float s : clip.samples) {
    if (!std::isfinite(s)) throw Error(ErrorCode::ValueError, "non-finite audio sample");
  }

  const std::size_t frames = (clip.samples.size() - frame_size) / hop_size + 1;
  const std::size_t bins = frame_size / 2 + 1;

  // Periodic Hann window.
  std::vector<double> window(frame_size);
  for (std::size_t n = 0; n < frame_size; ++n) {
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                     static_cast<double>(frame_size));
  }

  Spectrogram spec;
  spec.magnitudes = Grid(bins, frames);
  spec.frame_size = frame_size;
  spec.hop_size = hop_size;
  spec.sample_rate = clip.sample_rate;

  fftw_plan plan = RealFftPlans::get(frame_size);
  std::vector<double> buffer(frame_size);
  std::vector<fftw_complex> out(bins);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t offset = t * hop_size;
    for (std::size_t n = 0; n < frame_size; ++n) {
      buffer[n] = window[n] * static_cast<double>(clip.samples[offset + n]);
    }
    fftw_execute_dft_r2c(plan, buffer.data(), out.data());
    for (std::size_t k = 0; k < bins; ++k) {
      spec.magnitudes(k, t) = std::hypot(out[k][0], out[k][1]);
    }
  }
  return spec;
}

HpssMasks hpss_masks(const Spectrogram& spec, std::size_t kernel_time, std::size_t kernel_freq) {
  if (kernel_time < 3 || kernel_freq < 3 || kernel_time % 2 == 0 || kernel_freq % 2 == 0) {
    throw Error(ErrorCode::BadKernel, "median kernels must be odd and >= 3");
  }
  const std::size_t bins = spec.bins();
  const std::size_t frames = spec.frames();
  const Grid& mag = spec.magnitudes;

  Grid harm_med(bins, frames);
  Grid perc_med(bins, frames);
  std::vector<double> window;
  for (std::size_t k = 0; k < bins; ++k) {
    median_filter_1d(&mag.values[k * frames], frames, 1, kernel_time / 2, &harm_med.values[k * frames],
                     1, window);
  }
  for (std::size_t t = 0; t < frames; ++t) {
    median_filter_1d(&mag.values[t], bins, frames, kernel_freq / 2, &perc_med.values[t], frames,
                     window);
  }

  // Soft masks. The epsilon is split evenly between the numerators so the two
  // masks sum to one exactly, including at silent cells (0.5 / 0.5).
  HpssMasks masks{Grid(bins, frames), Grid(bins, frames)};
  for (std::size_t i = 0; i < mag.values.size(); ++i) {
    const double h2 = harm_med.values[i] * harm_med.values[i];
    const double p2 = perc_med.values[i] * perc_med.values[i];
    const double denom = h2 + p2 + kMaskEpsilon;
    masks.harmonic.values[i] = (h2 + 0.5 * kMaskEpsilon) / denom;
    masks.percussive.values[i] = 1.0 - masks.harmonic.values[i];
  }
  return masks;
}

HpssResult hpss_median(const Spectrogram& spec, std::size_t kernel_time, std::size_t kernel_freq) {
  const HpssMasks masks = hpss_masks(spec, kernel_time, kernel_freq);
  HpssResult out{spec, spec};
  for (std::size_t i = 0; i < spec.magnitudes.values.size(); ++i) {
    const double m = spec.magnitudes.values[i];
    out.harmonic.magnitudes.values[i] = m * masks.harmonic.values[i];
    out.percussive.magnitudes.values[i] = m * masks.percussive.values[i];
  }
  return out;
}

double energy(const Spectrogram& spec) {
  double e = 0.0;
  for (double m : spec.magnitudes.values) e += m * m;
  return e;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

std::vector<double> mel_center_frequencies(std::size_t n_mels, double f_min, double f_max) {
  const double lo = hz_to_mel(f_min);
  const double hi = hz_to_mel(f_max);
  const double step = (hi - lo) / static_cast<double>(n_mels + 1);
  std::vector<double> centers(n_mels);
  for (std::size_t m = 0; m < n_mels; ++m) {
    centers[m] = mel_to_hz(lo + step * static_cast<double>(m + 1));
  }
  return centers;
}

Grid mel_filterbank(std::size_t frame_size, double sample_rate, std::size_t n_mels, double f_min,
                    double f_max) {
  if (n_mels < 4) throw Error(ErrorCode::BadBand, "need at least 4 Mel bands");
  if (!(f_min >= 0.0 && f_min < f_max && f_max <= sample_rate / 2.0)) {
    throw Error(ErrorCode::BadBand, "require 0 <= f_min < f_max <= sample_rate/2");
  }
  const std::size_t bins = frame_size / 2 + 1;
  const double lo = hz_to_mel(f_min);
  const double hi = hz_to_mel(f_max);
  const double step = (hi - lo) / static_cast<double>(n_mels + 1);

  Grid bank(n_mels, bins);
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double left = lo + step * static_cast<double>(m);
    const double center = left + step;
    const double right = center + step;
    for (std::size_t k = 0; k < bins; ++k) {
      const double mel =
          hz_to_mel(static_cast<double>(k) * sample_rate / static_cast<double>(frame_size));
      if (mel <= left || mel >= right) continue;
      bank(m, k) = mel <= center ? (mel - left) / (center - left) : (right - mel) / (right - center);
    }
  }
  return bank;
}

Grid mel_project(const Spectrogram& spec, std::size_t n_mels, double f_min, double f_max) {
  const Grid bank = mel_filterbank(spec.frame_size, spec.sample_rate, n_mels, f_min, f_max);
  const std::size_t frames = spec.frames();
  Grid out(n_mels, frames);
  for (std::size_t m = 0; m < n_mels; ++m) {
    for (std::size_t k = 0; k < spec.bins(); ++k) {
      const double w = bank(m, k);
      if (w == 0.0) continue;
      for (std::size_t t = 0; t < frames; ++t) {
        const double mag = spec.magnitudes(k, t);
        out(m, t) += w * mag * mag;
      }
    }
  }
  return out;
}

void validate(const FeatureParams& p) {
  if (!is_power_of_two(p.frame_size) || p.hop_size == 0 || p.hop_size > p.frame_size) {
    throw Error(ErrorCode::BadFrameParams, "invalid frame/hop sizes");
  }
  if (p.kernel_time < 3 || p.kernel_freq < 3 || p.kernel_time % 2 == 0 || p.kernel_freq % 2 == 0) {
    throw Error(ErrorCode::BadKernel, "median kernels must be odd and >= 3");
  }
  if (p.n_mels < 4 || !(p.f_min >= 0.0 && p.f_min < p.f_max)) {
    throw Error(ErrorCode::BadBand, "invalid Mel band parameters");
  }
}

FeatureMap build_feature_map(const AudioClip& clip, const FeatureParams& params) {
  validate(params);
  const Spectrogram spec = stft_magnitude(clip, params.frame_size, params.hop_size);
  const HpssResult split = hpss_median(spec, params.kernel_time, params.kernel_freq);

  const Grid harm = mel_project(split.harmonic, params.n_mels, params.f_min, params.f_max);
  const Grid perc = mel_project(split.percussive, params.n_mels, params.f_min, params.f_max);
  const Grid full = mel_project(spec, params.n_mels, params.f_min, params.f_max);
  const Grid* streams[3] = {&harm, &perc, &full};

  FeatureMap map;
  map.n_mels = params.n_mels;
  map.image = Grid(3, params.n_mels);
  const double frames = static_cast<double>(spec.frames());
  for (std::size_t row = 0; row < 3; ++row) {
    const Grid& g = *streams[row];
    for (std::size_t m = 0; m < params.n_mels; ++m) {
      double sum = 0.0;
      for (std::size_t t = 0; t < g.cols; ++t) sum += std::log(g(m, t) + kLogFloor);
      map.image(row, m) = sum / frames;
    }
  }

  if (params.standardize) {
    for (std::size_t row = 0; row < 3; ++row) {
      double mean = 0.0;
      for (std::size_t m = 0; m < params.n_mels; ++m) mean += map.image(row, m);
      mean /= static_cast<double>(params.n_mels);
      double var = 0.0;
      for (std::size_t m = 0; m < params.n_mels; ++m) {
        const double d = map.image(row, m) - mean;
        var += d * d;
      }
      const double sd = std::sqrt(var / static_cast<double>(params.n_mels));
      for (std::size_t m = 0; m < params.n_mels; ++m) {
        map.image(row, m) = sd > 0.0 ? (map.image(row, m) - mean) / sd : 0.0;
      }
    }
  }
  return map;
}

}  // namespace churnfuse::audio
