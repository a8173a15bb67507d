#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace churnfuse::audio {

// Mono clip, samples in [-1, 1].
struct AudioClip {
  std::vector<float> samples;
  double sample_rate = 16000.0;

  double duration_seconds() const { return static_cast<double>(samples.size()) / sample_rate; }
  bool operator==(const AudioClip&) const = default;
};

// Dense row-major 2-D array.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Grid() = default;
  Grid(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), values(r * c, fill) {}

  double& operator()(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  bool operator==(const Grid&) const = default;
};

// magnitudes is [freq_bin x frame].
struct Spectrogram {
  Grid magnitudes;
  std::size_t frame_size = 0;
  std::size_t hop_size = 0;
  double sample_rate = 0.0;

  std::size_t bins() const { return magnitudes.rows; }
  std::size_t frames() const { return magnitudes.cols; }
};

struct HpssMasks {
  Grid harmonic;
  Grid percussive;
};

struct HpssResult {
  Spectrogram harmonic;
  Spectrogram percussive;
};

// Rows: mean harmonic log-Mel, mean percussive log-Mel, mean log-Mel.
struct FeatureMap {
  Grid image;
  std::size_t n_mels = 0;

  std::vector<double> flattened() const { return image.values; }
};

struct FeatureParams {
  std::size_t frame_size = 1024;
  std::size_t hop_size = 256;
  std::size_t n_mels = 64;
  double f_min = 50.0;
  double f_max = 8000.0;
  std::size_t kernel_time = 17;
  std::size_t kernel_freq = 17;
  bool standardize = false;
};

inline constexpr double kLogFloor = 1e-10;
inline constexpr double kMaskEpsilon = 1e-10;

Spectrogram stft_magnitude(const AudioClip& clip, std::size_t frame_size, std::size_t hop_size);

// Median filters: along time per frequency row (kernel_time) for the harmonic
// estimate, along frequency per frame (kernel_freq) for the percussive one.
// Windows are truncated at the array edges.
HpssMasks hpss_masks(const Spectrogram& spec, std::size_t kernel_time, std::size_t kernel_freq);
HpssResult hpss_median(const Spectrogram& spec, std::size_t kernel_time, std::size_t kernel_freq);

// Sum of squared magnitudes.
double energy(const Spectrogram& spec);

// HTK Mel scale.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filterbank, [n_mels x (frame_size/2 + 1)].
Grid mel_filterbank(std::size_t frame_size, double sample_rate, std::size_t n_mels, double f_min,
                    double f_max);
std::vector<double> mel_center_frequencies(std::size_t n_mels, double f_min, double f_max);

// Filterbank applied to squared magnitudes; result is [n_mels x frames].
Grid mel_project(const Spectrogram& spec, std::size_t n_mels, double f_min, double f_max);

FeatureMap build_feature_map(const AudioClip& clip, const FeatureParams& params = {});

void validate(const FeatureParams& params);

}  // namespace churnfuse::audio
