// include/edc/features.hpp

// Copyright 2026  The EDC Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "edc/audio_io.hpp"
#include "edc/types.hpp"

#include <json.hpp>

#include <optional>

namespace edc {

/// Log mel-bank energy extraction parameters. Window and hop are given in
/// milliseconds and converted to samples per clip, so the sample rate stays
/// data-driven.
struct SpectrogramConfig {
  double window_ms = 40.0;
  double hop_ms = 20.0;
  int n_mels = 64;
  double fmin = 0.0;
  std::optional<double> fmax;  // defaults to Nyquist
  double log_floor = 1e-10;

  void validate(double sample_rate) const;

  Index window_samples(double sample_rate) const;
  Index hop_samples(double sample_rate) const;
  Index nfft(double sample_rate) const;
  double upper_edge(double sample_rate) const { return fmax.value_or(sample_rate / 2.0); }
  double frame_rate() const { return 1000.0 / hop_ms; }

  nlohmann::json to_json() const;
  static SpectrogramConfig from_json(const nlohmann::json& j);
};

struct MelSpectrogram {
  Matrix<double> frames;  // T x n_mels, natural log of mel-band power
  double frame_rate = 0.0;
  SpectrogramConfig config;

  Index num_frames() const { return frames.rows(); }
};

/// Number of whole frames that fit in `num_samples`; 0 when even one does not.
Index frame_count(Index num_samples, Index window_samples, Index hop_samples);

/// Next power of two >= n.
Index next_pow2(Index n);

/// Symmetric Hamming window of length n.
Vector<double> hamming_window(Index n);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// T x (nfft/2 + 1) squared magnitudes of Hamming-windowed frames, each frame
/// zero-padded to nfft. Frames that would run past the clip are dropped.
Matrix<double> stft_power(const AudioClip& clip, const SpectrogramConfig& config);

/// n_mels x (nfft/2 + 1) triangular filters on the HTK mel scale, each row
/// scaled so its largest weight is 1. Throws ArgumentError when a filter
/// falls between FFT bins and would be empty.
Matrix<double> mel_filterbank(const SpectrogramConfig& config, double sample_rate, Index nfft);

/// Same as mel_filterbank, memoized per (config, sample rate, nfft).
const Matrix<double>& cached_filterbank(const SpectrogramConfig& config, double sample_rate, Index nfft);

/// Mel-filters a power matrix and takes log(max(energy, log_floor)).
Matrix<double> log_mel_from_power(const Matrix<double>& power, const Matrix<double>& filterbank,
                                  double log_floor);

MelSpectrogram log_mel(const AudioClip& clip, const SpectrogramConfig& config);

}  // namespace edc
