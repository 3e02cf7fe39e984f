// src/features.cpp

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

#include "edc/features.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <tuple>
#include <vector>

namespace edc {

void SpectrogramConfig::validate(double sample_rate) const {
  if (!(sample_rate > 0.0)) throw ArgumentError("sample rate must be positive");
  if (!(hop_ms > 0.0) || !(hop_ms <= window_ms)) throw ArgumentError("need 0 < hop_ms <= window_ms");
  if (n_mels < 1) throw ArgumentError("n_mels must be >= 1");
  const double top = upper_edge(sample_rate);
  if (!(fmin >= 0.0) || !(fmin < top)) throw ArgumentError("need 0 <= fmin < fmax");
  if (top > sample_rate / 2.0) throw ArgumentError("fmax exceeds the Nyquist frequency");
  if (!(log_floor > 0.0)) throw ArgumentError("log_floor must be positive");
  if (window_samples(sample_rate) < 1 || hop_samples(sample_rate) < 1) {
    throw ArgumentError("window and hop must each span at least one sample");
  }
}

Index SpectrogramConfig::window_samples(double sample_rate) const {
  return static_cast<Index>(std::llround(window_ms * sample_rate / 1000.0));
}

Index SpectrogramConfig::hop_samples(double sample_rate) const {
  return static_cast<Index>(std::llround(hop_ms * sample_rate / 1000.0));
}

Index SpectrogramConfig::nfft(double sample_rate) const { return next_pow2(window_samples(sample_rate)); }

nlohmann::json SpectrogramConfig::to_json() const {
  nlohmann::json j = {{"window_ms", window_ms}, {"hop_ms", hop_ms},     {"n_mels", n_mels},
                      {"fmin", fmin},           {"log_floor", log_floor}, {"window", "hamming"},
                      {"mel_scale", "htk"},     {"log", "natural"}};
  j["fmax"] = fmax ? nlohmann::json(*fmax) : nlohmann::json(nullptr);
  return j;
}

SpectrogramConfig SpectrogramConfig::from_json(const nlohmann::json& j) {
  SpectrogramConfig c;
  c.window_ms = j.value("window_ms", c.window_ms);
  c.hop_ms = j.value("hop_ms", c.hop_ms);
  c.n_mels = j.value("n_mels", c.n_mels);
  c.fmin = j.value("fmin", c.fmin);
  if (j.contains("fmax") && !j.at("fmax").is_null()) c.fmax = j.at("fmax").get<double>();
  c.log_floor = j.value("log_floor", c.log_floor);
  return c;
}

Index frame_count(Index num_samples, Index window_samples, Index hop_samples) {
  if (num_samples < window_samples) return 0;
  return (num_samples - window_samples) / hop_samples + 1;
}

Index next_pow2(Index n) {
  Index p = 1;
  while (p < n) p <<= 1;
  return p;
}

Vector<double> hamming_window(Index n) {
  Vector<double> w(n);
  if (n == 1) {
    w(0) = 1.0;
    return w;
  }
  for (Index k = 0; k < n; ++k) {
    w(k) = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  return w;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix<double> stft_power(const AudioClip& clip, const SpectrogramConfig& config) {
  config.validate(clip.sample_rate);
  const Index window = config.window_samples(clip.sample_rate);
  const Index hop = config.hop_samples(clip.sample_rate);
  const Index nfft = next_pow2(window);
  const Index n = static_cast<Index>(clip.samples.size());
  const Index frames = frame_count(n, window, hop);
  if (frames == 0) {
    throw DataError("clip of " + std::to_string(n) + " samples is shorter than one window (" +
                    std::to_string(window) + " samples)");
  }

  const Vector<double> taper = hamming_window(window);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  std::vector<double> buffer(static_cast<std::size_t>(nfft), 0.0);
  std::vector<std::complex<double>> spectrum;

  Matrix<double> power(frames, nfft / 2 + 1);
  for (Index t = 0; t < frames; ++t) {
    const double* src = clip.samples.data() + t * hop;
    for (Index k = 0; k < window; ++k) buffer[static_cast<std::size_t>(k)] = src[k] * taper(k);
    fft.fwd(spectrum, buffer);
    for (Index k = 0; k <= nfft / 2; ++k) power(t, k) = std::norm(spectrum[static_cast<std::size_t>(k)]);
  }
  return power;
}

Matrix<double> mel_filterbank(const SpectrogramConfig& config, double sample_rate, Index nfft) {
  config.validate(sample_rate);
  if (nfft < 2) throw ArgumentError("nfft must be >= 2");
  const Index bins = nfft / 2 + 1;
  const double mel_lo = hz_to_mel(config.fmin);
  const double mel_hi = hz_to_mel(config.upper_edge(sample_rate));
  const int m = config.n_mels;

  std::vector<double> edges(static_cast<std::size_t>(m + 2));
  for (int k = 0; k < m + 2; ++k) {
    edges[static_cast<std::size_t>(k)] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * k / (m + 1));
  }

  Matrix<double> fb = Matrix<double>::Zero(m, bins);
  for (int r = 0; r < m; ++r) {
    const double lo = edges[static_cast<std::size_t>(r)];
    const double center = edges[static_cast<std::size_t>(r + 1)];
    const double hi = edges[static_cast<std::size_t>(r + 2)];
    for (Index k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(nfft);
      if (f > lo && f <= center) {
        fb(r, k) = (f - lo) / (center - lo);
      } else if (f > center && f < hi) {
        fb(r, k) = (hi - f) / (hi - center);
      }
    }
    const double peak = fb.row(r).maxCoeff();
    if (!(peak > 0.0)) {
      throw ArgumentError("mel filter " + std::to_string(r) + " covers no FFT bin; n_mels=" +
                          std::to_string(m) + " is too large for nfft=" + std::to_string(nfft));
    }
    fb.row(r) /= peak;
  }
  return fb;
}

const Matrix<double>& cached_filterbank(const SpectrogramConfig& config, double sample_rate, Index nfft) {
  using Key = std::tuple<int, double, double, double, Index>;
  static std::shared_mutex mutex;
  static std::map<Key, std::unique_ptr<const Matrix<double>>> cache;

  const Key key{config.n_mels, config.fmin, config.upper_edge(sample_rate), sample_rate, nfft};
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return *it->second;
  }
  auto built = std::make_unique<const Matrix<double>>(mel_filterbank(config, sample_rate, nfft));
  std::unique_lock lock(mutex);
  auto [it, inserted] = cache.try_emplace(key, std::move(built));
  return *it->second;
}

Matrix<double> log_mel_from_power(const Matrix<double>& power, const Matrix<double>& filterbank,
                                  double log_floor) {
  if (power.cols() != filterbank.cols()) throw ArgumentError("power spectrum and filterbank widths differ");
  Matrix<double> energies = power * filterbank.transpose();
  return energies.unaryExpr([log_floor](double e) { return std::log(std::max(e, log_floor)); });
}

MelSpectrogram log_mel(const AudioClip& clip, const SpectrogramConfig& config) {
  const Matrix<double> power = stft_power(clip, config);
  const Matrix<double>& fb = cached_filterbank(config, clip.sample_rate, config.nfft(clip.sample_rate));
  return {log_mel_from_power(power, fb, config.log_floor), config.frame_rate(), config};
}

}  // namespace edc
