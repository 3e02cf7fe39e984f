// include/edc/augment.hpp

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

// Baseline spectrogram conditioners: SpecAugment-style masking and warping,
// and Mixup. Random draws are separated from their application so that a
// recorded draw can be replayed bit-exactly.

#include "edc/types.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace edc {

struct MaskAxis {
  Index max_width = 1;
  Index num_masks = 1;
};

struct TimeWarp {
  Index max_shift = 1;
};

struct SpecAugmentConfig {
  std::optional<MaskAxis> time_mask;
  std::optional<MaskAxis> freq_mask;
  std::optional<TimeWarp> time_warp;
  std::uint64_t seed = 0;
  // Masked cells get this value; unset means the per-tensor mean.
  std::optional<double> fill_value;

  void validate(Index frames, Index bins) const;

  nlohmann::json to_json() const;
  static SpecAugmentConfig from_json(const nlohmann::json& j);
};

struct MaskDraw {
  Index start = 0;
  Index width = 0;
};

struct WarpDraw {
  Index anchor = 0;  // source frame that moves
  Index target = 0;  // where it lands
};

struct SpecAugmentDraws {
  std::optional<WarpDraw> warp;
  std::vector<MaskDraw> freq_masks;
  std::vector<MaskDraw> time_masks;
  std::optional<double> fill_value;

  nlohmann::json to_json() const;
};

/// All random choices for one tensor, from `config.seed`.
SpecAugmentDraws draw_spec_augment(const SpecAugmentConfig& config, Index frames, Index bins);

/// splitmix64 of (seed, stream): independent per-item seeds from one base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Piecewise-linear time remapping that moves frame `anchor` to `target` and
/// keeps both ends fixed; fractional source positions are linearly interpolated.
template <typename Derived>
Matrix<typename Derived::Scalar> time_warp(const Eigen::MatrixBase<Derived>& spec, Index anchor,
                                           Index target) {
  using Scalar = typename Derived::Scalar;
  const Index t = spec.rows();
  if (anchor <= 0 || anchor >= t - 1 || target <= 0 || target >= t - 1) {
    throw ArgumentError("time_warp: anchor and target must be interior frames");
  }
  const double last = static_cast<double>(t - 1);
  Matrix<Scalar> out(t, spec.cols());
  for (Index i = 0; i < t; ++i) {
    const double x = static_cast<double>(i);
    const double src = i <= target ? x * anchor / target
                                   : anchor + (x - target) * (last - anchor) / (last - target);
    const Index lo = std::min<Index>(static_cast<Index>(std::floor(src)), t - 1);
    const Index hi = std::min<Index>(lo + 1, t - 1);
    const auto frac = static_cast<Scalar>(src - static_cast<double>(lo));
    out.row(i) = (Scalar(1) - frac) * spec.row(lo) + frac * spec.row(hi);
  }
  return out;
}

template <typename Scalar>
struct SpecAugmentResult {
  Matrix<Scalar> output;
  SpecAugmentDraws draws;  // fill_value resolved
};

/// Applies recorded draws: warp first, then frequency masks, then time masks.
template <typename Derived>
SpecAugmentResult<typename Derived::Scalar> replay_spec_augment(const Eigen::MatrixBase<Derived>& spec,
                                                                SpecAugmentDraws draws) {
  using Scalar = typename Derived::Scalar;
  require_finite(spec, "spec_augment");
  Matrix<Scalar> out = draws.warp ? time_warp(spec, draws.warp->anchor, draws.warp->target)
                                  : Matrix<Scalar>(spec);
  if (!draws.fill_value) draws.fill_value = static_cast<double>(out.mean());
  const auto fill = static_cast<Scalar>(*draws.fill_value);
  for (const MaskDraw& m : draws.freq_masks) {
    if (m.start < 0 || m.width < 1 || m.start + m.width > out.cols()) {
      throw ArgumentError("spec_augment: frequency mask outside the tensor");
    }
    out.middleCols(m.start, m.width).setConstant(fill);
  }
  for (const MaskDraw& m : draws.time_masks) {
    if (m.start < 0 || m.width < 1 || m.start + m.width > out.rows()) {
      throw ArgumentError("spec_augment: time mask outside the tensor");
    }
    out.middleRows(m.start, m.width).setConstant(fill);
  }
  return {std::move(out), std::move(draws)};
}

template <typename Derived>
SpecAugmentResult<typename Derived::Scalar> spec_augment(const Eigen::MatrixBase<Derived>& spec,
                                                         const SpecAugmentConfig& config) {
  SpecAugmentDraws draws = draw_spec_augment(config, spec.rows(), spec.cols());
  return replay_spec_augment(spec, std::move(draws));
}

struct MixupDraw {
  double lambda = 1.0;
  double beta = 0.2;
  std::uint64_t seed = 0;
};

/// lambda ~ Beta(beta, beta).
MixupDraw sample_mixup(double beta, std::uint64_t seed);

template <typename Scalar>
struct MixupResult {
  Matrix<Scalar> spec;
  std::vector<double> labels;
};

/// (lambda * A + (1 - lambda) * B, lambda * y_A + (1 - lambda) * y_B).
template <typename DA, typename DB>
MixupResult<typename DA::Scalar> mixup(const Eigen::MatrixBase<DA>& a, const std::vector<double>& labels_a,
                                       const Eigen::MatrixBase<DB>& b, const std::vector<double>& labels_b,
                                       double lambda) {
  using Scalar = typename DA::Scalar;
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw ArgumentError("mixup: lambda must lie in [0, 1]");
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DataError("mixup: spectrogram shapes differ (" + std::to_string(a.rows()) + "x" +
                    std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                    std::to_string(b.cols()) + ")");
  }
  if (labels_a.size() != labels_b.size()) throw DataError("mixup: label vectors differ in length");

  const auto la = static_cast<Scalar>(lambda);
  const auto lb = static_cast<Scalar>(1.0 - lambda);
  MixupResult<Scalar> result{la * a + lb * b.template cast<Scalar>(), std::vector<double>(labels_a.size())};
  for (std::size_t k = 0; k < labels_a.size(); ++k) {
    result.labels[k] = lambda * labels_a[k] + (1.0 - lambda) * labels_b[k];
  }
  return result;
}

}  // namespace edc
