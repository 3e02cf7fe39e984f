// include/edc/conditioner.hpp

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

// Event-related data conditioning: every frame of a spectrogram is rebuilt as
// a softmax-weighted average of the frames inside a local window. The window
// is chosen per frame from the frame's own similarity profile, discounted by
// an exponential attenuation over time:
//
//   omega      = X X^T                                  (raw dot products)
//   P          = softmax(omega_i restricted to one side of i)
//   offset     = sum_d  d * P(d) * exp(-d / alpha)      over d <= max_reach
//   range(i)   = [i - round(f_offset), i + round(b_offset)]
//   output_i   = softmax(omega_i over range(i)) * X[range(i)]
//
// alpha acts as a time constant: a larger alpha widens the reachable window.
// max_reach(alpha) = floor(alpha * ln(1 / cutoff)) is the last offset whose
// attenuation is still >= cutoff; anything beyond it never enters a window.
//
// All indices in this API are 0-based.

#include "edc/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace edc {

enum class Rounding { nearest, floor };
enum class Direction { forward, backward };

inline constexpr double kDefaultCutoff = 0.02;

inline const char* to_string(Rounding r) { return r == Rounding::nearest ? "nearest" : "floor"; }

inline Rounding parse_rounding(const std::string& name) {
  if (name == "nearest") return Rounding::nearest;
  if (name == "floor") return Rounding::floor;
  throw ArgumentError("rounding must be 'nearest' or 'floor', got '" + name + "'");
}

inline void validate_attenuation(double alpha, double cutoff) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ArgumentError("alpha must be positive");
  }
  if (!(cutoff > 0.0 && cutoff < 1.0)) {
    throw ArgumentError("cutoff must lie in (0, 1)");
  }
}

/// Per-direction hard horizon in frames.
inline Index max_reach(double alpha, double cutoff = kDefaultCutoff) {
  validate_attenuation(alpha, cutoff);
  const double reach = std::floor(alpha * std::log(1.0 / cutoff));
  constexpr double kCap = static_cast<double>(std::numeric_limits<int>::max());
  return static_cast<Index>(std::min(reach, kCap));
}

struct AttenuationConfig {
  double alpha = 7.0;
  double cutoff = kDefaultCutoff;
  Rounding rounding = Rounding::nearest;

  void validate() const { validate_attenuation(alpha, cutoff); }
  Index reach() const { return max_reach(alpha, cutoff); }
  double attenuation(Index offset) const {
    return std::exp(-static_cast<double>(offset) / alpha);
  }
};

struct ReachRow {
  double alpha;
  Index frames;  // total selectable window, both directions
};

inline std::vector<ReachRow> max_reach_table(const std::vector<double>& alphas,
                                             double cutoff = kDefaultCutoff) {
  std::vector<ReachRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) rows.push_back({alpha, 2 * max_reach(alpha, cutoff)});
  return rows;
}

/// Gram matrix of the frames. Exactly symmetric.
template <typename Derived>
Matrix<typename Derived::Scalar> similarity_matrix(const Eigen::MatrixBase<Derived>& spec) {
  using Scalar = typename Derived::Scalar;
  if (spec.rows() < 1 || spec.cols() < 1) {
    throw ArgumentError("similarity_matrix: spectrogram must have T >= 1 and F >= 1");
  }
  require_finite(spec, "similarity_matrix");
  Matrix<Scalar> omega = Matrix<Scalar>::Zero(spec.rows(), spec.rows());
  omega.template selfadjointView<Eigen::Lower>().rankUpdate(spec.derived());
  omega = omega.template selfadjointView<Eigen::Lower>();
  return omega;
}

template <typename Scalar>
struct SimilaritySplit {
  Vector<Scalar> forward;   // omega(i, 0..i), time order
  Vector<Scalar> backward;  // omega(i, i..T-1), time order
};

/// Cuts one similarity row at `frame`; both halves keep the diagonal entry.
template <typename Derived>
SimilaritySplit<typename Derived::Scalar> split_similarity(const Eigen::MatrixBase<Derived>& row,
                                                           Index frame) {
  const Index n = row.size();
  if (frame < 0 || frame >= n) {
    throw ArgumentError("split_similarity: frame index " + std::to_string(frame) +
                        " outside [0, " + std::to_string(n) + ")");
  }
  return {row.head(frame + 1).transpose(), row.tail(n - frame).transpose()};
}

/// Attenuated expectation of the distance to the current frame.
///
/// `similarities` is one half of a similarity row in time order. For the
/// forward half the current frame is the last element, for the backward half
/// it is the first. The softmax covers the whole vector; only distances up to
/// the horizon add to the expectation.
template <typename Derived>
double expected_offset(const Eigen::MatrixBase<Derived>& similarities, Direction direction,
                       const AttenuationConfig& config) {
  config.validate();
  const Index n = similarities.size();
  if (n == 0) throw ArgumentError("expected_offset: empty similarity vector");
  require_finite(similarities, "expected_offset");

  // Walk outward from the current frame in both directions so that mirrored
  // inputs see identical summation order.
  auto at = [&](Index distance) -> double {
    return static_cast<double>(direction == Direction::forward ? similarities(n - 1 - distance)
                                                               : similarities(distance));
  };

  double peak = at(0);
  for (Index d = 1; d < n; ++d) peak = std::max(peak, at(d));
  double norm = 0.0;
  for (Index d = 0; d < n; ++d) norm += std::exp(at(d) - peak);

  const Index horizon = std::min<Index>(n - 1, config.reach());
  double offset = 0.0;
  for (Index d = 1; d <= horizon; ++d) {
    offset += static_cast<double>(d) * std::exp(at(d) - peak) * config.attenuation(d);
  }
  return offset / norm;
}

struct OffsetPair {
  double forward = 0.0;
  double backward = 0.0;
};

template <typename Derived>
OffsetPair frame_offsets(const Eigen::MatrixBase<Derived>& omega, Index frame,
                         const AttenuationConfig& config) {
  const auto row = omega.row(frame);
  return {expected_offset(row.head(frame + 1), Direction::forward, config),
          expected_offset(row.tail(omega.cols() - frame), Direction::backward, config)};
}

inline Index round_offset(double offset, Rounding rounding) {
  return static_cast<Index>(rounding == Rounding::nearest ? std::round(offset) : std::floor(offset));
}

struct FrameRange {
  Index first = 0;
  Index last = 0;  // inclusive

  Index size() const { return last - first + 1; }
  bool contains(Index j) const { return j >= first && j <= last; }
};

/// Per-frame contiguous attention windows. Row i always admits frame i.
class EffectiveRangeMask {
 public:
  EffectiveRangeMask() = default;

  explicit EffectiveRangeMask(std::vector<FrameRange> ranges) : ranges_(std::move(ranges)) {
    const Index t = frames();
    for (Index i = 0; i < t; ++i) {
      const FrameRange& r = ranges_[static_cast<std::size_t>(i)];
      if (r.first < 0 || r.last >= t || !r.contains(i)) {
        throw ArgumentError("EffectiveRangeMask: range of frame " + std::to_string(i) +
                            " is not a window around it inside [0, T)");
      }
    }
  }

  Index frames() const { return static_cast<Index>(ranges_.size()); }
  const FrameRange& range(Index i) const { return ranges_.at(static_cast<std::size_t>(i)); }
  const std::vector<FrameRange>& ranges() const { return ranges_; }
  bool admits(Index i, Index j) const { return range(i).contains(j); }

  Index forward_reach(Index i) const { return i - range(i).first; }
  Index backward_reach(Index i) const { return range(i).last - i; }

  /// Additive mask: 0 inside the window, -inf outside.
  template <typename Scalar = double>
  Matrix<Scalar> phi() const {
    const Index t = frames();
    Matrix<Scalar> m =
        Matrix<Scalar>::Constant(t, t, -std::numeric_limits<Scalar>::infinity());
    for (Index i = 0; i < t; ++i) {
      const FrameRange& r = range(i);
      m.row(i).segment(r.first, r.size()).setZero();
    }
    return m;
  }

 private:
  std::vector<FrameRange> ranges_;
};

template <typename Derived>
EffectiveRangeMask build_range_mask(const Eigen::MatrixBase<Derived>& omega,
                                    const AttenuationConfig& config) {
  config.validate();
  const Index t = omega.rows();
  if (t < 1 || omega.cols() != t) {
    throw ArgumentError("build_range_mask: similarity matrix must be square and non-empty");
  }
  require_finite(omega, "build_range_mask");

  std::vector<FrameRange> ranges;
  ranges.reserve(static_cast<std::size_t>(t));
  for (Index i = 0; i < t; ++i) {
    const OffsetPair offsets = frame_offsets(omega, i, config);
    const Index f = std::clamp<Index>(round_offset(offsets.forward, config.rounding), 0, i);
    const Index b = std::clamp<Index>(round_offset(offsets.backward, config.rounding), 0, t - 1 - i);
    ranges.push_back({i - f, i + b});
  }
  return EffectiveRangeMask(std::move(ranges));
}

namespace detail {

// Softmax over one window of a similarity row; frames outside never take part.
template <typename Derived>
Vector<typename Derived::Scalar> window_softmax(const Eigen::MatrixBase<Derived>& omega, Index row,
                                                const FrameRange& r) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> w = omega.row(row).segment(r.first, r.size()).transpose();
  const Scalar peak = w.maxCoeff();
  w = (w.array() - peak).exp();
  w /= w.sum();
  return w;
}

}  // namespace detail

/// Row-stochastic attention weights: softmax(omega + phi) row by row.
/// Entries outside the mask are exactly zero.
template <typename Derived>
Matrix<typename Derived::Scalar> masked_softmax(const Eigen::MatrixBase<Derived>& omega,
                                                const EffectiveRangeMask& mask) {
  using Scalar = typename Derived::Scalar;
  const Index t = omega.rows();
  if (omega.cols() != t || mask.frames() != t) {
    throw ArgumentError("masked_softmax: mask and similarity matrix disagree on T");
  }
  Matrix<Scalar> weights = Matrix<Scalar>::Zero(t, t);
  for (Index i = 0; i < t; ++i) {
    const FrameRange& r = mask.range(i);
    weights.row(i).segment(r.first, r.size()) = detail::window_softmax(omega, i, r).transpose();
  }
  return weights;
}

template <typename Scalar>
struct EdcResult {
  Matrix<Scalar> output;
  EffectiveRangeMask mask;
};

template <typename Derived>
EdcResult<typename Derived::Scalar> condition_with_mask(const Eigen::MatrixBase<Derived>& spec,
                                                        const AttenuationConfig& config) {
  using Scalar = typename Derived::Scalar;
  config.validate();
  const Matrix<Scalar> omega = similarity_matrix(spec);
  EdcResult<Scalar> result{Matrix<Scalar>(spec.rows(), spec.cols()), build_range_mask(omega, config)};

  // The band is narrow (at most 2 * max_reach + 1 frames), so each output row
  // is accumulated from its own window instead of a dense T x T product.
  for (Index i = 0; i < spec.rows(); ++i) {
    const FrameRange& r = result.mask.range(i);
    const Vector<Scalar> w = detail::window_softmax(omega, i, r);
    result.output.row(i) = w.transpose() * spec.middleRows(r.first, r.size());
  }
  return result;
}

/// Conditions a T x F spectrogram; the output has the input's shape.
template <typename Derived>
Matrix<typename Derived::Scalar> apply_edc(const Eigen::MatrixBase<Derived>& spec,
                                           const AttenuationConfig& config) {
  return condition_with_mask(spec, config).output;
}

}  // namespace edc
