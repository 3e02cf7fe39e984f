// src/augment.cpp

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

#include "edc/augment.hpp"

#include <random>
#include <string>

namespace edc {

namespace {

void check_axis(const MaskAxis& axis, Index extent, const char* name) {
  if (axis.max_width < 1 || axis.max_width > extent) {
    throw ArgumentError(std::string(name) + " mask width must lie in [1, " + std::to_string(extent) + "]");
  }
  if (axis.num_masks < 1) throw ArgumentError(std::string(name) + " mask count must be >= 1");
}

std::vector<MaskDraw> draw_masks(const MaskAxis& axis, Index extent, std::mt19937_64& rng) {
  std::vector<MaskDraw> masks;
  for (Index n = 0; n < axis.num_masks; ++n) {
    const Index width = std::uniform_int_distribution<Index>(1, axis.max_width)(rng);
    const Index start = std::uniform_int_distribution<Index>(0, extent - width)(rng);
    masks.push_back({start, width});
  }
  return masks;
}

nlohmann::json axis_json(const std::optional<MaskAxis>& axis) {
  if (!axis) return nullptr;
  return {{"max_width", axis->max_width}, {"num_masks", axis->num_masks}};
}

std::optional<MaskAxis> axis_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& a = j.at(key);
  return MaskAxis{a.at("max_width").get<Index>(), a.value("num_masks", Index{1})};
}

nlohmann::json masks_json(const std::vector<MaskDraw>& masks) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : masks) out.push_back({{"start", m.start}, {"width", m.width}});
  return out;
}

}  // namespace

void SpecAugmentConfig::validate(Index frames, Index bins) const {
  if (!time_mask && !freq_mask && !time_warp) throw ArgumentError("spec_augment: no axis enabled");
  if (frames < 1 || bins < 1) throw ArgumentError("spec_augment: empty tensor");
  if (time_mask) check_axis(*time_mask, frames, "time");
  if (freq_mask) check_axis(*freq_mask, bins, "frequency");
  if (time_warp) {
    if (time_warp->max_shift < 1) throw ArgumentError("time warp shift must be >= 1");
    if (frames < 2 * time_warp->max_shift + 3) {
      throw ArgumentError("time warp shift " + std::to_string(time_warp->max_shift) + " needs at least " +
                          std::to_string(2 * time_warp->max_shift + 3) + " frames");
    }
  }
}

nlohmann::json SpecAugmentConfig::to_json() const {
  nlohmann::json j = {{"time_mask", axis_json(time_mask)}, {"freq_mask", axis_json(freq_mask)}, {"seed", seed}};
  j["time_warp"] = time_warp ? nlohmann::json{{"max_shift", time_warp->max_shift}} : nlohmann::json(nullptr);
  j["fill_value"] = fill_value ? nlohmann::json(*fill_value) : nlohmann::json("mean");
  return j;
}

SpecAugmentConfig SpecAugmentConfig::from_json(const nlohmann::json& j) {
  SpecAugmentConfig c;
  try {
    c.time_mask = axis_from_json(j, "time_mask");
    c.freq_mask = axis_from_json(j, "freq_mask");
    if (j.contains("time_warp") && !j.at("time_warp").is_null()) {
      c.time_warp = TimeWarp{j.at("time_warp").at("max_shift").get<Index>()};
    }
    c.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("fill_value") && j.at("fill_value").is_number()) c.fill_value = j.at("fill_value").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("bad SpecAugment config: ") + e.what());
  }
  return c;
}

nlohmann::json SpecAugmentDraws::to_json() const {
  nlohmann::json j = {{"freq_masks", masks_json(freq_masks)}, {"time_masks", masks_json(time_masks)}};
  j["warp"] = warp ? nlohmann::json{{"anchor", warp->anchor}, {"target", warp->target}} : nlohmann::json(nullptr);
  j["fill_value"] = fill_value ? nlohmann::json(*fill_value) : nlohmann::json(nullptr);
  return j;
}

SpecAugmentDraws draw_spec_augment(const SpecAugmentConfig& config, Index frames, Index bins) {
  config.validate(frames, bins);
  std::mt19937_64 rng(config.seed);
  SpecAugmentDraws draws;
  if (config.time_warp) {
    const Index shift = config.time_warp->max_shift;
    const Index anchor = std::uniform_int_distribution<Index>(shift + 1, frames - 2 - shift)(rng);
    const Index delta = std::uniform_int_distribution<Index>(-shift, shift)(rng);
    draws.warp = WarpDraw{anchor, anchor + delta};
  }
  if (config.freq_mask) draws.freq_masks = draw_masks(*config.freq_mask, bins, rng);
  if (config.time_mask) draws.time_masks = draw_masks(*config.time_mask, frames, rng);
  draws.fill_value = config.fill_value;
  return draws;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MixupDraw sample_mixup(double beta, std::uint64_t seed) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ArgumentError("mixup: beta must be positive");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(beta, 1.0);
  double x = 0.0;
  double y = 0.0;
  // Small shapes can underflow both draws to zero; redraw.
  while (!(x + y > 0.0)) {
    x = gamma(rng);
    y = gamma(rng);
  }
  return {x / (x + y), beta, seed};
}

}  // namespace edc
