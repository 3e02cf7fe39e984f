// include/edc/pipeline.hpp

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
#include "edc/augment.hpp"
#include "edc/conditioner.hpp"
#include "edc/features.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace edc {

struct LabeledClip {
  std::string clip_id;
  MelSpectrogram features;
  std::vector<double> labels;  // y_k in [0, 1]; binary unless mixed
  std::string method = "none";
  nlohmann::json params = nlohmann::json::object();
};

struct NoConditioning {};

struct EdcMethod {
  AttenuationConfig config;
};

struct MixupMethod {
  double beta = 0.2;
  std::uint64_t seed = 0;
};

using ConditioningMethod = std::variant<NoConditioning, EdcMethod, SpecAugmentConfig, MixupMethod>;

/// "none", "edc", "specaug" or "mixup"; also the file-name tag.
std::string method_tag(const ConditioningMethod& method);
nlohmann::json method_params(const ConditioningMethod& method);

// Tag carried by the untouched half of an augmented-mode set.
inline constexpr const char* kOriginalTag = "orig";

enum class DatasetMode { original_size, augmented };

DatasetMode parse_mode(const std::string& name);  // "om" | "am"
const char* to_string(DatasetMode mode);

/// Frame count a clip of `duration_s` seconds nominally has at the configured hop.
Index nominal_frames(double duration_s, const SpectrogramConfig& config);

/// Edge-replicates the last frame up to `target_frames`, or drops the tail.
MelSpectrogram pad_to_frames(const MelSpectrogram& spec, Index target_frames);

/// The conditioned version of every clip, in input order. Mixup partners come
/// from a seeded derangement, so no clip is mixed with itself.
std::vector<LabeledClip> condition_clips(const std::vector<LabeledClip>& clips, const ConditioningMethod& method);

/// Original-size mode replaces every clip with its conditioned version (None
/// leaves clips as they are). Augmented mode appends the conditioned versions
/// after the originals, doubling the set; with None each clip appears twice.
std::vector<LabeledClip> build_training_set(const std::vector<LabeledClip>& clips,
                                            const ConditioningMethod& method, DatasetMode mode);

/// Stores a clip as a float32 feature tensor; labels and conditioning
/// parameters travel in the metadata.
FeatureTensor to_feature_tensor(const LabeledClip& clip);

struct BatchOptions {
  SpectrogramConfig spectrogram;
  ConditioningMethod method = NoConditioning{};
  DatasetMode mode = DatasetMode::original_size;
  std::filesystem::path out_dir;
  // Relative manifest paths are resolved against this directory.
  std::filesystem::path base_dir;
  // Pad/truncate target; per-clip nominal frame count when unset.
  std::optional<Index> target_frames;
  unsigned workers = 0;  // 0: hardware concurrency
};

struct ClipFailure {
  std::string path;
  std::string error;
};

struct BatchSummary {
  std::size_t input_clips = 0;
  std::size_t extracted = 0;
  std::vector<std::string> files;  // in output order, relative to out_dir
  std::vector<ClipFailure> failures;
  nlohmann::json to_json(const BatchOptions& options, const Manifest& manifest) const;
};

/// Extracts, pads, conditions and serializes every manifest entry into
/// `<out_dir>/<clip_id>.<method>.edcf`, then writes `<out_dir>/summary.json`.
/// A clip that fails to decode or extract is recorded and skipped.
BatchSummary process_manifest(const Manifest& manifest, const BatchOptions& options);

}  // namespace edc
