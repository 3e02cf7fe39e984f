// include/edc/audio_io.hpp

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

#include "edc/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace edc {

/// Mono audio, amplitudes nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  double sample_rate = 0.0;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
};

/// Decodes a RIFF/WAVE file. Integer PCM (8/16/24/32 bit) is scaled by the
/// type's full-scale value; multichannel audio is averaged down to mono.
///
/// Throws IoError when the file cannot be opened, FormatError when the RIFF
/// structure is broken and UnsupportedEncoding for anything other than
/// integer PCM or 32-bit IEEE float.
AudioClip load_wav(const std::filesystem::path& path);

/// Writes a mono clip as PCM (bits_per_sample 8/16/24/32) or 32-bit float
/// (bits_per_sample 0). Samples are clipped to [-1, 1].
void write_wav(const AudioClip& clip, const std::filesystem::path& path, int bits_per_sample = 16);

struct ManifestEntry {
  std::string path;
  std::vector<std::uint8_t> labels;  // multi-hot, one per class

  bool operator==(const ManifestEntry&) const = default;
};

struct Manifest {
  std::vector<std::string> class_names;
  std::vector<ManifestEntry> entries;

  std::size_t num_classes() const { return class_names.size(); }
  void validate() const;

  bool operator==(const Manifest&) const = default;
};

// CSV with header `path,<class_1>,...,<class_K>` and 0/1 label cells.
Manifest read_manifest(const std::filesystem::path& path);
Manifest parse_manifest(const std::string& text);
void write_manifest(const Manifest& manifest, const std::filesystem::path& path);

struct FeatureMeta {
  std::string clip_id;
  std::string method;
  nlohmann::json params = nlohmann::json::object();

  bool operator==(const FeatureMeta&) const = default;
};

struct FeatureTensor {
  Matrix<float> data;
  FeatureMeta meta;

  Index frames() const { return data.rows(); }
  Index bins() const { return data.cols(); }
};

// Binary layout, all integers little-endian:
//   "EDCF" | version u8 (=1) | T u32 | F u32 | T*F float32, time-major
//   | metadata length u32 | metadata JSON {clip_id, method, params}
inline constexpr char kFeatureMagic[4] = {'E', 'D', 'C', 'F'};
inline constexpr std::uint8_t kFeatureVersion = 1;

std::vector<std::uint8_t> encode_features(const FeatureTensor& tensor);
FeatureTensor decode_features(const std::vector<std::uint8_t>& bytes);

void write_features(const FeatureTensor& tensor, const std::filesystem::path& path);
FeatureTensor read_features(const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);

}  // namespace edc
