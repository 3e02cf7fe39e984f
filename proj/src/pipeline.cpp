// src/pipeline.cpp

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

#include "edc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <set>
#include <thread>

namespace edc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

nlohmann::json edc_params(const AttenuationConfig& c) {
  return {{"alpha", c.alpha},
          {"cutoff", c.cutoff},
          {"rounding", to_string(c.rounding)},
          {"max_reach", c.reach()}};
}

// Sattolo's shuffle: a uniformly random single cycle, hence no fixed points.
std::vector<std::size_t> derangement(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(0, i - 1)(rng);
    std::swap(p[i], p[j]);
  }
  return p;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto drain = [&] {
    try {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = count;
    }
  };
  if (workers <= 1) {
    drain();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(drain);
  }
  if (failure) std::rethrow_exception(failure);
}

std::string clip_stem(const std::string& path) {
  std::string stem = std::filesystem::path(path).stem().string();
  return stem.empty() ? "clip" : stem;
}

}  // namespace

std::string method_tag(const ConditioningMethod& method) {
  return std::visit(overloaded{[](const NoConditioning&) { return std::string("none"); },
                               [](const EdcMethod&) { return std::string("edc"); },
                               [](const SpecAugmentConfig&) { return std::string("specaug"); },
                               [](const MixupMethod&) { return std::string("mixup"); }},
                    method);
}

nlohmann::json method_params(const ConditioningMethod& method) {
  return std::visit(
      overloaded{[](const NoConditioning&) { return nlohmann::json::object(); },
                 [](const EdcMethod& m) { return edc_params(m.config); },
                 [](const SpecAugmentConfig& c) { return c.to_json(); },
                 [](const MixupMethod& m) { return nlohmann::json{{"beta", m.beta}, {"seed", m.seed}}; }},
      method);
}

DatasetMode parse_mode(const std::string& name) {
  if (name == "om" || name == "OM") return DatasetMode::original_size;
  if (name == "am" || name == "AM") return DatasetMode::augmented;
  throw ArgumentError("mode must be 'om' or 'am', got '" + name + "'");
}

const char* to_string(DatasetMode mode) { return mode == DatasetMode::original_size ? "om" : "am"; }

Index nominal_frames(double duration_s, const SpectrogramConfig& config) {
  return std::max<Index>(1, static_cast<Index>(std::llround(duration_s * 1000.0 / config.hop_ms)));
}

MelSpectrogram pad_to_frames(const MelSpectrogram& spec, Index target_frames) {
  if (target_frames < 1) throw ArgumentError("pad_to_frames: target must be >= 1");
  const Index t = spec.num_frames();
  if (t < 1) throw DataError("pad_to_frames: empty spectrogram");
  MelSpectrogram out{Matrix<double>(target_frames, spec.frames.cols()), spec.frame_rate, spec.config};
  const Index keep = std::min(t, target_frames);
  out.frames.topRows(keep) = spec.frames.topRows(keep);
  for (Index i = keep; i < target_frames; ++i) out.frames.row(i) = spec.frames.row(t - 1);
  return out;
}

std::vector<LabeledClip> condition_clips(const std::vector<LabeledClip>& clips, const ConditioningMethod& method) {
  if (clips.empty()) throw ArgumentError("no clips to condition");
  std::vector<LabeledClip> out = clips;
  const std::string tag = method_tag(method);

  std::visit(
      overloaded{
          [&](const NoConditioning&) {
            for (auto& c : out) {
              c.method = tag;
              c.params = nlohmann::json::object();
            }
          },
          [&](const EdcMethod& m) {
            m.config.validate();
            for (auto& c : out) {
              c.features.frames = apply_edc(c.features.frames, m.config);
              c.method = tag;
              c.params = edc_params(m.config);
            }
          },
          [&](const SpecAugmentConfig& base) {
            for (std::size_t i = 0; i < out.size(); ++i) {
              SpecAugmentConfig config = base;
              config.seed = derive_seed(base.seed, i);
              auto result = spec_augment(out[i].features.frames, config);
              out[i].features.frames = std::move(result.output);
              out[i].method = tag;
              out[i].params = {{"config", config.to_json()}, {"draws", result.draws.to_json()}};
            }
          },
          [&](const MixupMethod& m) {
            if (clips.size() < 2) throw ArgumentError("mixup needs at least two clips");
            const auto partner = derangement(clips.size(), m.seed);
            for (std::size_t i = 0; i < out.size(); ++i) {
              const LabeledClip& a = clips[i];
              const LabeledClip& b = clips[partner[i]];
              const MixupDraw draw = sample_mixup(m.beta, derive_seed(m.seed, i));
              auto mixed = mixup(a.features.frames, a.labels, b.features.frames, b.labels, draw.lambda);
              out[i].features.frames = std::move(mixed.spec);
              out[i].labels = std::move(mixed.labels);
              out[i].method = tag;
              out[i].params = {{"lambda", draw.lambda},
                               {"beta", draw.beta},
                               {"seed", draw.seed},
                               {"partner", b.clip_id}};
            }
          }},
      method);
  return out;
}

std::vector<LabeledClip> build_training_set(const std::vector<LabeledClip>& clips,
                                            const ConditioningMethod& method, DatasetMode mode) {
  if (clips.empty()) throw ArgumentError("build_training_set: no clips");
  std::vector<LabeledClip> conditioned = condition_clips(clips, method);
  if (mode == DatasetMode::original_size) return conditioned;

  std::vector<LabeledClip> out = clips;
  for (auto& c : out) {
    c.method = kOriginalTag;
    c.params = nlohmann::json::object();
  }
  out.insert(out.end(), std::make_move_iterator(conditioned.begin()), std::make_move_iterator(conditioned.end()));
  return out;
}

FeatureTensor to_feature_tensor(const LabeledClip& clip) {
  FeatureTensor tensor;
  tensor.data = clip.features.frames.cast<float>();
  tensor.meta.clip_id = clip.clip_id;
  tensor.meta.method = clip.method;
  tensor.meta.params = {{"conditioning", clip.params},
                        {"labels", clip.labels},
                        {"frame_rate", clip.features.frame_rate},
                        {"spectrogram", clip.features.config.to_json()}};
  return tensor;
}

nlohmann::json BatchSummary::to_json(const BatchOptions& options, const Manifest& manifest) const {
  nlohmann::json failed = nlohmann::json::array();
  for (const auto& f : failures) failed.push_back({{"path", f.path}, {"error", f.error}});
  return {{"version", kVersion},
          {"method", method_tag(options.method)},
          {"mode", to_string(options.mode)},
          {"params", method_params(options.method)},
          {"spectrogram", options.spectrogram.to_json()},
          {"target_frames", options.target_frames ? nlohmann::json(*options.target_frames) : nlohmann::json(nullptr)},
          {"class_names", manifest.class_names},
          {"input_clips", input_clips},
          {"extracted", extracted},
          {"outputs", files.size()},
          {"files", files},
          {"failures", failed}};
}

BatchSummary process_manifest(const Manifest& manifest, const BatchOptions& options) {
  if (manifest.entries.empty()) throw DataError("empty manifest");
  manifest.validate();
  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + options.out_dir.string() + "': " + ec.message());

  const std::size_t n = manifest.entries.size();

  // Clip ids follow file stems; repeated stems get a numeric suffix.
  std::vector<std::string> ids(n);
  {
    std::set<std::string> used;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string stem = clip_stem(manifest.entries[i].path);
      std::string id = stem;
      for (int k = 1; used.count(id) != 0; ++k) id = stem + "_" + std::to_string(k);
      used.insert(id);
      ids[i] = id;
    }
  }

  std::vector<std::optional<LabeledClip>> extracted(n);
  std::vector<Index> nominal(n, 0);
  std::vector<std::string> errors(n);
  parallel_for(n, options.workers, [&](std::size_t i) {
    const ManifestEntry& entry = manifest.entries[i];
    std::filesystem::path path(entry.path);
    if (path.is_relative() && !options.base_dir.empty()) path = options.base_dir / path;
    try {
      const AudioClip clip = load_wav(path);
      nominal[i] = nominal_frames(clip.duration(), options.spectrogram);
      extracted[i] = LabeledClip{ids[i], log_mel(clip, options.spectrogram),
                                 std::vector<double>(entry.labels.begin(), entry.labels.end()), "none",
                                 nlohmann::json::object()};
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  BatchSummary summary;
  summary.input_clips = n;
  // Mixup needs one common shape; otherwise each clip keeps its own length.
  std::optional<Index> common = options.target_frames;
  if (!common && std::holds_alternative<MixupMethod>(options.method)) {
    common = *std::max_element(nominal.begin(), nominal.end());
  }
  std::vector<LabeledClip> clips;
  for (std::size_t i = 0; i < n; ++i) {
    if (extracted[i]) {
      extracted[i]->features = pad_to_frames(extracted[i]->features, common.value_or(nominal[i]));
      clips.push_back(std::move(*extracted[i]));
    } else {
      summary.failures.push_back({manifest.entries[i].path, errors[i]});
    }
  }
  summary.extracted = clips.size();

  if (!clips.empty()) {
    const std::vector<LabeledClip> set = build_training_set(clips, options.method, options.mode);
    summary.files.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
      summary.files[i] = set[i].clip_id + "." + set[i].method + ".edcf";
    }
    parallel_for(set.size(), options.workers, [&](std::size_t i) {
      write_features(to_feature_tensor(set[i]), options.out_dir / summary.files[i]);
    });
  }

  const std::string text = summary.to_json(options, manifest).dump(2) + "\n";
  write_file(options.out_dir / "summary.json", std::vector<std::uint8_t>(text.begin(), text.end()));
  return summary;
}

}  // namespace edc
