// tools/edc_cli.cpp

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

// Command-line front end: extract, condition, batch, ranges, plot.
//
// Exit codes: 0 success, 2 bad arguments, 3 I/O failure, 4 malformed data.

#include "edc/audio_io.hpp"
#include "edc/augment.hpp"
#include "edc/conditioner.hpp"
#include "edc/features.hpp"
#include "edc/heatmap.hpp"
#include "edc/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitArgs = 2;
constexpr int kExitIo = 3;
constexpr int kExitData = 4;

struct SpectrogramFlags {
  edc::SpectrogramConfig config;
  double fmax = 0.0;
  CLI::Option* fmax_opt = nullptr;

  void add(CLI::App* app) {
    app->add_option("--window-ms", config.window_ms, "Analysis window (ms)")->capture_default_str();
    app->add_option("--hop-ms", config.hop_ms, "Hop between frames (ms)")->capture_default_str();
    app->add_option("--n-mels", config.n_mels, "Number of mel bands")->capture_default_str();
    app->add_option("--fmin", config.fmin, "Lowest filter edge (Hz)")->capture_default_str();
    fmax_opt = app->add_option("--fmax", fmax, "Highest filter edge (Hz), default Nyquist");
    app->add_option("--log-floor", config.log_floor, "Energy floor before the log")->capture_default_str();
  }

  edc::SpectrogramConfig resolve() const {
    edc::SpectrogramConfig c = config;
    if (fmax_opt->count() > 0) c.fmax = fmax;
    return c;
  }
};

struct MethodFlags {
  std::string method;
  double alpha = 0.0;
  double cutoff = edc::kDefaultCutoff;
  std::string rounding = "nearest";
  std::string config_path;
  edc::Index time_mask_width = 0;
  edc::Index time_masks = 1;
  edc::Index freq_mask_width = 0;
  edc::Index freq_masks = 1;
  edc::Index time_warp = 0;
  std::uint64_t seed = 0;
  double beta = 0.2;
  double lambda = 1.0;
  std::string partner;

  CLI::Option* alpha_opt = nullptr;
  std::vector<CLI::Option*> edc_opts;
  std::vector<CLI::Option*> specaug_opts;
  std::vector<CLI::Option*> mixup_opts;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* partner_opt = nullptr;

  void add(CLI::App* app, std::vector<std::string> methods, bool with_partner) {
    auto* m = app->add_option("--method", method, "Conditioning method")->check(CLI::IsMember(methods));
    if (with_partner) m->required();
    alpha_opt = app->add_option("--alpha", alpha, "EDC attenuation factor (> 0)");
    edc_opts = {alpha_opt, app->add_option("--cutoff", cutoff, "EDC attenuation cutoff in (0, 1)"),
                app->add_option("--rounding", rounding, "EDC offset rounding: nearest|floor")};
    specaug_opts = {app->add_option("--config", config_path, "SpecAugment JSON config file"),
                    app->add_option("--time-mask-width", time_mask_width, "Max time-mask width (frames)"),
                    app->add_option("--time-masks", time_masks, "Number of time masks"),
                    app->add_option("--freq-mask-width", freq_mask_width, "Max frequency-mask width (bins)"),
                    app->add_option("--freq-masks", freq_masks, "Number of frequency masks"),
                    app->add_option("--time-warp", time_warp, "Max time-warp shift (frames)")};
    beta_opt = app->add_option("--beta", beta, "Mixup Beta(beta, beta) shape");
    mixup_opts = {beta_opt};
    if (with_partner) {
      partner_opt = app->add_option("--partner", partner, "Mixup partner feature file");
      lambda_opt = app->add_option("--lambda", lambda, "Mixup weight of the input in [0, 1]");
      mixup_opts.push_back(partner_opt);
      mixup_opts.push_back(lambda_opt);
    }
    seed_opt = app->add_option("--seed", seed, "Random seed (default: $EDC_SEED or 0)");
  }

  static bool any(const std::vector<CLI::Option*>& opts) {
    for (auto* o : opts) {
      if (o->count() > 0) return true;
    }
    return false;
  }

  std::uint64_t resolved_seed() const {
    if (seed_opt->count() > 0) return seed;
    if (const char* env = std::getenv("EDC_SEED")) {
      try {
        return std::stoull(env);
      } catch (const std::exception&) {
        throw edc::ArgumentError(std::string("EDC_SEED is not an integer: '") + env + "'");
      }
    }
    return 0;
  }

  // Flags belonging to another method are rejected rather than ignored.
  void check_exclusive() const {
    auto reject = [&](const std::vector<CLI::Option*>& opts, const char* family) {
      if (any(opts)) {
        throw edc::ArgumentError(std::string(family) + " flags do not apply to --method " +
                                 (method.empty() ? "none" : method));
      }
    };
    if (method != "edc") reject(edc_opts, "EDC");
    if (method != "specaug") reject(specaug_opts, "SpecAugment");
    if (method != "mixup") reject(mixup_opts, "Mixup");
  }

  edc::AttenuationConfig attenuation() const {
    if (alpha_opt->count() == 0) throw edc::ArgumentError("--method edc requires --alpha");
    edc::AttenuationConfig c{alpha, cutoff, edc::parse_rounding(rounding)};
    c.validate();
    return c;
  }

  edc::SpecAugmentConfig spec_augment() const {
    edc::SpecAugmentConfig c;
    if (!config_path.empty()) {
      const auto bytes = edc::read_file(config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(bytes.begin(), bytes.end());
      } catch (const nlohmann::json::exception& e) {
        throw edc::ArgumentError(std::string("bad SpecAugment config file: ") + e.what());
      }
      c = edc::SpecAugmentConfig::from_json(j);
    }
    if (time_mask_width > 0) c.time_mask = edc::MaskAxis{time_mask_width, time_masks};
    if (freq_mask_width > 0) c.freq_mask = edc::MaskAxis{freq_mask_width, freq_masks};
    if (time_warp > 0) c.time_warp = edc::TimeWarp{time_warp};
    if (seed_opt->count() > 0 || config_path.empty() || std::getenv("EDC_SEED")) c.seed = resolved_seed();
    if (!c.time_mask && !c.freq_mask && !c.time_warp) throw edc::ArgumentError("spec_augment: no axis enabled");
    return c;
  }

  edc::ConditioningMethod conditioning() const {
    check_exclusive();
    if (method.empty() || method == "none") return edc::NoConditioning{};
    if (method == "edc") return edc::EdcMethod{attenuation()};
    if (method == "specaug") return spec_augment();
    return edc::MixupMethod{beta, resolved_seed()};
  }
};

std::string format_alpha(double alpha) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", alpha);
  return buf;
}

int run_extract(const std::string& in, const std::string& out, const SpectrogramFlags& flags,
                std::optional<edc::Index> frames, bool no_pad, std::string clip_id) {
  const edc::SpectrogramConfig config = flags.resolve();
  const edc::AudioClip clip = edc::load_wav(in);
  edc::MelSpectrogram spec = edc::log_mel(clip, config);
  const edc::Index raw_frames = spec.num_frames();
  if (!no_pad) spec = edc::pad_to_frames(spec, frames.value_or(edc::nominal_frames(clip.duration(), config)));

  if (clip_id.empty()) clip_id = std::filesystem::path(in).stem().string();
  edc::LabeledClip labeled{clip_id, spec, {}, "none", nlohmann::json::object()};
  edc::FeatureTensor tensor = edc::to_feature_tensor(labeled);
  tensor.meta.params.erase("labels");
  tensor.meta.params["sample_rate"] = clip.sample_rate;
  tensor.meta.params["raw_frames"] = raw_frames;
  edc::write_features(tensor, out);
  return 0;
}

int run_condition(const std::string& in, const std::string& out, const MethodFlags& flags) {
  flags.check_exclusive();
  const edc::FeatureTensor input = edc::read_features(in);
  const edc::Matrix<double> spec = input.data.cast<double>();
  edc::FeatureTensor output;
  output.meta = input.meta;
  output.meta.method = flags.method;

  nlohmann::json conditioning;
  if (flags.method == "edc") {
    const edc::AttenuationConfig config = flags.attenuation();
    output.data = edc::apply_edc(spec, config).cast<float>();
    conditioning = edc::method_params(edc::EdcMethod{config});
  } else if (flags.method == "specaug") {
    const edc::SpecAugmentConfig config = flags.spec_augment();
    auto result = edc::spec_augment(spec, config);
    output.data = result.output.cast<float>();
    conditioning = {{"config", config.to_json()}, {"draws", result.draws.to_json()}};
  } else {
    if (flags.partner_opt->count() == 0) throw edc::ArgumentError("--method mixup requires --partner");
    const edc::FeatureTensor partner = edc::read_features(flags.partner);
    double lambda = flags.lambda;
    if (flags.lambda_opt->count() == 0) {
      if (flags.beta_opt->count() == 0) throw edc::ArgumentError("--method mixup requires --lambda or --beta");
      lambda = edc::sample_mixup(flags.beta, flags.resolved_seed()).lambda;
    }
    auto labels_of = [](const edc::FeatureTensor& t) {
      const auto& p = t.meta.params;
      return p.is_object() && p.contains("labels") ? p.at("labels").get<std::vector<double>>()
                                                   : std::vector<double>{};
    };
    auto mixed = edc::mixup(spec, labels_of(input), partner.data.cast<double>(), labels_of(partner), lambda);
    output.data = mixed.spec.cast<float>();
    if (!mixed.labels.empty()) output.meta.params["labels"] = mixed.labels;
    conditioning = {{"lambda", lambda}, {"partner", partner.meta.clip_id}};
    if (flags.lambda_opt->count() == 0) {
      conditioning["beta"] = flags.beta;
      conditioning["seed"] = flags.resolved_seed();
    }
  }
  if (!output.meta.params.is_object()) output.meta.params = nlohmann::json::object();
  output.meta.params["conditioning"] = conditioning;
  edc::write_features(output, out);
  return 0;
}

int run_batch(const std::string& manifest_path, const std::string& out_dir, const std::string& mode,
              const SpectrogramFlags& spec_flags, const MethodFlags& method_flags,
              std::optional<edc::Index> frames, unsigned workers) {
  edc::BatchOptions options;
  options.spectrogram = spec_flags.resolve();
  options.method = method_flags.conditioning();
  options.mode = edc::parse_mode(mode);
  options.out_dir = out_dir;
  options.base_dir = std::filesystem::path(manifest_path).parent_path();
  options.target_frames = frames;
  options.workers = workers;

  const edc::Manifest manifest = edc::read_manifest(manifest_path);
  const edc::BatchSummary summary = edc::process_manifest(manifest, options);
  std::cout << summary.files.size() << " feature files written to " << out_dir << " (" << summary.extracted
            << "/" << summary.input_clips << " clips extracted)\n";
  for (const auto& f : summary.failures) std::cerr << "failed: " << f.path << ": " << f.error << "\n";
  return 0;
}

int run_ranges(const std::vector<double>& alphas, double cutoff, std::optional<edc::Index> frames) {
  const auto table = edc::max_reach_table(alphas, cutoff);
  std::cout << (frames ? "alpha\tframes\teffective\n" : "alpha\tframes\n");
  for (const auto& row : table) {
    std::cout << format_alpha(row.alpha) << "\t" << row.frames;
    if (frames) std::cout << "\t" << std::min(row.frames, *frames);
    std::cout << "\n";
  }
  if (frames) {
    for (const auto& row : table) {
      if (row.frames >= *frames) {
        std::cout << "# note: alpha=" << format_alpha(row.alpha) << " spans " << row.frames
                  << " frames, beyond the " << *frames
                  << "-frame clip; attenuation no longer limits the window and EDC tends toward global "
                     "attention\n";
      }
    }
  }
  return 0;
}

int run_plot(const std::string& in, const std::string& compare, const std::string& out) {
  std::vector<edc::GrayImage> panels{edc::render_heatmap(edc::read_features(in).data)};
  if (!compare.empty()) panels.push_back(edc::render_heatmap(edc::read_features(compare).data));
  edc::write_image(panels.size() == 1 ? panels.front() : edc::side_by_side(panels), out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectrogram feature conditioning: EDC, SpecAugment and Mixup"};
  app.set_version_flag("--version", edc::kVersion);
  app.require_subcommand(1);

  // extract
  auto* extract = app.add_subcommand("extract", "Log mel-bank features from a WAV file");
  std::string ex_in, ex_out, ex_id;
  std::optional<edc::Index> ex_frames;
  bool ex_no_pad = false;
  SpectrogramFlags ex_spec;
  extract->add_option("--in", ex_in, "Input WAV")->required();
  extract->add_option("--out", ex_out, "Output .edcf")->required();
  extract->add_option("--frames", ex_frames, "Pad/truncate to this many frames (default: nominal)");
  extract->add_flag("--no-pad", ex_no_pad, "Keep the raw frame count");
  extract->add_option("--clip-id", ex_id, "Clip id stored in the metadata (default: file stem)");
  ex_spec.add(extract);

  // condition
  auto* condition = app.add_subcommand("condition", "Apply EDC, SpecAugment or Mixup to a feature file");
  std::string co_in, co_out;
  MethodFlags co_method;
  condition->add_option("--in", co_in, "Input .edcf")->required();
  condition->add_option("--out", co_out, "Output .edcf")->required();
  co_method.add(condition, {"edc", "specaug", "mixup"}, true);

  // batch
  auto* batch = app.add_subcommand("batch", "Build an OM/AM training set from a manifest");
  std::string ba_manifest, ba_out, ba_mode = "om";
  std::optional<edc::Index> ba_frames;
  unsigned ba_workers = 0;
  SpectrogramFlags ba_spec;
  MethodFlags ba_method;
  batch->add_option("--manifest", ba_manifest, "CSV manifest")->required();
  batch->add_option("--out-dir", ba_out, "Output directory")->required();
  batch->add_option("--mode", ba_mode, "om (replace) or am (append)")->capture_default_str();
  batch->add_option("--frames", ba_frames, "Pad/truncate every clip to this many frames");
  batch->add_option("--workers", ba_workers, "Worker threads (0: all cores)");
  ba_spec.add(batch);
  ba_method.add(batch, {"none", "edc", "specaug", "mixup"}, false);

  // ranges
  auto* ranges = app.add_subcommand("ranges", "Maximum selectable window per attenuation factor");
  std::vector<double> ra_alphas;
  double ra_cutoff = edc::kDefaultCutoff;
  std::optional<edc::Index> ra_frames;
  ranges->add_option("--alphas", ra_alphas, "Comma-separated attenuation factors")->required()->delimiter(',');
  ranges->add_option("--cutoff", ra_cutoff, "Attenuation cutoff")->capture_default_str();
  ranges->add_option("--frames", ra_frames, "Clip length for clamping");

  // plot
  auto* plot = app.add_subcommand("plot", "Render feature files as a grayscale heatmap (PGM or PNG)");
  std::string pl_in, pl_compare, pl_out;
  plot->add_option("--in", pl_in, "Feature file")->required();
  plot->add_option("--compare", pl_compare, "Second feature file shown to the right");
  plot->add_option("--out", pl_out, "Output image (.pgm or .png)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitArgs;
  }

  try {
    if (*extract) return run_extract(ex_in, ex_out, ex_spec, ex_frames, ex_no_pad, ex_id);
    if (*condition) return run_condition(co_in, co_out, co_method);
    if (*batch) return run_batch(ba_manifest, ba_out, ba_mode, ba_spec, ba_method, ba_frames, ba_workers);
    if (*ranges) return run_ranges(ra_alphas, ra_cutoff, ra_frames);
    if (*plot) return run_plot(pl_in, pl_compare, pl_out);
  } catch (const edc::ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitArgs;
  } catch (const edc::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const edc::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitArgs;
}
