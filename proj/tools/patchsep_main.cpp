// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0
//
// Command-line front end: mix synthetic ground-truth mixtures, train the
// patch autoencoder, run the full separation pipeline, inspect learned
// weight windows, and score separations against references.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "patchsep/autoenc.hpp"
#include "patchsep/errors.hpp"
#include "patchsep/evalkit.hpp"
#include "patchsep/exports.hpp"
#include "patchsep/separation.hpp"
#include "patchsep/wav.hpp"

namespace {

using namespace patchsep;

// Post-parse problems that are the caller's fault (exit code 2, like any
// flag-level parse error).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonFlags {
  double frame_ms = 40.0;
  double hop_ms = 10.0;
  int patch_h = 30;
  int patch_l = 5;
  int stride_f = 1;
  int stride_t = 1;
  std::string hidden = "50,18,6,18,50";
  int k = 4;
  long epochs = 200;
  long batch = 128;
  double lr = 1e-3;
  std::string optimizer = "adam";
  std::uint64_t seed = 1234;
  std::string mask_mode = "ratio";
  int threads = 0;
};

void add_analysis_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--frame-ms", f.frame_ms, "Analysis frame length in ms")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--hop-ms", f.hop_ms, "Hop between frames in ms")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--patch-h", f.patch_h, "Patch height in frequency channels")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--patch-l", f.patch_l, "Patch length in frames")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stride-f", f.stride_f, "Patch grid stride across channels")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stride-t", f.stride_t, "Patch grid stride across frames")
      ->check(CLI::PositiveNumber);
}

void add_train_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--hidden", f.hidden,
                  "Comma-separated hidden layer sizes, bottleneck in the middle");
  cmd->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--batch", f.batch, "Minibatch size")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", f.lr, "Learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--optimizer", f.optimizer, "Optimizer")
      ->check(CLI::IsMember({"adam", "sgd"}));
}

void add_seed_flag(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--seed", f.seed,
                  "Seed for init, shuffling, and clustering")
      ->envname("PATCHSEP_SEED");
}

void add_threads_flag(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--threads", f.threads, "Worker thread cap (1 = serial)")
      ->check(CLI::PositiveNumber);
}

void apply_threads(const CommonFlags& f) {
#ifdef _OPENMP
  if (f.threads > 0) omp_set_num_threads(f.threads);
#else
  (void)f;
#endif
}

std::vector<int> parse_hidden(const std::string& text) {
  std::vector<int> sizes;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(cell, &used);
      if (used != cell.size() || v <= 0) throw std::invalid_argument(cell);
      sizes.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--hidden expects positive integers, got '" + cell + "'");
    }
  }
  if (sizes.empty()) throw UsageError("--hidden must name at least one layer");
  return sizes;
}

std::vector<double> parse_gains(const std::string& text, std::size_t count) {
  if (text.empty()) return {};
  std::vector<double> gains;
  std::istringstream in(text);
  std::string cell;
  while (std::getline(in, cell, ',')) {
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
      gains.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--gains expects decibel numbers, got '" + cell + "'");
    }
  }
  if (gains.size() != count) {
    throw UsageError("--gains names " + std::to_string(gains.size()) +
                     " values for " + std::to_string(count) + " inputs");
  }
  return gains;
}

std::string strip_wav_suffix(const std::string& path) {
  if (path.size() > 4 && path.compare(path.size() - 4, 4, ".wav") == 0) {
    return path.substr(0, path.size() - 4);
  }
  return path;
}

void ensure_parent_dir(const std::string& path) {
  const std::filesystem::path parent = std::filesystem::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(parent, ec);
  if (ec) throw IoFailure("cannot create directory " + parent.string());
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_epoch_lines(const TrainLog& log) {
  for (std::size_t e = 0; e < log.epoch_loss.size(); ++e) {
    std::printf("epoch %zu loss %s\n", e + 1, format_double(log.epoch_loss[e]).c_str());
  }
}

TrainConfig::Optimizer optimizer_of(const std::string& name) {
  return name == "sgd" ? TrainConfig::Optimizer::kSgdMomentum
                       : TrainConfig::Optimizer::kAdam;
}

MaskSet::Mode mask_mode_of(const std::string& name) {
  return name == "binary" ? MaskSet::Mode::kBinary : MaskSet::Mode::kRatio;
}

std::string two_digit(std::size_t v) {
  std::string s = std::to_string(v);
  return s.size() < 2 ? "0" + s : s;
}

// ---------------------------------------------------------------------------
// mix

struct MixArgs {
  std::vector<std::string> inputs;
  std::string out;
  std::string gains;
};

int run_mix(const MixArgs& args) {
  std::vector<Waveform> sources;
  sources.reserve(args.inputs.size());
  for (const std::string& path : args.inputs) sources.push_back(read_wav(path));
  const std::vector<double> gains = parse_gains(args.gains, sources.size());

  const MixtureCase mc = make_mixture(sources, gains);
  ensure_parent_dir(args.out);
  write_wav(args.out, mc.mixture);
  std::printf("%s\n", args.out.c_str());
  const std::string stem = strip_wav_suffix(args.out);
  for (std::size_t s = 0; s < mc.references.size(); ++s) {
    const std::string path = stem + ".ref" + std::to_string(s) + ".wav";
    write_wav(path, mc.references[s]);
    std::printf("%s\n", path.c_str());
  }
  return 0;
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::string input;
  std::string model_out;
  CommonFlags flags;
};

int run_train(const TrainArgs& args) {
  apply_threads(args.flags);
  const Waveform mix = read_wav(args.input);
  const Spectrogram spec =
      stft(mix, FrameParams::from_ms(args.flags.frame_ms, args.flags.hop_ms,
                                     mix.sample_rate_hz));
  auto [features, norm] = to_features(spec.magnitude);

  PatchGridSpec grid;
  grid.h = args.flags.patch_h;
  grid.l = args.flags.patch_l;
  grid.stride_freq = args.flags.stride_f;
  grid.stride_time = args.flags.stride_t;
  const PatchSet patches = extract_patches(features, grid, norm);

  std::vector<int> sizes;
  sizes.push_back(grid.patch_dim());
  for (int s : parse_hidden(args.flags.hidden)) sizes.push_back(s);
  sizes.push_back(grid.patch_dim());
  AutoencoderModel model = init_model(sizes, args.flags.seed);

  TrainConfig tc;
  tc.optimizer = optimizer_of(args.flags.optimizer);
  tc.learning_rate = args.flags.lr;
  tc.batch_size = args.flags.batch;
  tc.epochs = args.flags.epochs;
  tc.seed = args.flags.seed;
  auto [trained, log] = train(std::move(model), patches, tc);
  print_epoch_lines(log);
  ensure_parent_dir(args.model_out);
  save_model(trained, args.model_out);
  return 0;
}

// ---------------------------------------------------------------------------
// separate

struct SeparateArgs {
  std::string input;
  std::string out;
  std::string model;
  bool train_inline = false;
  std::string export_dir;
  CommonFlags flags;
};

void write_manifest(const std::string& path, const SeparateArgs& args,
                    const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string out;
  auto add = [&out](const std::string& key, const std::string& value) {
    out += key + "=" + value + "\n";
  };
  add("command", "separate");
  add("input", args.input);
  add("input_fnv1a", fnv1a_file_hex(args.input));
  add("frame_ms", format_double(args.flags.frame_ms));
  add("hop_ms", format_double(args.flags.hop_ms));
  add("patch_h", std::to_string(args.flags.patch_h));
  add("patch_l", std::to_string(args.flags.patch_l));
  add("stride_f", std::to_string(args.flags.stride_f));
  add("stride_t", std::to_string(args.flags.stride_t));
  add("hidden", args.flags.hidden);
  add("k", std::to_string(args.flags.k));
  add("epochs", std::to_string(args.flags.epochs));
  add("batch", std::to_string(args.flags.batch));
  add("lr", format_double(args.flags.lr));
  add("optimizer", args.flags.optimizer);
  add("seed", std::to_string(args.flags.seed));
  add("mask_mode", args.flags.mask_mode);
  add("threads", std::to_string(args.flags.threads));
  for (const auto& [key, value] : entries) add(key, value);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open " + path + " for writing");
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoFailure("short write to " + path);
}

int run_separate(const SeparateArgs& args) {
  if (!args.model.empty() && args.train_inline) {
    throw UsageError("--model and --train-inline are mutually exclusive");
  }
  apply_threads(args.flags);
  const Waveform mix = read_wav(args.input);

  PipelineConfig cfg;
  cfg.frame_ms = args.flags.frame_ms;
  cfg.hop_ms = args.flags.hop_ms;
  cfg.h = args.flags.patch_h;
  cfg.l = args.flags.patch_l;
  cfg.stride_freq = args.flags.stride_f;
  cfg.stride_time = args.flags.stride_t;
  cfg.hidden = parse_hidden(args.flags.hidden);
  cfg.k = args.flags.k;
  cfg.epochs = args.flags.epochs;
  cfg.batch_size = args.flags.batch;
  cfg.learning_rate = args.flags.lr;
  cfg.optimizer = optimizer_of(args.flags.optimizer);
  cfg.seed = args.flags.seed;
  cfg.mask_mode = mask_mode_of(args.flags.mask_mode);
  if (!args.model.empty()) cfg.pretrained = load_model(args.model);

  const SeparationResult result = separate(mix, cfg);
  print_epoch_lines(result.train_log);
  ensure_parent_dir(args.out);

  std::vector<std::pair<std::string, std::string>> entries;
  std::string model_file = args.model;
  if (args.model.empty()) {
    model_file = args.out + ".model.txt";
    save_model(result.model, model_file);
    entries.emplace_back("model_source", "inline");
  } else {
    entries.emplace_back("model_source", "file");
  }
  entries.emplace_back("model_file", model_file);
  entries.emplace_back("model_fnv1a", fnv1a_file_hex(model_file));

  for (std::size_t q = 0; q < result.sources.size(); ++q) {
    const std::string path = args.out + ".cluster" + std::to_string(q) + ".wav";
    write_wav(path, result.sources[q]);
    std::printf("%s\n", path.c_str());
    entries.emplace_back("cluster_" + std::to_string(q) + "_file", path);
    entries.emplace_back("cluster_" + std::to_string(q) + "_fnv1a",
                         fnv1a_file_hex(path));
    entries.emplace_back("cluster_" + std::to_string(q) + "_energy",
                         format_double(result.cluster_energies[q]));
  }

  if (!args.export_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(args.export_dir, ec);
    if (ec) throw IoFailure("cannot create " + args.export_dir);
    std::vector<std::string> artifacts;
    auto in_dir = [&args](const std::string& name) {
      return (fs::path(args.export_dir) / name).string();
    };

    export_pgm(result.mixture_spec.magnitude, in_dir("spectrogram.pgm"),
               PgmScaling::kMinMax);
    artifacts.push_back(in_dir("spectrogram.pgm"));
    export_matrix_csv(result.mixture_spec.magnitude, in_dir("spectrogram.csv"));
    artifacts.push_back(in_dir("spectrogram.csv"));

    const Matrix features = to_features(result.mixture_spec.magnitude).first;
    export_pgm(features, in_dir("features.pgm"), PgmScaling::kAbsolute);
    artifacts.push_back(in_dir("features.pgm"));
    export_matrix_csv(features, in_dir("features.csv"));
    artifacts.push_back(in_dir("features.csv"));

    for (std::size_t q = 0; q < result.masks.masks.size(); ++q) {
      const std::string pgm = in_dir("mask_" + std::to_string(q) + ".pgm");
      const std::string csv = in_dir("mask_" + std::to_string(q) + ".csv");
      export_pgm(result.masks.masks[q], pgm, PgmScaling::kAbsolute);
      export_matrix_csv(result.masks.masks[q], csv);
      artifacts.push_back(pgm);
      artifacts.push_back(csv);
    }

    export_clustering_csv(result.clustering.labels, result.codes, result.origins,
                          in_dir("clustering.csv"));
    artifacts.push_back(in_dir("clustering.csv"));

    entries.emplace_back("export_dir", args.export_dir);
    for (std::size_t a = 0; a < artifacts.size(); ++a) {
      entries.emplace_back("artifact_" + std::to_string(a), artifacts[a]);
      entries.emplace_back("artifact_" + std::to_string(a) + "_fnv1a",
                           fnv1a_file_hex(artifacts[a]));
    }
  }

  const std::string manifest = args.out + ".manifest.txt";
  write_manifest(manifest, args, entries);
  std::printf("%s\n", manifest.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// inspect

struct InspectArgs {
  std::string model;
  std::string export_dir = ".";
  CommonFlags flags;
};

int run_inspect(const InspectArgs& args) {
  const AutoencoderModel model = load_model(args.model);
  PatchGridSpec grid;
  grid.h = args.flags.patch_h;
  grid.l = args.flags.patch_l;
  const std::vector<Matrix> windows = export_weight_windows(model, grid);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(args.export_dir, ec);
  if (ec) throw IoFailure("cannot create " + args.export_dir);

  Matrix raw(windows.size(), static_cast<std::size_t>(grid.patch_dim()));
  for (std::size_t u = 0; u < windows.size(); ++u) {
    const std::string path =
        (fs::path(args.export_dir) / ("weight_window_" + two_digit(u) + ".pgm"))
            .string();
    export_pgm(windows[u], path, PgmScaling::kMinMax);
    std::printf("%s\n", path.c_str());
    for (int c = 0; c < grid.h; ++c) {
      for (int t = 0; t < grid.l; ++t) {
        raw(u, static_cast<std::size_t>(c) * grid.l + t) =
            windows[u](static_cast<std::size_t>(c), static_cast<std::size_t>(t));
      }
    }
  }
  const std::string csv = (fs::path(args.export_dir) / "weight_windows.csv").string();
  export_matrix_csv(raw, csv);
  std::printf("%s\n", csv.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::vector<std::string> refs;
  std::vector<std::string> ests;
};

int run_eval(const EvalArgs& args) {
  std::vector<Waveform> refs, ests;
  for (const std::string& path : args.refs) refs.push_back(read_wav(path));
  for (const std::string& path : args.ests) ests.push_back(read_wav(path));
  const EvalResult result = best_permutation_score(refs, ests);
  std::fputs(eval_report_csv(result).c_str(), stdout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised single-channel source separation via "
               "spectro-temporal patch autoencoding"};
  app.require_subcommand(1);

  MixArgs mix_args;
  CLI::App* mix = app.add_subcommand(
      "mix", "Sum sources into a peak-normalized mixture with stored references");
  mix->add_option("inputs", mix_args.inputs, "Source WAV files (two or more)")
      ->required()
      ->expected(2, -1);
  mix->add_option("--out", mix_args.out, "Mixture WAV path")->required();
  mix->add_option("--gains", mix_args.gains,
                  "Comma-separated per-source gains in dB (default 0)");

  TrainArgs train_args;
  CLI::App* train_cmd =
      app.add_subcommand("train", "Train the patch autoencoder on a mixture");
  train_cmd->add_option("input", train_args.input, "Mixture WAV")->required();
  train_cmd->add_option("--model-out", train_args.model_out, "Model file to write")
      ->required();
  add_analysis_flags(train_cmd, train_args.flags);
  add_train_flags(train_cmd, train_args.flags);
  add_seed_flag(train_cmd, train_args.flags);
  add_threads_flag(train_cmd, train_args.flags);

  SeparateArgs sep_args;
  CLI::App* sep = app.add_subcommand(
      "separate", "Separate a mixture into one WAV per cluster");
  sep->add_option("input", sep_args.input, "Mixture WAV")->required();
  sep->add_option("--out", sep_args.out, "Output stem for cluster WAVs")->required();
  sep->add_option("--model", sep_args.model, "Load this model instead of training");
  sep->add_flag("--train-inline", sep_args.train_inline,
                "Train on the mixture itself (default when --model is absent)");
  sep->add_option("--k", sep_args.flags.k, "Number of clusters")
      ->check(CLI::PositiveNumber);
  sep->add_option("--mask-mode", sep_args.flags.mask_mode, "Mask construction")
      ->check(CLI::IsMember({"ratio", "binary"}));
  sep->add_option("--export-dir", sep_args.export_dir,
                  "Directory for spectrogram/feature/mask/clustering exports");
  add_analysis_flags(sep, sep_args.flags);
  add_train_flags(sep, sep_args.flags);
  add_seed_flag(sep, sep_args.flags);
  add_threads_flag(sep, sep_args.flags);

  InspectArgs ins_args;
  CLI::App* ins = app.add_subcommand(
      "inspect", "Export a model's decoder weight windows as images");
  ins->add_option("model", ins_args.model, "Model file")->required();
  ins->add_option("--export-dir", ins_args.export_dir, "Output directory");
  ins->add_option("--patch-h", ins_args.flags.patch_h, "Patch height")
      ->check(CLI::PositiveNumber);
  ins->add_option("--patch-l", ins_args.flags.patch_l, "Patch length")
      ->check(CLI::PositiveNumber);

  EvalArgs eval_args;
  CLI::App* eva = app.add_subcommand(
      "eval", "Score estimates against references (best-permutation SNR)");
  eva->add_option("--ref", eval_args.refs, "Reference WAV (repeatable)")->required();
  eva->add_option("--est", eval_args.ests, "Estimate WAV (repeatable)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (mix->parsed()) return run_mix(mix_args);
    if (train_cmd->parsed()) return run_train(train_args);
    if (sep->parsed()) return run_separate(sep_args);
    if (ins->parsed()) return run_inspect(ins_args);
    if (eva->parsed()) return run_eval(eval_args);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
