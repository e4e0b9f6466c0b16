// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "patchsep/autoenc.hpp"
#include "patchsep/cluster.hpp"
#include "patchsep/matrix.hpp"
#include "patchsep/patching.hpp"
#include "patchsep/spectral.hpp"
#include "patchsep/wav.hpp"

namespace patchsep {

// Per-cluster time-frequency masks over the mixture spectrogram.
struct MaskSet {
  enum class Mode { kRatio, kBinary };

  std::vector<Matrix> masks;  // k matrices, C x M, entries in [0, 1]
  Mode mode = Mode::kRatio;
};

// Everything the pipeline produces, including the intermediates the CLI
// exports for inspection.
struct SeparationResult {
  std::vector<Waveform> sources;          // one per cluster
  MaskSet masks;
  std::vector<double> cluster_energies;   // sum of each cluster's magnitudes
  std::vector<std::string> artifacts;     // paths written by the caller

  AutoencoderModel model;
  TrainLog train_log;                     // empty when a model was supplied
  Clustering clustering;
  Matrix codes;                           // N x code_size
  std::vector<std::pair<long, long>> origins;
  NormStats norm;
  Spectrogram mixture_spec;
};

// Pipeline tunables; `seed` drives model init, shuffling, and clustering.
struct PipelineConfig {
  double frame_ms = 40.0;
  double hop_ms = 10.0;
  int h = 30;
  int l = 5;
  int stride_freq = 1;
  int stride_time = 1;
  std::vector<int> hidden = {50, 18, 6, 18, 50};
  int k = 4;
  long epochs = 200;
  long batch_size = 128;
  double learning_rate = 1e-3;
  TrainConfig::Optimizer optimizer = TrainConfig::Optimizer::kAdam;
  std::uint64_t seed = 1234;
  MaskSet::Mode mask_mode = MaskSet::Mode::kRatio;
  int kmeans_max_iters = 100;
  int kmeans_restarts = 10;

  // When set, training is skipped and this model is used as-is.
  std::optional<AutoencoderModel> pretrained;
};

// Per-cluster magnitude estimates: reconstruct only the patches labeled q,
// overlap-add them over the cluster's own coverage, map back to magnitudes.
std::vector<Matrix> cluster_magnitudes(const AutoencoderModel& model,
                                       const PatchSet& patches,
                                       const std::vector<int>& labels, int k);

// Ratio masks (S_q + eps/k)/(sum_r S_r + eps), or binary argmax masks with
// ties toward the lowest cluster index.
MaskSet build_masks(const std::vector<Matrix>& estimates, MaskSet::Mode mode,
                    double epsilon = 1e-10);

// Per cluster: magnitude = mask * mixture magnitude, phase = mixture phase.
std::vector<Spectrogram> apply_masks(const Spectrogram& mix, const MaskSet& masks);

// The whole pipeline: analysis, patching, training (or a supplied model),
// encoding, clustering, masking, resynthesis. Deterministic given the seed.
SeparationResult separate(const Waveform& mix, const PipelineConfig& cfg);

}  // namespace patchsep
