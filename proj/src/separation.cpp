// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#include "patchsep/separation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "patchsep/errors.hpp"

namespace patchsep {

std::vector<Matrix> cluster_magnitudes(const AutoencoderModel& model,
                                       const PatchSet& patches,
                                       const std::vector<int>& labels, int k) {
  const long n = static_cast<long>(patches.count());
  if (static_cast<long>(labels.size()) != n) {
    throw DimensionMismatch("label count does not match patch count");
  }
  const long dim = static_cast<long>(patches.vectors.cols());

  std::vector<Matrix> result;
  result.reserve(k);
  for (int q = 0; q < k; ++q) {
    std::vector<long> members;
    for (long p = 0; p < n; ++p) {
      if (labels[p] == q) members.push_back(p);
    }
    if (members.empty()) {
      // No patches: an all-zero feature matrix, mapped to magnitude space.
      Matrix empty(patches.spec.C, patches.spec.M);
      result.push_back(from_features(empty, patches.norm));
      continue;
    }
    Matrix rows(members.size(), dim);
    std::vector<std::pair<long, long>> origins(members.size());
    for (std::size_t r = 0; r < members.size(); ++r) {
      const double* src = patches.vectors.row(members[r]);
      std::copy(src, src + dim, rows.row(r));
      origins[r] = patches.origins[members[r]];
    }
    const Matrix outputs = reconstruct(model, rows);
    const Matrix features = overlap_add(outputs, origins, patches.spec);
    result.push_back(from_features(features, patches.norm));
  }
  return result;
}

MaskSet build_masks(const std::vector<Matrix>& estimates, MaskSet::Mode mode,
                    double epsilon) {
  if (estimates.empty()) {
    throw DimensionMismatch("no magnitude estimates given");
  }
  const int k = static_cast<int>(estimates.size());
  const long total = static_cast<long>(estimates[0].size());
  for (const Matrix& s : estimates) {
    if (!s.same_shape(estimates[0])) {
      throw DimensionMismatch("magnitude estimates differ in shape");
    }
    for (double v : s.data()) {
      if (v < 0.0) throw NegativeMagnitude("magnitude estimate below zero");
    }
  }

  MaskSet set;
  set.mode = mode;
  for (int q = 0; q < k; ++q) {
    set.masks.emplace_back(estimates[0].rows(), estimates[0].cols());
  }

  if (mode == MaskSet::Mode::kRatio) {
    const double share = epsilon / k;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) {
      double denom = epsilon;
      for (int q = 0; q < k; ++q) denom += estimates[q].data()[i];
      for (int q = 0; q < k; ++q) {
        set.masks[q].data()[i] = (estimates[q].data()[i] + share) / denom;
      }
    }
  } else {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) {
      int arg = 0;
      double best = estimates[0].data()[i];
      for (int q = 1; q < k; ++q) {
        if (estimates[q].data()[i] > best) {
          best = estimates[q].data()[i];
          arg = q;
        }
      }
      set.masks[arg].data()[i] = 1.0;
    }
  }
  return set;
}

std::vector<Spectrogram> apply_masks(const Spectrogram& mix, const MaskSet& masks) {
  std::vector<Spectrogram> out;
  out.reserve(masks.masks.size());
  for (const Matrix& mask : masks.masks) {
    if (!mask.same_shape(mix.magnitude)) {
      throw ShapeMismatch("mask shape does not match the mixture spectrogram");
    }
    Spectrogram s;
    s.params = mix.params;
    s.sample_rate_hz = mix.sample_rate_hz;
    s.phase = mix.phase;
    s.magnitude = Matrix(mix.magnitude.rows(), mix.magnitude.cols());
    const long total = static_cast<long>(mask.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) {
      s.magnitude.data()[i] = mask.data()[i] * mix.magnitude.data()[i];
    }
    out.push_back(std::move(s));
  }
  return out;
}

SeparationResult separate(const Waveform& mix, const PipelineConfig& cfg) {
  const FrameParams params =
      FrameParams::from_ms(cfg.frame_ms, cfg.hop_ms, mix.sample_rate_hz);

  SeparationResult result;
  result.mixture_spec = stft(mix, params);
  const Spectrogram& spec = result.mixture_spec;

  auto [features, norm] = to_features(spec.magnitude);
  result.norm = norm;

  PatchGridSpec grid;
  grid.h = cfg.h;
  grid.l = cfg.l;
  grid.stride_freq = cfg.stride_freq;
  grid.stride_time = cfg.stride_time;
  const PatchSet patches = extract_patches(features, grid, norm);
  result.origins = patches.origins;

  if (cfg.pretrained.has_value()) {
    result.model = *cfg.pretrained;
    if (result.model.input_size() != grid.h * grid.l) {
      throw DimensionMismatch("supplied model input size " +
                              std::to_string(result.model.input_size()) +
                              " does not match patch dimension " +
                              std::to_string(grid.h * grid.l));
    }
  } else {
    std::vector<int> sizes;
    sizes.push_back(grid.h * grid.l);
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(grid.h * grid.l);
    AutoencoderModel model = init_model(sizes, cfg.seed);

    TrainConfig tc;
    tc.optimizer = cfg.optimizer;
    tc.learning_rate = cfg.learning_rate;
    tc.batch_size = cfg.batch_size;
    tc.epochs = cfg.epochs;
    tc.seed = cfg.seed;
    auto [trained, log] = train(std::move(model), patches, tc);
    result.model = std::move(trained);
    result.train_log = std::move(log);
  }

  result.codes = encode(result.model, patches);

  KMeansConfig kc;
  kc.k = cfg.k;
  kc.seed = cfg.seed;
  kc.max_iters = cfg.kmeans_max_iters;
  kc.restarts = cfg.kmeans_restarts;
  result.clustering = kmeans(result.codes, kc);

  const std::vector<Matrix> estimates = cluster_magnitudes(
      result.model, patches, result.clustering.labels, cfg.k);
  result.cluster_energies.reserve(cfg.k);
  for (const Matrix& s : estimates) {
    result.cluster_energies.push_back(
        std::accumulate(s.data().begin(), s.data().end(), 0.0));
  }

  result.masks = build_masks(estimates, cfg.mask_mode);
  const std::vector<Spectrogram> masked = apply_masks(spec, result.masks);
  result.sources.reserve(masked.size());
  for (const Spectrogram& s : masked) {
    result.sources.push_back(istft(s));
  }
  return result;
}

}  // namespace patchsep
