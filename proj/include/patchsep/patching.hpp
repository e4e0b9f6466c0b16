// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "patchsep/matrix.hpp"

namespace patchsep {

// Sliding-window grid over a C x M feature matrix. Origins advance by the
// strides and the final origin on each axis is clamped to C-h (resp. M-l)
// so the grid always covers the matrix completely.
struct PatchGridSpec {
  int h = 30;
  int l = 5;
  int stride_freq = 1;
  int stride_time = 1;
  long C = 0;
  long M = 0;

  int patch_dim() const { return h * l; }
};

// Affine feature-scaling parameters (values before min-max mapping).
struct NormStats {
  double floor = 0.0;
  double ceil = 1.0;
};

// Unrolled patches: one channel-major supervector per grid origin.
struct PatchSet {
  Matrix vectors;                                // N x (h*l), entries in [0,1]
  std::vector<std::pair<long, long>> origins;    // N pairs (i, j)
  PatchGridSpec spec;
  NormStats norm;

  std::size_t count() const { return vectors.rows(); }
};

// Clamped, deduplicated origin sequence {0, stride, 2*stride, ..., extent-size}.
std::vector<long> grid_origins(long extent, int size, int stride);

// log(1+x) compression followed by matrix-wide min-max scaling to [0,1].
// A constant input maps to all-zero features with ceil = floor + 1.
std::pair<Matrix, NormStats> to_features(const Matrix& X);

// Inverse of to_features: undo the affine map, apply exp(x)-1, clamp at 0.
Matrix from_features(const Matrix& F, const NormStats& norm);

// One supervector per grid origin, unrolled channel-major:
// entry (c-i)*l + (m-j) holds F(c, m).
PatchSet extract_patches(const Matrix& F, const PatchGridSpec& spec,
                         const NormStats& norm = NormStats{});

// Re-roll supervectors to their window positions; overlapping contributions
// are averaged by per-cell coverage count, uncovered cells are 0.
Matrix overlap_add(const Matrix& values,
                   const std::vector<std::pair<long, long>>& origins,
                   const PatchGridSpec& spec);

}  // namespace patchsep
