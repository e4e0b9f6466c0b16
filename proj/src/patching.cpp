// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#include "patchsep/patching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "patchsep/errors.hpp"

namespace patchsep {

std::vector<long> grid_origins(long extent, int size, int stride) {
  std::vector<long> origins;
  const long last = extent - size;
  for (long o = 0; o < last; o += stride) {
    origins.push_back(o);
  }
  origins.push_back(last);  // clamp so coverage reaches the far edge
  return origins;
}

std::pair<Matrix, NormStats> to_features(const Matrix& X) {
  Matrix F(X.rows(), X.cols());
  const long total = static_cast<long>(X.size());
  double* f = F.data().data();
  const double* x = X.data().data();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    f[i] = std::log1p(x[i]);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (long i = 0; i < total; ++i) {
    lo = std::min(lo, f[i]);
    hi = std::max(hi, f[i]);
  }
  NormStats norm;
  if (total == 0 || hi <= lo) {
    norm.floor = (total == 0) ? 0.0 : lo;
    norm.ceil = norm.floor + 1.0;
    std::fill(f, f + total, 0.0);
    return {std::move(F), norm};
  }
  norm.floor = lo;
  norm.ceil = hi;
  const double scale = 1.0 / (hi - lo);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    f[i] = (f[i] - lo) * scale;
  }
  return {std::move(F), norm};
}

Matrix from_features(const Matrix& F, const NormStats& norm) {
  Matrix X(F.rows(), F.cols());
  const long total = static_cast<long>(F.size());
  const double span = norm.ceil - norm.floor;
  double* x = X.data().data();
  const double* f = F.data().data();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    x[i] = std::max(std::expm1(norm.floor + f[i] * span), 0.0);
  }
  return X;
}

PatchSet extract_patches(const Matrix& F, const PatchGridSpec& spec,
                         const NormStats& norm) {
  if (spec.h < 1 || spec.l < 1 || spec.stride_freq < 1 || spec.stride_time < 1) {
    throw Error("patch sizes and strides must be positive");
  }
  const long C = static_cast<long>(F.rows());
  const long M = static_cast<long>(F.cols());
  if (spec.h > C || spec.l > M) {
    throw PatchLargerThanMatrix("patch " + std::to_string(spec.h) + "x" +
                                std::to_string(spec.l) + " exceeds matrix " +
                                std::to_string(C) + "x" + std::to_string(M));
  }

  PatchSet set;
  set.spec = spec;
  set.spec.C = C;
  set.spec.M = M;
  set.norm = norm;

  const std::vector<long> is = grid_origins(C, spec.h, spec.stride_freq);
  const std::vector<long> js = grid_origins(M, spec.l, spec.stride_time);
  const long n = static_cast<long>(is.size() * js.size());
  const long nj = static_cast<long>(js.size());
  set.vectors = Matrix(n, spec.h * spec.l);
  set.origins.resize(n);

#pragma omp parallel for schedule(static)
  for (long p = 0; p < n; ++p) {
    const long i = is[p / nj];
    const long j = js[p % nj];
    set.origins[p] = {i, j};
    double* row = set.vectors.row(p);
    for (int dc = 0; dc < spec.h; ++dc) {
      const double* src = F.row(i + dc) + j;
      double* dst = row + static_cast<long>(dc) * spec.l;
      for (int dm = 0; dm < spec.l; ++dm) {
        dst[dm] = src[dm];
      }
    }
  }
  return set;
}

Matrix overlap_add(const Matrix& values,
                   const std::vector<std::pair<long, long>>& origins,
                   const PatchGridSpec& spec) {
  const long n = static_cast<long>(values.rows());
  if (static_cast<long>(origins.size()) != n ||
      static_cast<long>(values.cols()) != spec.patch_dim()) {
    throw DimensionMismatch("overlap_add: values/origins/spec disagree");
  }
  const long C = spec.C;
  const long M = spec.M;
  for (const auto& [i, j] : origins) {
    if (i < 0 || j < 0 || i + spec.h > C || j + spec.l > M) {
      throw DimensionMismatch("overlap_add: origin outside the grid");
    }
  }

  // Bucket patches by frequency origin so each output row can be summed by a
  // single owner in a fixed order (origin ascending, then patch index):
  // results are identical no matter how many threads run the row loop.
  std::map<long, std::vector<long>> by_origin;
  for (long p = 0; p < n; ++p) {
    by_origin[origins[p].first].push_back(p);
  }
  std::vector<long> i_keys;
  std::vector<std::vector<long>> i_patches;
  for (auto& [key, list] : by_origin) {
    i_keys.push_back(key);
    i_patches.push_back(std::move(list));
  }

  Matrix sum(C, M);
  std::vector<int> coverage(static_cast<std::size_t>(C) * M, 0);
#pragma omp parallel for schedule(static)
  for (long c = 0; c < C; ++c) {
    double* out_row = sum.row(c);
    int* cov_row = coverage.data() + c * M;
    // Patches with origin i touch rows i .. i+h-1.
    const long first = std::max<long>(0, c - spec.h + 1);
    auto it = std::lower_bound(i_keys.begin(), i_keys.end(), first);
    for (; it != i_keys.end() && *it <= c; ++it) {
      const long i = *it;
      const int dc = static_cast<int>(c - i);
      for (long p : i_patches[it - i_keys.begin()]) {
        const long j = origins[p].second;
        const double* src = values.row(p) + static_cast<long>(dc) * spec.l;
        for (int dm = 0; dm < spec.l; ++dm) {
          out_row[j + dm] += src[dm];
          ++cov_row[j + dm];
        }
      }
    }
    for (long m = 0; m < M; ++m) {
      if (cov_row[m] > 0) out_row[m] /= cov_row[m];
    }
  }
  return sum;
}

}  // namespace patchsep
