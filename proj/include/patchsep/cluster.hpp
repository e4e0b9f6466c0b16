// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <vector>

#include "patchsep/matrix.hpp"

namespace patchsep {

struct KMeansConfig {
  int k = 4;
  int max_iters = 100;
  std::uint64_t seed = 1234;
  int restarts = 10;
};

struct Clustering {
  Matrix centroids;         // k x dim
  std::vector<int> labels;  // one entry per point, in [0, k)
  double inertia = 0.0;     // sum of squared point-to-assigned-centroid distances
};

// Lloyd iterations from k-means++ seeding, several restarts, lowest final
// inertia wins. The returned labels are always the nearest-centroid
// assignment under the returned centroids. Deterministic given the seed.
Clustering kmeans(const Matrix& points, const KMeansConfig& cfg);

// Nearest centroid by squared Euclidean distance; ties take the lowest index.
std::vector<int> assign(const Matrix& centroids, const Matrix& points);

}  // namespace patchsep
