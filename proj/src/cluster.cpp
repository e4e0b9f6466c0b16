// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#include "patchsep/cluster.hpp"

#include <algorithm>
#include <limits>

#include "patchsep/errors.hpp"
#include "patchsep/rng.hpp"

namespace patchsep {

namespace {

double sq_dist(const double* a, const double* b, long dim) {
  double acc = 0.0;
  for (long i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

long count_distinct(const Matrix& points, long at_least) {
  const long n = static_cast<long>(points.rows());
  const long dim = static_cast<long>(points.cols());
  std::vector<long> idx(n);
  for (long i = 0; i < n; ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](long a, long b) {
    return std::lexicographical_compare(points.row(a), points.row(a) + dim,
                                        points.row(b), points.row(b) + dim);
  });
  long distinct = n > 0 ? 1 : 0;
  for (long i = 1; i < n && distinct < at_least; ++i) {
    if (!std::equal(points.row(idx[i - 1]), points.row(idx[i - 1]) + dim,
                    points.row(idx[i]))) {
      ++distinct;
    }
  }
  return distinct;
}

Matrix seed_plusplus(const Matrix& points, int k, SeededRng& rng) {
  const long n = static_cast<long>(points.rows());
  const long dim = static_cast<long>(points.cols());
  Matrix centroids(k, dim);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());

  long pick = static_cast<long>(rng.index(static_cast<std::size_t>(n)));
  std::copy(points.row(pick), points.row(pick) + dim, centroids.row(0));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (long p = 0; p < n; ++p) {
      d2[p] = std::min(d2[p], sq_dist(points.row(p), centroids.row(c - 1), dim));
      total += d2[p];
    }
    // total > 0 is guaranteed: fewer centroids than distinct points exist.
    const double target = rng.uniform() * total;
    double run = 0.0;
    pick = n - 1;
    for (long p = 0; p < n; ++p) {
      run += d2[p];
      if (run > target) {
        pick = p;
        break;
      }
    }
    std::copy(points.row(pick), points.row(pick) + dim, centroids.row(c));
  }
  return centroids;
}

double total_inertia(const Matrix& points, const Matrix& centroids,
                     const std::vector<int>& labels) {
  double acc = 0.0;
  const long dim = static_cast<long>(points.cols());
  for (long p = 0; p < static_cast<long>(points.rows()); ++p) {
    acc += sq_dist(points.row(p), centroids.row(labels[p]), dim);
  }
  return acc;
}

// Means of each label group; an empty cluster is reseeded to the point
// farthest from its assigned centroid (ties toward the lowest point index),
// each repair consuming a distinct point.
Matrix recompute_centroids(const Matrix& points, const std::vector<int>& labels,
                           int k) {
  const long n = static_cast<long>(points.rows());
  const long dim = static_cast<long>(points.cols());
  Matrix centroids(k, dim);
  std::vector<long> counts(k, 0);
  for (long p = 0; p < n; ++p) {
    double* c = centroids.row(labels[p]);
    const double* x = points.row(p);
    for (long j = 0; j < dim; ++j) c[j] += x[j];
    ++counts[labels[p]];
  }
  for (int q = 0; q < k; ++q) {
    if (counts[q] > 0) {
      double* c = centroids.row(q);
      for (long j = 0; j < dim; ++j) c[j] /= static_cast<double>(counts[q]);
    }
  }
  std::vector<bool> taken(n, false);
  for (int q = 0; q < k; ++q) {
    if (counts[q] > 0) continue;
    long best = -1;
    double best_d = -1.0;
    for (long p = 0; p < n; ++p) {
      if (taken[p] || counts[labels[p]] == 0) continue;
      const double d = sq_dist(points.row(p), centroids.row(labels[p]), dim);
      if (d > best_d) {
        best_d = d;
        best = p;
      }
    }
    taken[best] = true;
    std::copy(points.row(best), points.row(best) + dim, centroids.row(q));
  }
  return centroids;
}

}  // namespace

std::vector<int> assign(const Matrix& centroids, const Matrix& points) {
  if (centroids.cols() != points.cols()) {
    throw DimensionMismatch("centroid and point dimensions differ");
  }
  const long n = static_cast<long>(points.rows());
  const long k = static_cast<long>(centroids.rows());
  const long dim = static_cast<long>(points.cols());
  std::vector<int> labels(n, 0);
#pragma omp parallel for schedule(static)
  for (long p = 0; p < n; ++p) {
    double best = sq_dist(points.row(p), centroids.row(0), dim);
    int arg = 0;
    for (long q = 1; q < k; ++q) {
      const double d = sq_dist(points.row(p), centroids.row(q), dim);
      if (d < best) {
        best = d;
        arg = static_cast<int>(q);
      }
    }
    labels[p] = arg;
  }
  return labels;
}

Clustering kmeans(const Matrix& points, const KMeansConfig& cfg) {
  const long n = static_cast<long>(points.rows());
  if (cfg.k < 1 || cfg.max_iters < 1 || cfg.restarts < 1) {
    throw Error("kmeans config requires k, max_iters, restarts >= 1");
  }
  if (n < cfg.k) {
    throw TooFewPoints("need at least " + std::to_string(cfg.k) +
                       " points, got " + std::to_string(n));
  }
  if (count_distinct(points, cfg.k) < cfg.k) {
    throw DegenerateInput("fewer than k distinct points");
  }

  SeededRng rng(cfg.seed);
  Clustering best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Matrix centroids = seed_plusplus(points, cfg.k, rng);
    std::vector<int> labels = assign(centroids, points);
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
      centroids = recompute_centroids(points, labels, cfg.k);
      std::vector<int> next = assign(centroids, points);
      const bool stable = (next == labels);
      labels = std::move(next);
      if (stable) break;
    }
    const double inertia = total_inertia(points, centroids, labels);
    if (inertia < best.inertia) {
      best.centroids = std::move(centroids);
      best.labels = std::move(labels);
      best.inertia = inertia;
    }
  }
  return best;
}

}  // namespace patchsep
