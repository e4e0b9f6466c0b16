// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "patchsep/cluster.hpp"
#include "patchsep/errors.hpp"
#include "patchsep/rng.hpp"
#include "reference.hpp"

using namespace patchsep;

namespace {

Matrix from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

// Two well-separated blobs on a line, interleaved row order.
Matrix two_blobs(std::size_t per_side, std::size_t dim, std::uint64_t seed) {
  SeededRng rng(seed);
  Matrix m(2 * per_side, dim);
  for (std::size_t r = 0; r < 2 * per_side; ++r) {
    const double center = (r % 2 == 0) ? 0.0 : 10.0;
    for (std::size_t c = 0; c < dim; ++c) m(r, c) = center + 0.5 * (2.0 * rng.uniform() - 1.0);
  }
  return m;
}

double assigned_inertia(const Matrix& points, const Clustering& cl) {
  double total = 0.0;
  for (std::size_t r = 0; r < points.rows(); ++r) {
    double d2 = 0.0;
    for (std::size_t c = 0; c < points.cols(); ++c) {
      const double diff = points(r, c) - cl.centroids(static_cast<std::size_t>(cl.labels[r]), c);
      d2 += diff * diff;
    }
    total += d2;
  }
  return total;
}

}  // namespace

TEST_CASE("one cluster collapses to the mean of all points") {
  const Matrix pts = from_rows({{1.0, 2.0}, {3.0, 4.0}, {5.0, 6.0}, {-1.0, 0.0}});
  KMeansConfig cfg;
  cfg.k = 1;
  const Clustering cl = kmeans(pts, cfg);
  REQUIRE(cl.centroids.rows() == 1);
  CHECK(cl.centroids(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(cl.centroids(0, 1) == doctest::Approx(3.0).epsilon(1e-12));
  for (int lab : cl.labels) CHECK(lab == 0);
  double expect = 0.0;
  for (std::size_t r = 0; r < pts.rows(); ++r) {
    const double d0 = pts(r, 0) - 2.0;
    const double d1 = pts(r, 1) - 3.0;
    expect += d0 * d0 + d1 * d1;
  }
  CHECK(cl.inertia == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("k equal to the number of distinct points gives zero inertia") {
  const Matrix pts = from_rows({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}, {5.0, 5.0}});
  KMeansConfig cfg;
  cfg.k = 4;
  const Clustering cl = kmeans(pts, cfg);
  CHECK(cl.inertia == doctest::Approx(0.0).epsilon(1e-15));
  std::set<int> used(cl.labels.begin(), cl.labels.end());
  CHECK(used.size() == 4);
}

TEST_CASE("two obvious blobs are split cleanly") {
  const Matrix pts = two_blobs(25, 3, 7);
  KMeansConfig cfg;
  cfg.k = 2;
  const Clustering cl = kmeans(pts, cfg);
  // Every even row shares a label, every odd row shares the other.
  const int even_label = cl.labels[0];
  const int odd_label = cl.labels[1];
  CHECK(even_label != odd_label);
  for (std::size_t r = 0; r < pts.rows(); ++r) {
    CHECK(cl.labels[r] == ((r % 2 == 0) ? even_label : odd_label));
  }
  // Centroid coordinates land near the blob centers.
  for (std::size_t c = 0; c < 3; ++c) {
    const double lo = std::min(cl.centroids(0, c), cl.centroids(1, c));
    const double hi = std::max(cl.centroids(0, c), cl.centroids(1, c));
    CHECK(std::abs(lo - 0.0) < 0.5);
    CHECK(std::abs(hi - 10.0) < 0.5);
  }
}

TEST_CASE("reported inertia matches the assigned-centroid distances") {
  const Matrix pts = two_blobs(12, 4, 11);
  KMeansConfig cfg;
  cfg.k = 3;
  const Clustering cl = kmeans(pts, cfg);
  CHECK(cl.inertia == doctest::Approx(assigned_inertia(pts, cl)).epsilon(1e-12));
}

TEST_CASE("labels are exactly the nearest-centroid assignment") {
  const Matrix pts = two_blobs(10, 5, 13);
  KMeansConfig cfg;
  cfg.k = 4;
  const Clustering cl = kmeans(pts, cfg);
  CHECK(cl.labels == assign(cl.centroids, pts));
}

TEST_CASE("assign breaks distance ties toward the lowest centroid index") {
  const Matrix centroids = from_rows({{-1.0, 0.0}, {1.0, 0.0}});
  const Matrix pts = from_rows({{0.0, 0.0}, {0.0, 5.0}});
  const std::vector<int> labels = assign(centroids, pts);
  CHECK(labels[0] == 0);
  CHECK(labels[1] == 0);
}

TEST_CASE("small instances reach the exhaustive optimum") {
  // Each instance: 4 random 6-D positions duplicated once each (8 points),
  // k = 2. The exhaustive oracle enumerates every one of the 2^8 label
  // assignments, so any gap is a real optimality miss.
  int hits = 0;
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    SeededRng rng(seed);
    Matrix pts(8, 6);
    for (std::size_t p = 0; p < 4; ++p) {
      for (std::size_t c = 0; c < 6; ++c) {
        const double v = 2.0 * rng.uniform() - 1.0;
        pts(2 * p, c) = v;
        pts(2 * p + 1, c) = v;
      }
    }
    KMeansConfig cfg;
    cfg.k = 2;
    cfg.seed = seed;
    const Clustering cl = kmeans(pts, cfg);
    const double best = reference::exhaustive_min_inertia(pts, 2);
    REQUIRE(cl.inertia >= best - 1e-9);  // never better than the true optimum
    if (cl.inertia <= best * (1.0 + 1e-9) + 1e-12) ++hits;
  }
  CHECK(hits >= 19);
}

TEST_CASE("clustering is deterministic given the seed") {
  const Matrix pts = two_blobs(15, 4, 17);
  KMeansConfig cfg;
  cfg.k = 3;
  cfg.seed = 99;
  const Clustering a = kmeans(pts, cfg);
  const Clustering b = kmeans(pts, cfg);
  CHECK(a.labels == b.labels);
  CHECK(a.inertia == b.inertia);
  CHECK(a.centroids.data() == b.centroids.data());
}

TEST_CASE("returned centroids are a fixed point of one more Lloyd step") {
  const Matrix pts = two_blobs(20, 3, 23);
  KMeansConfig cfg;
  cfg.k = 4;
  const Clustering cl = kmeans(pts, cfg);
  // Re-averaging each cluster's members must reproduce the centroids.
  Matrix mean(cl.centroids.rows(), cl.centroids.cols());
  std::vector<int> counts(static_cast<std::size_t>(cfg.k), 0);
  for (std::size_t r = 0; r < pts.rows(); ++r) {
    const auto q = static_cast<std::size_t>(cl.labels[r]);
    ++counts[q];
    for (std::size_t c = 0; c < pts.cols(); ++c) mean(q, c) += pts(r, c);
  }
  for (std::size_t q = 0; q < mean.rows(); ++q) {
    REQUIRE(counts[q] > 0);
    for (std::size_t c = 0; c < mean.cols(); ++c) {
      CHECK(mean(q, c) / counts[q] == doctest::Approx(cl.centroids(q, c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("duplicated points do not confuse the clustering") {
  const Matrix base = two_blobs(6, 2, 29);
  Matrix doubled(base.rows() * 2, base.cols());
  for (std::size_t r = 0; r < base.rows(); ++r) {
    for (std::size_t c = 0; c < base.cols(); ++c) {
      doubled(2 * r, c) = base(r, c);
      doubled(2 * r + 1, c) = base(r, c);
    }
  }
  KMeansConfig cfg;
  cfg.k = 2;
  const Clustering cl = kmeans(doubled, cfg);
  for (std::size_t r = 0; r < base.rows(); ++r) {
    CHECK(cl.labels[2 * r] == cl.labels[2 * r + 1]);
  }
}

TEST_CASE("invalid requests are rejected") {
  SUBCASE("fewer points than clusters") {
    const Matrix pts = from_rows({{0.0}, {1.0}});
    KMeansConfig cfg;
    cfg.k = 3;
    CHECK_THROWS_AS(kmeans(pts, cfg), TooFewPoints);
  }
  SUBCASE("fewer distinct points than clusters") {
    const Matrix pts = from_rows({{1.0, 2.0}, {1.0, 2.0}, {1.0, 2.0}, {0.0, 0.0}});
    KMeansConfig cfg;
    cfg.k = 3;
    CHECK_THROWS_AS(kmeans(pts, cfg), DegenerateInput);
  }
  SUBCASE("nonpositive k") {
    const Matrix pts = from_rows({{0.0}, {1.0}});
    KMeansConfig cfg;
    cfg.k = 0;
    CHECK_THROWS_AS(kmeans(pts, cfg), Error);
  }
  SUBCASE("empty point set") {
    Matrix pts(0, 3);
    KMeansConfig cfg;
    cfg.k = 1;
    CHECK_THROWS_AS(kmeans(pts, cfg), TooFewPoints);
  }
}

TEST_CASE("exact duplicates equal to k distinct rows still succeed") {
  // Three distinct positions, many copies each, k = 3: valid and exact.
  std::vector<std::vector<double>> rows;
  for (int rep = 0; rep < 5; ++rep) {
    rows.push_back({0.0, 0.0});
    rows.push_back({4.0, 4.0});
    rows.push_back({-3.0, 1.0});
  }
  const Matrix pts = from_rows(rows);
  KMeansConfig cfg;
  cfg.k = 3;
  const Clustering cl = kmeans(pts, cfg);
  CHECK(cl.inertia == doctest::Approx(0.0).epsilon(1e-15));
}
