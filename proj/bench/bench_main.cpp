// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

// Micro-benchmark comparing the optimized kernels against the plain serial
// reference implementations that the tests use as oracles. Each section also
// cross-checks the two results, so a run doubles as a consistency check.
//
// Usage: patchsep_bench [reps]   (default 5; best-of-N wall time is reported)

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "patchsep/autoenc.hpp"
#include "patchsep/matrix.hpp"
#include "patchsep/patching.hpp"
#include "patchsep/rng.hpp"
#include "patchsep/spectral.hpp"
#include "reference.hpp"

namespace {

using patchsep::AutoencoderModel;
using patchsep::Matrix;
using patchsep::PatchGridSpec;
using patchsep::PatchSet;
using patchsep::SeededRng;

template <class F>
double best_of(int reps, F&& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const double t =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    best = std::min(best, t);
  }
  return best;
}

void report(const char* name, double serial_s, double fast_s, double diff) {
  std::printf("%-28s %10.3f ms %10.3f ms %7.2fx   max |diff| %.3e\n", name,
              serial_s * 1e3, fast_s * 1e3, serial_s / fast_s, diff);
}

void bench_fft(int reps) {
  const int n = 2048;
  SeededRng rng(11);
  std::vector<std::complex<double>> x(n);
  for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};

  std::vector<std::complex<double>> fast, slow;
  const double t_fast = best_of(reps, [&] { fast = patchsep::fft(x, false); });
  const double t_slow =
      best_of(std::max(1, reps / 2),
              [&] { slow = patchsep::reference::naive_dft(x, false); });

  double diff = 0.0;
  for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(fast[i] - slow[i]));
  report("fft(2048) vs naive dft", t_slow, t_fast, diff);
}

void bench_forward(int reps) {
  const AutoencoderModel m =
      patchsep::init_model({150, 50, 18, 6, 18, 50, 150}, 7);
  SeededRng rng(13);
  Matrix batch(512, 150);
  for (std::size_t r = 0; r < batch.rows(); ++r)
    for (std::size_t c = 0; c < batch.cols(); ++c) batch(r, c) = rng.uniform();

  Matrix fast;
  const double t_fast =
      best_of(reps, [&] { fast = patchsep::forward_batch(m, batch).back(); });

  Matrix slow(batch.rows(), batch.cols());
  const double t_slow = best_of(reps, [&] {
    for (std::size_t r = 0; r < batch.rows(); ++r) {
      std::vector<double> row(batch.cols());
      for (std::size_t c = 0; c < batch.cols(); ++c) row[c] = batch(r, c);
      const auto acts = patchsep::reference::forward_layers(m, row);
      for (std::size_t c = 0; c < batch.cols(); ++c) slow(r, c) = acts.back()[c];
    }
  });

  double diff = 0.0;
  for (std::size_t r = 0; r < batch.rows(); ++r)
    for (std::size_t c = 0; c < batch.cols(); ++c)
      diff = std::max(diff, std::abs(fast(r, c) - slow(r, c)));
  report("forward_batch(512x150)", t_slow, t_fast, diff);
}

void bench_overlap_add(int reps) {
  SeededRng rng(17);
  Matrix f(257, 200);
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t c = 0; c < f.cols(); ++c) f(r, c) = rng.uniform();
  PatchGridSpec spec;  // defaults: 30x5 patches, strides 1
  const PatchSet patches = patchsep::extract_patches(f, spec);

  Matrix fast, slow;
  const double t_fast = best_of(reps, [&] {
    fast = patchsep::overlap_add(patches.vectors, patches.origins, patches.spec);
  });
  const double t_slow = best_of(reps, [&] {
    slow = patchsep::reference::overlap_add_direct(patches.vectors,
                                                   patches.origins,
                                                   patches.spec);
  });

  double diff = 0.0;
  for (std::size_t r = 0; r < f.rows(); ++r)
    for (std::size_t c = 0; c < f.cols(); ++c)
      diff = std::max(diff, std::abs(fast(r, c) - slow(r, c)));
  report("overlap_add(44688 patches)", t_slow, t_fast, diff);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 5;
  std::printf("threads: %d, best of %d runs\n", omp_get_max_threads(), reps);
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "optimized",
              "speedup");
  bench_fft(reps);
  bench_forward(reps);
  bench_overlap_add(reps);
  return 0;
}
