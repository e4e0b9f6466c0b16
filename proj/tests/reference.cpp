// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace patchsep::reference {

std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x, bool inverse) {
  const std::size_t n = x.size();
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t t = 0; t < n; ++t) {
      const double phi = sign * 2.0 * std::numbers::pi *
                         static_cast<double>(k) * static_cast<double>(t) /
                         static_cast<double>(n);
      acc += x[t] * std::complex<double>{std::cos(phi), std::sin(phi)};
    }
    out[k] = inverse ? acc / static_cast<double>(n) : acc;
  }
  return out;
}

std::vector<std::vector<double>> forward_layers(const AutoencoderModel& m,
                                                const std::vector<double>& v) {
  std::vector<std::vector<double>> acts;
  acts.push_back(v);
  for (std::size_t t = 0; t < m.transitions(); ++t) {
    const Matrix& w = m.weights[t];
    std::vector<double> next(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double z = m.biases[t][i];
      for (std::size_t j = 0; j < w.cols(); ++j) {
        z += w(i, j) * acts.back()[j];
      }
      next[i] = 1.0 / (1.0 + std::exp(-z));
    }
    acts.push_back(std::move(next));
  }
  return acts;
}

Matrix overlap_add_direct(const Matrix& values,
                          const std::vector<std::pair<long, long>>& origins,
                          const PatchGridSpec& spec) {
  Matrix sum(spec.C, spec.M);
  Matrix count(spec.C, spec.M);
  for (std::size_t p = 0; p < values.rows(); ++p) {
    const auto [i, j] = origins[p];
    for (int dc = 0; dc < spec.h; ++dc) {
      for (int dm = 0; dm < spec.l; ++dm) {
        sum(i + dc, j + dm) += values(p, static_cast<std::size_t>(dc) * spec.l + dm);
        count(i + dc, j + dm) += 1.0;
      }
    }
  }
  for (std::size_t idx = 0; idx < sum.size(); ++idx) {
    if (count.data()[idx] > 0.0) sum.data()[idx] /= count.data()[idx];
  }
  return sum;
}

double exhaustive_min_inertia(const Matrix& points, int k) {
  const long n = static_cast<long>(points.rows());
  const long dim = static_cast<long>(points.cols());
  std::vector<int> labels(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    double inertia = 0.0;
    for (int q = 0; q < k; ++q) {
      std::vector<double> mean(dim, 0.0);
      long members = 0;
      for (long p = 0; p < n; ++p) {
        if (labels[p] != q) continue;
        ++members;
        for (long d = 0; d < dim; ++d) mean[d] += points(p, d);
      }
      if (members == 0) continue;
      for (long d = 0; d < dim; ++d) mean[d] /= static_cast<double>(members);
      for (long p = 0; p < n; ++p) {
        if (labels[p] != q) continue;
        for (long d = 0; d < dim; ++d) {
          const double diff = points(p, d) - mean[d];
          inertia += diff * diff;
        }
      }
    }
    best = std::min(best, inertia);

    long pos = n - 1;
    while (pos >= 0 && labels[pos] == k - 1) {
      labels[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++labels[pos];
  }
  return best;
}

namespace {

double direct_snr(const std::vector<double>& ref, const std::vector<double>& est) {
  double energy = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    energy += ref[i] * ref[i];
    const double d = ref[i] - est[i];
    residual += d * d;
  }
  if (residual <= 0.0) return 300.0;
  return std::min(10.0 * std::log10(energy / residual), 300.0);
}

void search_partitions(const std::vector<Waveform>& refs,
                       const std::vector<Waveform>& ests,
                       std::vector<int>& assign, std::size_t next,
                       double& best) {
  if (next == ests.size()) {
    std::vector<bool> used(refs.size(), false);
    for (int a : assign) used[a] = true;
    if (std::find(used.begin(), used.end(), false) != used.end()) return;
    double mean = 0.0;
    for (std::size_t r = 0; r < refs.size(); ++r) {
      std::vector<double> sum(refs[r].samples.size(), 0.0);
      for (std::size_t e = 0; e < ests.size(); ++e) {
        if (static_cast<std::size_t>(assign[e]) != r) continue;
        for (std::size_t i = 0; i < sum.size(); ++i) {
          sum[i] += ests[e].samples[i];
        }
      }
      mean += direct_snr(refs[r].samples, sum);
    }
    best = std::max(best, mean / static_cast<double>(refs.size()));
    return;
  }
  for (std::size_t r = 0; r < refs.size(); ++r) {
    assign[next] = static_cast<int>(r);
    search_partitions(refs, ests, assign, next + 1, best);
  }
}

// Dirichlet kernel: sum_{t=0}^{L-1} exp(i*omega*t). Exactly L at multiples
// of 2*pi; elsewhere the closed geometric-series form.
std::complex<double> dirichlet(double omega, int len) {
  const double reduced = std::remainder(omega, 2.0 * std::numbers::pi);
  if (std::abs(reduced) < 1e-12) {
    return {static_cast<double>(len), 0.0};
  }
  const std::complex<double> phase =
      std::polar(1.0, omega * (len - 1) / 2.0);
  return phase * (std::sin(omega * len / 2.0) / std::sin(omega / 2.0));
}

// Transform of the periodic Hann window: three shifted Dirichlet kernels.
std::complex<double> hann_transform(double omega, int len) {
  const double shift = 2.0 * std::numbers::pi / len;
  return 0.5 * dirichlet(omega, len) - 0.25 * dirichlet(omega + shift, len) -
         0.25 * dirichlet(omega - shift, len);
}

}  // namespace

double best_mean_snr_direct(const std::vector<Waveform>& references,
                            const std::vector<Waveform>& estimates) {
  std::vector<int> assign(estimates.size(), 0);
  double best = -std::numeric_limits<double>::infinity();
  search_partitions(references, estimates, assign, 0, best);
  return best;
}

std::vector<std::complex<double>> windowed_sine_spectrum(
    double omega, double phase0, long start, int frame_len, int fft_size) {
  // sin(omega*(start+t) + phase0) = sin(omega*t + alpha) with
  // alpha = omega*start + phase0, then
  //   X[c] = (1/2i) * (e^{i alpha} WH(omega - w_c) - e^{-i alpha} WH(-omega - w_c))
  // where WH is the window transform and w_c = 2*pi*c/fft_size.
  const double alpha = omega * static_cast<double>(start) + phase0;
  const std::complex<double> ep = std::polar(1.0, alpha);
  const std::complex<double> em = std::polar(1.0, -alpha);
  const std::complex<double> half_over_i{0.0, -0.5};  // 1/(2i)
  std::vector<std::complex<double>> out(fft_size / 2 + 1);
  for (int c = 0; c < fft_size / 2 + 1; ++c) {
    const double wc = 2.0 * std::numbers::pi * c / fft_size;
    out[c] = half_over_i * (ep * hann_transform(omega - wc, frame_len) -
                            em * hann_transform(-omega - wc, frame_len));
  }
  return out;
}

}  // namespace patchsep::reference
