// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "patchsep/matrix.hpp"
#include "patchsep/wav.hpp"

namespace patchsep {

// Radix-2 FFT with precomputed bit-reversal table and twiddle factors.
// Forward is the unnormalized DFT; inverse scales by 1/N.
class Fft {
 public:
  explicit Fft(std::size_t n);  // throws NonPowerOfTwoLength

  void forward(std::vector<std::complex<double>>& x) const;
  void inverse(std::vector<std::complex<double>>& x) const;
  std::size_t size() const { return n_; }

 private:
  void transform(std::vector<std::complex<double>>& x, bool inverse) const;

  std::size_t n_;
  std::vector<std::size_t> bitrev_;
  std::vector<std::complex<double>> roots_;  // exp(-2*pi*i*k/n), k < n/2
};

// One-shot convenience wrapper around Fft.
std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x,
                                      bool inverse = false);

// Analysis frame geometry; lengths are derived from millisecond settings
// at a concrete sample rate.
struct FrameParams {
  double frame_ms = 40.0;
  double hop_ms = 10.0;
  int frame_len = 0;  // round(frame_ms * rate / 1000)
  int hop_len = 0;    // round(hop_ms * rate / 1000)
  int fft_size = 0;   // smallest power of two >= frame_len

  static FrameParams from_ms(double frame_ms, double hop_ms, int sample_rate_hz);
};

// One-sided short-time spectrum: C = fft_size/2 + 1 rows, M frame columns.
struct Spectrogram {
  Matrix magnitude;  // C x M, non-negative
  Matrix phase;      // C x M, radians in (-pi, pi]
  FrameParams params;
  int sample_rate_hz = 0;

  std::size_t channels() const { return magnitude.rows(); }
  std::size_t frames() const { return magnitude.cols(); }
};

// Periodic Hann window of length n: w[t] = 0.5 - 0.5*cos(2*pi*t/n).
std::vector<double> hann_periodic(int n);

// Windowed short-time analysis. Frames start at multiples of hop_len with
// no padding at the signal ends; M = 1 + floor((len - frame_len)/hop_len).
Spectrogram stft(const Waveform& w, const FrameParams& p);

// Overlap-add synthesis with a Hann synthesis window and division by the
// summed squared-window envelope (floored at 1e-8). Output length is
// frame_len + (M-1)*hop_len.
Waveform istft(const Spectrogram& s);

}  // namespace patchsep
