// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#include "patchsep/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "patchsep/errors.hpp"

namespace patchsep {

namespace {

bool is_pow2(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Fft::Fft(std::size_t n) : n_(n) {
  if (!is_pow2(n)) {
    throw NonPowerOfTwoLength("FFT length " + std::to_string(n) +
                              " is not a power of two");
  }
  bitrev_.resize(n);
  bitrev_[0] = 0;
  for (std::size_t i = 1; i < n; ++i) {
    bitrev_[i] = (bitrev_[i >> 1] >> 1) | ((i & 1) ? (n >> 1) : 0);
  }
  roots_.resize(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double phi = -2.0 * std::numbers::pi * static_cast<double>(k) /
                       static_cast<double>(n);
    roots_[k] = {std::cos(phi), std::sin(phi)};
  }
}

void Fft::transform(std::vector<std::complex<double>>& x, bool inverse) const {
  if (x.size() != n_) {
    throw NonPowerOfTwoLength("FFT input length " + std::to_string(x.size()) +
                              " does not match plan size " + std::to_string(n_));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    if (bitrev_[i] > i) std::swap(x[i], x[bitrev_[i]]);
  }
  for (std::size_t len = 2; len <= n_; len <<= 1) {
    const std::size_t half = len >> 1;
    const std::size_t step = n_ / len;
    for (std::size_t base = 0; base < n_; base += len) {
      for (std::size_t j = 0; j < half; ++j) {
        std::complex<double> w = roots_[j * step];
        if (inverse) w = std::conj(w);
        const std::complex<double> u = x[base + j];
        const std::complex<double> v = x[base + j + half] * w;
        x[base + j] = u + v;
        x[base + j + half] = u - v;
      }
    }
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n_);
    for (auto& v : x) v *= scale;
  }
}

void Fft::forward(std::vector<std::complex<double>>& x) const {
  transform(x, false);
}

void Fft::inverse(std::vector<std::complex<double>>& x) const {
  transform(x, true);
}

std::vector<std::complex<double>> fft(std::vector<std::complex<double>> x,
                                      bool inverse) {
  const Fft plan(x.size());
  if (inverse) {
    plan.inverse(x);
  } else {
    plan.forward(x);
  }
  return x;
}

FrameParams FrameParams::from_ms(double frame_ms, double hop_ms,
                                 int sample_rate_hz) {
  if (frame_ms <= 0 || hop_ms <= 0 || sample_rate_hz <= 0) {
    throw Error("frame/hop lengths and sample rate must be positive");
  }
  FrameParams p;
  p.frame_ms = frame_ms;
  p.hop_ms = hop_ms;
  p.frame_len = static_cast<int>(std::lround(frame_ms * sample_rate_hz / 1000.0));
  p.hop_len = static_cast<int>(std::lround(hop_ms * sample_rate_hz / 1000.0));
  if (p.frame_len < 1 || p.hop_len < 1) {
    throw Error("frame/hop round to zero samples at this rate");
  }
  if (p.hop_len > p.frame_len) {
    throw Error("hop length exceeds frame length");
  }
  p.fft_size = next_pow2(p.frame_len);
  return p;
}

std::vector<double> hann_periodic(int n) {
  std::vector<double> w(n);
  for (int t = 0; t < n; ++t) {
    w[t] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * t / n);
  }
  return w;
}

Spectrogram stft(const Waveform& w, const FrameParams& p) {
  const auto len = static_cast<long>(w.samples.size());
  if (len < p.frame_len) {
    throw SignalTooShort("signal of " + std::to_string(len) +
                         " samples is shorter than one frame (" +
                         std::to_string(p.frame_len) + ")");
  }
  const long m_count = 1 + (len - p.frame_len) / p.hop_len;
  const int n = p.fft_size;
  const int channels = n / 2 + 1;
  const std::vector<double> win = hann_periodic(p.frame_len);

  Spectrogram s;
  s.params = p;
  s.sample_rate_hz = w.sample_rate_hz;
  s.magnitude = Matrix(channels, m_count);
  s.phase = Matrix(channels, m_count);

  const Fft plan(static_cast<std::size_t>(n));
  // Frames are independent; each iteration fills only its own column.
#pragma omp parallel for schedule(static)
  for (long m = 0; m < m_count; ++m) {
    std::vector<std::complex<double>> buf(n, {0.0, 0.0});
    const double* src = w.samples.data() + m * p.hop_len;
    for (int t = 0; t < p.frame_len; ++t) {
      buf[t] = {src[t] * win[t], 0.0};
    }
    plan.forward(buf);
    for (int c = 0; c < channels; ++c) {
      s.magnitude(c, m) = std::abs(buf[c]);
      double ph = std::arg(buf[c]);
      if (ph == -std::numbers::pi) ph = std::numbers::pi;
      s.phase(c, m) = ph;
    }
  }
  return s;
}

Waveform istft(const Spectrogram& s) {
  const FrameParams& p = s.params;
  const int n = p.fft_size;
  const int channels = n / 2 + 1;
  if (static_cast<int>(s.channels()) != channels || !s.magnitude.same_shape(s.phase)) {
    throw Error("spectrogram shape is inconsistent with its frame parameters");
  }
  const long m_count = static_cast<long>(s.frames());
  const long out_len = p.frame_len + (m_count - 1) * p.hop_len;
  const std::vector<double> win = hann_periodic(p.frame_len);

  // Per-frame inverse transforms are independent; overlap-add runs serially
  // afterwards so the accumulation order never depends on thread count.
  Matrix frames(m_count, p.frame_len);
  const Fft plan(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long m = 0; m < m_count; ++m) {
    std::vector<std::complex<double>> buf(n);
    for (int c = 0; c < channels; ++c) {
      buf[c] = std::polar(s.magnitude(c, m), s.phase(c, m));
    }
    for (int c = 1; c < n / 2; ++c) {
      buf[n - c] = std::conj(buf[c]);
    }
    plan.inverse(buf);
    double* row = frames.row(m);
    for (int t = 0; t < p.frame_len; ++t) {
      row[t] = buf[t].real() * win[t];
    }
  }

  Waveform out;
  out.sample_rate_hz = s.sample_rate_hz;
  out.samples.assign(out_len, 0.0);
  std::vector<double> envelope(out_len, 0.0);
  for (long m = 0; m < m_count; ++m) {
    const double* row = frames.row(m);
    const long base = m * p.hop_len;
    for (int t = 0; t < p.frame_len; ++t) {
      out.samples[base + t] += row[t];
      envelope[base + t] += win[t] * win[t];
    }
  }
  for (long i = 0; i < out_len; ++i) {
    out.samples[i] /= std::max(envelope[i], 1e-8);
  }
  return out;
}

}  // namespace patchsep
