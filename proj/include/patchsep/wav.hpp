// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <vector>

namespace patchsep {

// Mono time-domain signal. Samples are kept in [-1, 1]; writers clip before
// quantization.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = 0;
};

// Reads a RIFF/WAVE file with PCM integer (8/16/24-bit) or 32-bit float
// samples, 1 or 2 channels. Stereo is downmixed by channel mean; integer
// samples are scaled by the type's max magnitude.
//
// Throws MalformedContainer, UnsupportedEncoding, EmptyAudio, IoFailure.
Waveform read_wav(const std::string& path);

// Writes 16-bit PCM mono. Samples outside [-1, 1] are hard-clipped before
// quantization; a read-back reproduces samples within 1/32768.
//
// Throws IoFailure.
void write_wav(const std::string& path, const Waveform& w);

}  // namespace patchsep
