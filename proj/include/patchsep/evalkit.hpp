// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <vector>

#include "patchsep/wav.hpp"

namespace patchsep {

// Synthetic mixture with ground truth. The stored references are scaled so
// that the mixture is their exact sample-wise sum after peak normalization.
struct MixtureCase {
  Waveform mixture;
  std::vector<Waveform> references;
  std::vector<double> gains;  // linear gains applied before summation
};

// Linear-gain sum of the sources, jointly peak-normalized to 0.9. An empty
// gains list means 0 dB for every source; lengths are trimmed to the
// shortest source.
MixtureCase make_mixture(const std::vector<Waveform>& sources,
                         const std::vector<double>& gains_db = {});

// 10*log10(sum ref^2 / sum (ref-est)^2), capped at 300 dB (an exactly-zero
// residual reports the cap).
double snr_db(const Waveform& reference, const Waveform& estimate);

// Outcome of matching anonymous estimates to references.
struct EvalResult {
  std::vector<double> snr;               // one entry per reference
  std::vector<std::vector<int>> groups;  // estimate indices per reference
  double mean_snr = 0.0;
};

// Exhaustive best-match search: estimates are partitioned into one nonempty
// group per reference (a bijection when the counts are equal), each group is
// summed into a single estimate, and the partition with the highest mean SNR
// wins; ties go to the lexicographically smallest assignment.
EvalResult best_permutation_score(const std::vector<Waveform>& references,
                                  const std::vector<Waveform>& estimates);

// CSV report: "reference_index,group,snr_db" rows plus a mean summary line.
std::string eval_report_csv(const EvalResult& result);

}  // namespace patchsep
