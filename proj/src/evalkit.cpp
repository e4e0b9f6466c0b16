// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#include "patchsep/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "patchsep/errors.hpp"

namespace patchsep {

namespace {

constexpr double kSnrCapDb = 300.0;

double capped_snr(double ref_energy, double residual) {
  if (residual <= 0.0) return kSnrCapDb;
  return std::min(10.0 * std::log10(ref_energy / residual), kSnrCapDb);
}

std::string format_db(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

MixtureCase make_mixture(const std::vector<Waveform>& sources,
                         const std::vector<double>& gains_db) {
  if (sources.empty()) {
    throw EmptySources("at least one source is required");
  }
  if (!gains_db.empty() && gains_db.size() != sources.size()) {
    throw Error("gain count does not match source count");
  }
  const int rate = sources[0].sample_rate_hz;
  std::size_t len = std::numeric_limits<std::size_t>::max();
  for (const Waveform& s : sources) {
    if (s.sample_rate_hz != rate) {
      throw RateMismatch("sources have differing sample rates");
    }
    len = std::min(len, s.samples.size());
  }
  if (len == 0) {
    throw EmptyAudio("a source has no samples");
  }

  MixtureCase out;
  out.gains.resize(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    out.gains[s] = gains_db.empty() ? 1.0 : std::pow(10.0, gains_db[s] / 20.0);
  }

  double peak = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    double acc = 0.0;
    for (std::size_t s = 0; s < sources.size(); ++s) {
      acc += out.gains[s] * sources[s].samples[i];
    }
    peak = std::max(peak, std::abs(acc));
  }
  const double factor = peak > 0.0 ? 0.9 / peak : 1.0;

  out.references.resize(sources.size());
  for (std::size_t s = 0; s < sources.size(); ++s) {
    out.references[s].sample_rate_hz = rate;
    out.references[s].samples.resize(len);
    const double g = factor * out.gains[s];
    for (std::size_t i = 0; i < len; ++i) {
      out.references[s].samples[i] = g * sources[s].samples[i];
    }
  }
  // Summing the stored references (not rescaling the pre-normalized sum)
  // makes mixture == sum of references hold bit-exactly.
  out.mixture.sample_rate_hz = rate;
  out.mixture.samples.assign(len, 0.0);
  for (std::size_t s = 0; s < sources.size(); ++s) {
    for (std::size_t i = 0; i < len; ++i) {
      out.mixture.samples[i] += out.references[s].samples[i];
    }
  }
  return out;
}

double snr_db(const Waveform& reference, const Waveform& estimate) {
  if (reference.samples.size() != estimate.samples.size()) {
    throw LengthMismatch("reference and estimate lengths differ");
  }
  double ref_energy = 0.0;
  double residual = 0.0;
  for (std::size_t i = 0; i < reference.samples.size(); ++i) {
    const double r = reference.samples[i];
    const double d = r - estimate.samples[i];
    ref_energy += r * r;
    residual += d * d;
  }
  if (ref_energy == 0.0) {
    throw AllZeroReference("reference signal is all zero");
  }
  return capped_snr(ref_energy, residual);
}

EvalResult best_permutation_score(const std::vector<Waveform>& references,
                                  const std::vector<Waveform>& estimates) {
  const int r = static_cast<int>(references.size());
  const int e = static_cast<int>(estimates.size());
  if (r == 0) {
    throw EmptySources("no references given");
  }
  if (e < r) {
    throw FewerEstimatesThanReferences(std::to_string(e) + " estimates for " +
                                       std::to_string(r) + " references");
  }
  const std::size_t len = references[0].samples.size();
  for (const Waveform& w : references) {
    if (w.samples.size() != len) throw LengthMismatch("reference lengths differ");
  }
  for (const Waveform& w : estimates) {
    if (w.samples.size() != len) throw LengthMismatch("estimate length differs");
  }

  // Residual energies come from precomputed dot products, so each of the
  // r^e candidate assignments costs O(e^2) instead of a pass over samples.
  std::vector<double> ref_energy(r, 0.0);
  for (int i = 0; i < r; ++i) {
    for (double v : references[i].samples) ref_energy[i] += v * v;
    if (ref_energy[i] == 0.0) {
      throw AllZeroReference("reference " + std::to_string(i) + " is all zero");
    }
  }
  std::vector<std::vector<double>> ref_dot(r, std::vector<double>(e, 0.0));
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < e; ++j) {
      double acc = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        acc += references[i].samples[t] * estimates[j].samples[t];
      }
      ref_dot[i][j] = acc;
    }
  }
  std::vector<std::vector<double>> est_dot(e, std::vector<double>(e, 0.0));
  for (int a = 0; a < e; ++a) {
    for (int b = a; b < e; ++b) {
      double acc = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        acc += estimates[a].samples[t] * estimates[b].samples[t];
      }
      est_dot[a][b] = acc;
      est_dot[b][a] = acc;
    }
  }

  // Odometer enumeration of assignment vectors (estimate -> reference) in
  // lexicographic order; a strict improvement test keeps the first and thus
  // smallest assignment on ties.
  std::vector<int> assignment(e, 0);
  std::vector<int> best_assignment;
  double best_mean = -std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<int> group_size(r, 0);
    for (int j = 0; j < e; ++j) ++group_size[assignment[j]];
    const bool surjective =
        std::all_of(group_size.begin(), group_size.end(), [](int s) { return s > 0; });
    if (surjective) {
      double mean = 0.0;
      for (int i = 0; i < r; ++i) {
        double residual = ref_energy[i];
        for (int a = 0; a < e; ++a) {
          if (assignment[a] != i) continue;
          residual -= 2.0 * ref_dot[i][a];
          for (int b = 0; b < e; ++b) {
            if (assignment[b] == i) residual += est_dot[a][b];
          }
        }
        mean += capped_snr(ref_energy[i], residual);
      }
      mean /= r;
      if (mean > best_mean) {
        best_mean = mean;
        best_assignment = assignment;
      }
    }
    int pos = e - 1;
    while (pos >= 0 && assignment[pos] == r - 1) {
      assignment[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++assignment[pos];
  }

  // Report the winning partition with directly-computed SNRs.
  EvalResult result;
  result.groups.assign(r, {});
  for (int j = 0; j < e; ++j) {
    result.groups[best_assignment[j]].push_back(j);
  }
  result.snr.resize(r);
  double total = 0.0;
  for (int i = 0; i < r; ++i) {
    Waveform sum;
    sum.sample_rate_hz = references[i].sample_rate_hz;
    sum.samples.assign(len, 0.0);
    for (int j : result.groups[i]) {
      for (std::size_t t = 0; t < len; ++t) {
        sum.samples[t] += estimates[j].samples[t];
      }
    }
    result.snr[i] = snr_db(references[i], sum);
    total += result.snr[i];
  }
  result.mean_snr = total / r;
  return result;
}

std::string eval_report_csv(const EvalResult& result) {
  std::string out = "reference_index,group,snr_db\n";
  for (std::size_t i = 0; i < result.snr.size(); ++i) {
    out += std::to_string(i) + ',';
    for (std::size_t j = 0; j < result.groups[i].size(); ++j) {
      if (j) out += '+';
      out += std::to_string(result.groups[i][j]);
    }
    out += ',' + format_db(result.snr[i]) + '\n';
  }
  out += "mean,," + format_db(result.mean_snr) + '\n';
  return out;
}

}  // namespace patchsep
