// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "patchsep/errors.hpp"
#include "patchsep/evalkit.hpp"
#include "patchsep/rng.hpp"
#include "reference.hpp"

using namespace patchsep;

namespace {

constexpr double kPi = 3.14159265358979323846;

Waveform sine(double freq, double amp, std::size_t n, int rate) {
  Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    w.samples[t] = amp * std::sin(2.0 * kPi * freq * double(t) / rate);
  }
  return w;
}

Waveform noise(double amp, std::size_t n, int rate, std::uint64_t seed) {
  SeededRng rng(seed);
  Waveform w;
  w.sample_rate_hz = rate;
  w.samples.resize(n);
  for (double& s : w.samples) s = amp * (2.0 * rng.uniform() - 1.0);
  return w;
}

double peak(const Waveform& w) {
  double p = 0.0;
  for (double s : w.samples) p = std::max(p, std::abs(s));
  return p;
}

double energy(const Waveform& w) {
  double e = 0.0;
  for (double s : w.samples) e += s * s;
  return e;
}

}  // namespace

TEST_CASE("the mixture is exactly the sum of the stored references") {
  const std::vector<Waveform> srcs = {sine(440.0, 0.7, 4000, 8000),
                                      noise(0.4, 4000, 8000, 5),
                                      sine(1234.0, 0.2, 4000, 8000)};
  const MixtureCase mc = make_mixture(srcs, {0.0, -3.0, 6.0});
  REQUIRE(mc.references.size() == 3);
  REQUIRE(mc.mixture.samples.size() == 4000);
  for (std::size_t t = 0; t < mc.mixture.samples.size(); ++t) {
    const double sum = mc.references[0].samples[t] + mc.references[1].samples[t] +
                       mc.references[2].samples[t];
    CHECK(mc.mixture.samples[t] == sum);  // bit-exact by construction
  }
  CHECK(peak(mc.mixture) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("decibel gains scale the references before the sum") {
  const std::vector<Waveform> srcs = {sine(300.0, 0.5, 2000, 8000),
                                      sine(900.0, 0.5, 2000, 8000)};
  const MixtureCase mc = make_mixture(srcs, {0.0, -6.0});
  // Reference 1 is 6 dB below reference 0 up to the shared normalization.
  const double ratio = std::sqrt(energy(mc.references[1]) / energy(mc.references[0]));
  CHECK(20.0 * std::log10(ratio) == doctest::Approx(-6.0).epsilon(1e-9));
  CHECK(mc.gains.size() == 2);
  CHECK(mc.gains[0] == doctest::Approx(std::pow(10.0, 0.0)).epsilon(1e-12));
  CHECK(mc.gains[1] == doctest::Approx(std::pow(10.0, -6.0 / 20.0)).epsilon(1e-12));
}

TEST_CASE("a single source passes through as its own mixture") {
  const Waveform src = sine(500.0, 0.8, 3000, 8000);
  const MixtureCase mc = make_mixture({src});
  REQUIRE(mc.references.size() == 1);
  CHECK(mc.mixture.samples == mc.references[0].samples);
  CHECK(peak(mc.mixture) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("two identical sources double up before normalization") {
  const Waveform src = sine(600.0, 0.4, 2500, 8000);
  const MixtureCase mc = make_mixture({src, src});
  for (std::size_t t = 0; t < mc.mixture.samples.size(); ++t) {
    CHECK(mc.references[0].samples[t] == doctest::Approx(mc.references[1].samples[t]));
  }
  CHECK(peak(mc.mixture) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("a silent source stays silent through mixing") {
  Waveform silent;
  silent.sample_rate_hz = 8000;
  silent.samples.assign(2000, 0.0);
  const MixtureCase mc = make_mixture({sine(700.0, 0.5, 2000, 8000), silent});
  for (double s : mc.references[1].samples) CHECK(s == 0.0);
  CHECK(mc.mixture.samples == mc.references[0].samples);
}

TEST_CASE("sources are trimmed to the shortest length") {
  const MixtureCase mc =
      make_mixture({sine(400.0, 0.5, 3000, 8000), sine(800.0, 0.5, 2000, 8000)});
  CHECK(mc.mixture.samples.size() == 2000);
  CHECK(mc.references[0].samples.size() == 2000);
  CHECK(mc.references[1].samples.size() == 2000);
}

TEST_CASE("an all-zero mix keeps a unit scale factor") {
  Waveform a, b;
  a.sample_rate_hz = b.sample_rate_hz = 8000;
  a.samples.assign(1000, 0.0);
  b.samples.assign(1000, 0.0);
  const MixtureCase mc = make_mixture({a, b});
  for (double s : mc.mixture.samples) CHECK(s == 0.0);
}

TEST_CASE("mixing rejects bad inputs") {
  SUBCASE("no sources") { CHECK_THROWS_AS(make_mixture({}), EmptySources); }
  SUBCASE("mismatched sample rates") {
    CHECK_THROWS_AS(
        make_mixture({sine(400.0, 0.5, 1000, 8000), sine(400.0, 0.5, 1000, 16000)}),
        RateMismatch);
  }
  SUBCASE("gain list with the wrong length") {
    CHECK_THROWS_AS(make_mixture({sine(400.0, 0.5, 1000, 8000)}, {0.0, 1.0}), Error);
  }
}

TEST_CASE("snr matches hand-computed residual energies") {
  const Waveform ref = sine(440.0, 0.6, 4000, 8000);
  SUBCASE("a perfect estimate reports the cap") {
    CHECK(snr_db(ref, ref) == 300.0);
  }
  SUBCASE("an all-zero estimate reports exactly zero dB") {
    Waveform zero;
    zero.sample_rate_hz = 8000;
    zero.samples.assign(4000, 0.0);
    CHECK(snr_db(ref, zero) == doctest::Approx(0.0).epsilon(1e-12));
  }
  SUBCASE("a one-percent-energy residual reports twenty dB") {
    // Residual energy is E_ref/100 by construction: est = ref + ref/10.
    Waveform est = ref;
    for (double& s : est.samples) s *= 1.1;
    CHECK(snr_db(ref, est) == doctest::Approx(20.0).epsilon(1e-9));
  }
  SUBCASE("joint scaling of both signals changes nothing") {
    Waveform est = noise(0.3, 4000, 8000, 9);
    for (std::size_t t = 0; t < est.samples.size(); ++t) est.samples[t] += ref.samples[t];
    const double base = snr_db(ref, est);
    Waveform ref2 = ref, est2 = est;
    for (double& s : ref2.samples) s *= 7.5;
    for (double& s : est2.samples) s *= 7.5;
    CHECK(snr_db(ref2, est2) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("snr rejects bad inputs") {
  const Waveform ref = sine(440.0, 0.6, 1000, 8000);
  SUBCASE("length mismatch") {
    CHECK_THROWS_AS(snr_db(ref, sine(440.0, 0.6, 999, 8000)), LengthMismatch);
  }
  SUBCASE("all-zero reference") {
    Waveform zero;
    zero.sample_rate_hz = 8000;
    zero.samples.assign(1000, 0.0);
    CHECK_THROWS_AS(snr_db(zero, ref), AllZeroReference);
  }
}

TEST_CASE("swapped estimates are matched back to their references") {
  const Waveform a = sine(300.0, 0.5, 3000, 8000);
  const Waveform b = noise(0.4, 3000, 8000, 11);
  const EvalResult r = best_permutation_score({a, b}, {b, a});
  REQUIRE(r.groups.size() == 2);
  CHECK(r.groups[0] == std::vector<int>{1});
  CHECK(r.groups[1] == std::vector<int>{0});
  CHECK(r.snr[0] == 300.0);
  CHECK(r.snr[1] == 300.0);
  CHECK(r.mean_snr == 300.0);
}

TEST_CASE("split estimates are regrouped into their pairwise sums") {
  // Four estimates that pairwise sum to the two references.
  const Waveform a = sine(350.0, 0.5, 2500, 8000);
  const Waveform b = sine(1500.0, 0.5, 2500, 8000);
  std::vector<Waveform> parts(4);
  for (auto& p : parts) {
    p.sample_rate_hz = 8000;
    p.samples.resize(2500);
  }
  SeededRng rng(13);
  for (std::size_t t = 0; t < 2500; ++t) {
    const double split_a = rng.uniform();
    const double split_b = rng.uniform();
    parts[0].samples[t] = split_a * a.samples[t];
    parts[2].samples[t] = (1.0 - split_a) * a.samples[t];
    parts[1].samples[t] = split_b * b.samples[t];
    parts[3].samples[t] = (1.0 - split_b) * b.samples[t];
  }
  const EvalResult r = best_permutation_score({a, b}, parts);
  CHECK(r.groups[0] == std::vector<int>{0, 2});
  CHECK(r.groups[1] == std::vector<int>{1, 3});
  CHECK(r.snr[0] == 300.0);
  CHECK(r.snr[1] == 300.0);
}

TEST_CASE("grouping matches an independent re-enumeration on random inputs") {
  for (std::uint64_t seed = 20; seed < 26; ++seed) {
    std::vector<Waveform> refs = {noise(0.5, 400, 8000, seed),
                                  noise(0.5, 400, 8000, seed + 100)};
    std::vector<Waveform> ests;
    for (std::uint64_t e = 0; e < 4; ++e) {
      ests.push_back(noise(0.5, 400, 8000, seed + 200 + e));
    }
    const EvalResult r = best_permutation_score(refs, ests);
    const double direct = reference::best_mean_snr_direct(refs, ests);
    CHECK(r.mean_snr == doctest::Approx(direct).epsilon(1e-12));
    // The reported groups really achieve the reported per-reference scores.
    for (std::size_t s = 0; s < refs.size(); ++s) {
      Waveform summed;
      summed.sample_rate_hz = 8000;
      summed.samples.assign(400, 0.0);
      for (int e : r.groups[s]) {
        for (std::size_t t = 0; t < 400; ++t) summed.samples[t] += ests[e].samples[t];
      }
      CHECK(snr_db(refs[s], summed) == doctest::Approx(r.snr[s]).epsilon(1e-12));
    }
  }
}

TEST_CASE("the score ignores the order of the estimates list") {
  std::vector<Waveform> refs = {noise(0.5, 300, 8000, 60), noise(0.5, 300, 8000, 61)};
  std::vector<Waveform> ests;
  for (std::uint64_t e = 0; e < 4; ++e) ests.push_back(noise(0.5, 300, 8000, 70 + e));
  const EvalResult base = best_permutation_score(refs, ests);
  const EvalResult shuf =
      best_permutation_score(refs, {ests[3], ests[1], ests[0], ests[2]});
  CHECK(shuf.mean_snr == doctest::Approx(base.mean_snr).epsilon(1e-12));
}

TEST_CASE("equal counts reduce to a bijection") {
  std::vector<Waveform> refs = {noise(0.5, 300, 8000, 80), noise(0.5, 300, 8000, 81),
                                noise(0.5, 300, 8000, 82)};
  const EvalResult r = best_permutation_score(refs, {refs[2], refs[0], refs[1]});
  CHECK(r.groups[0] == std::vector<int>{1});
  CHECK(r.groups[1] == std::vector<int>{2});
  CHECK(r.groups[2] == std::vector<int>{0});
  for (double s : r.snr) CHECK(s == 300.0);
}

TEST_CASE("matching rejects too few estimates") {
  std::vector<Waveform> refs = {noise(0.5, 300, 8000, 90), noise(0.5, 300, 8000, 91)};
  CHECK_THROWS_AS(best_permutation_score(refs, {refs[0]}), FewerEstimatesThanReferences);
}

TEST_CASE("the report lists one row per reference plus the mean") {
  EvalResult r;
  r.snr = {12.5, 8.25};
  r.groups = {{0, 2}, {1}};
  r.mean_snr = 10.375;
  const std::string csv = eval_report_csv(r);
  CHECK(csv.find("reference_index,group,snr_db\n") == 0);
  CHECK(csv.find("0,0+2,12.500000") != std::string::npos);
  CHECK(csv.find("1,1,8.250000") != std::string::npos);
  CHECK(csv.find("mean,,10.375000") != std::string::npos);
}
