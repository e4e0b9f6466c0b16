// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#include "patchsep/exports.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>

#include "patchsep/errors.hpp"

namespace patchsep {

namespace {

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoFailure("cannot open " + path + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw IoFailure("short write to " + path);
}

void append_float(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

void export_pgm(const Matrix& m, const std::string& path, PgmScaling scaling) {
  std::string out = "P5\n" + std::to_string(m.cols()) + ' ' +
                    std::to_string(m.rows()) + "\n255\n";
  out.reserve(out.size() + m.size());
  if (scaling == PgmScaling::kMinMax) {
    double lo = m.data()[0], hi = m.data()[0];
    for (double v : m.data()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi <= lo) {
      out.append(m.size(), static_cast<char>(128));
    } else {
      const double scale = 255.0 / (hi - lo);
      for (double v : m.data()) {
        const long p = std::lround((v - lo) * scale);
        out.push_back(static_cast<char>(std::clamp(p, 0L, 255L)));
      }
    }
  } else {
    for (double v : m.data()) {
      const long p = std::lround(255.0 * std::clamp(v, 0.0, 1.0));
      out.push_back(static_cast<char>(p));
    }
  }
  write_file(path, out);
}

void export_matrix_csv(const Matrix& m, const std::string& path) {
  std::string out;
  out.reserve(m.size() * 20);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const double* row = m.row(r);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c) out += ',';
      append_float(out, row[c]);
    }
    out += '\n';
  }
  write_file(path, out);
}

void export_patchset_csv(const PatchSet& patches, const std::string& path) {
  std::string out = "i,j";
  for (std::size_t d = 0; d < patches.vectors.cols(); ++d) {
    out += ",v" + std::to_string(d);
  }
  out += '\n';
  for (std::size_t p = 0; p < patches.count(); ++p) {
    out += std::to_string(patches.origins[p].first) + ',' +
           std::to_string(patches.origins[p].second);
    const double* row = patches.vectors.row(p);
    for (std::size_t c = 0; c < patches.vectors.cols(); ++c) {
      out += ',';
      append_float(out, row[c]);
    }
    out += '\n';
  }
  write_file(path, out);
}

void export_clustering_csv(const std::vector<int>& labels, const Matrix& codes,
                           const std::vector<std::pair<long, long>>& origins,
                           const std::string& path) {
  if (labels.size() != codes.rows() || origins.size() != codes.rows()) {
    throw DimensionMismatch("labels/codes/origins row counts differ");
  }
  std::string out = "index,i,j,label";
  for (std::size_t d = 0; d < codes.cols(); ++d) {
    out += ",c" + std::to_string(d);
  }
  out += '\n';
  for (std::size_t p = 0; p < codes.rows(); ++p) {
    out += std::to_string(p) + ',' + std::to_string(origins[p].first) + ',' +
           std::to_string(origins[p].second) + ',' + std::to_string(labels[p]);
    const double* row = codes.row(p);
    for (std::size_t c = 0; c < codes.cols(); ++c) {
      out += ',';
      append_float(out, row[c]);
    }
    out += '\n';
  }
  write_file(path, out);
}

std::string fnv1a_file_hex(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoFailure("cannot open " + path);
  std::uint64_t hash = 14695981039346656037ULL;
  char buf[1 << 16];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    const std::streamsize got = f.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (!f) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

}  // namespace patchsep
