// Copyright 2026 The patchsep Authors
//
// Licensed under the Apache License, Version 2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "patchsep/matrix.hpp"
#include "patchsep/patching.hpp"

namespace patchsep {

enum class PgmScaling {
  kMinMax,    // [min, max] -> [0, 255]; constant matrices map to 128
  kAbsolute,  // values clamped to [0, 1], pixel = round(255 * v)
};

// Binary PGM (P5, maxval 255), width = cols, height = rows.
void export_pgm(const Matrix& m, const std::string& path, PgmScaling scaling);

// Plain CSV of the matrix, one row per matrix row, no header. Values are
// written with 17 significant digits so a re-read reproduces them exactly.
void export_matrix_csv(const Matrix& m, const std::string& path);

// Patch supervectors with their grid origins ("i,j,v0..v{hl-1}" header).
void export_patchset_csv(const PatchSet& patches, const std::string& path);

// Patch origins joined with cluster labels and code coordinates
// ("index,i,j,label,c0..c{dim-1}" header).
void export_clustering_csv(const std::vector<int>& labels, const Matrix& codes,
                           const std::vector<std::pair<long, long>>& origins,
                           const std::string& path);

// FNV-1a 64-bit hash of a file's bytes, as a fixed-width hex string.
std::string fnv1a_file_hex(const std::string& path);

}  // namespace patchsep
