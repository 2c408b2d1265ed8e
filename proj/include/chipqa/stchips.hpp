#pragma once

// Per-window orientation search over Q quantized angles with
// kurtosis-closest-to-3 selection, and aggregation of the winning
// space-time chips into a mosaic frame.

#include "chipqa/core.hpp"

#include <array>
#include <vector>

namespace chipqa {

struct ChipLut {
  int Q = 0, R = 0;
  // offsets[q * R + i] = {dx, dy} for radial index i (r = i - (R-1)/2),
  // dx = round(r cos(q pi / Q)), dy = round(r sin(q pi / Q)), half away from zero.
  std::vector<std::array<int, 2>> offsets;

  const std::array<int, 2>& at(int q, int i) const {
    return offsets[static_cast<std::size_t>(q * R + i)];
  }
};

ChipLut build_lut(int Q, int R);

struct ChipFrame {
  Fieldd values;             // M' x N' mosaic of winning R x R chips
  long group_index = 0;
  int win_rows = 0, win_cols = 0;
  Eigen::ArrayXXi angle_map; // win_rows x win_cols selected angle indices
  Fieldd kurt_map;           // selected-chip kurtosis (NaN when the window is fully degenerate)
};

// Optional per-candidate statistics for analysis/validation consumers:
// kurtosis of every candidate chip (rows: windows row-major; cols: angles).
// Degenerate candidates are NaN.
struct CandidateScan {
  Eigen::ArrayXXd kurt;  // (win_rows*win_cols) x Q
};

// Windows are the R x R tiles at tile indices 0, D, 2D, ... so the mosaic is
// M' = R * floor(floor(M / R) / D) per dimension. Chip row m comes from group
// frame m, sampled along the lut line through the window center.
ChipFrame extract_chips(const std::vector<Fieldd>& group, const ChipLut& lut, int D,
                        long group_index = 0, CandidateScan* scan = nullptr);

// Closed-form mosaic side length for an input side of M pixels.
inline int chip_mosaic_side(int M, int R, int D) { return R * ((M / R) / D); }

}  // namespace chipqa
