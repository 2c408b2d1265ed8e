#include "chipqa/stchips.hpp"

#include "chipqa/statfits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace chipqa {

ChipLut build_lut(int Q, int R) {
  if (Q < 2) throw std::invalid_argument("build_lut: Q must be >= 2");
  if (R < 3 || R % 2 == 0)
    throw std::invalid_argument("build_lut: R must be odd and >= 3 (center pixel must exist)");
  ChipLut lut;
  lut.Q = Q;
  lut.R = R;
  lut.offsets.resize(static_cast<std::size_t>(Q) * R);
  const int half = (R - 1) / 2;
  // sin/cos of the grid angles can land one ulp below an exact half-integer
  // (e.g. sin(pi/6) = 0.49999999999999994); nudge away from zero so the
  // round-half-away-from-zero convention survives floating point.
  const auto round_away = [](double v) {
    return static_cast<int>(std::round(v + std::copysign(1e-9, v)));
  };
  for (int q = 0; q < Q; ++q) {
    const double theta = q * M_PI / Q;
    const double c = std::cos(theta), s = std::sin(theta);
    for (int i = 0; i < R; ++i) {
      const int r = i - half;
      lut.offsets[static_cast<std::size_t>(q * R + i)] = {round_away(r * c), round_away(r * s)};
    }
  }
  return lut;
}

ChipFrame extract_chips(const std::vector<Fieldd>& group, const ChipLut& lut, int D,
                        long group_index, CandidateScan* scan) {
  const int R = lut.R, Q = lut.Q;
  if (static_cast<int>(group.size()) != R)
    throw std::invalid_argument("extract_chips: group must contain exactly R frames");
  if (D < 1) throw std::invalid_argument("extract_chips: stride factor must be >= 1");
  const int rows = static_cast<int>(group[0].rows());
  const int cols = static_cast<int>(group[0].cols());
  if (rows < R || cols < R)
    throw std::invalid_argument("extract_chips: frames smaller than chip side");

  ChipFrame out;
  out.group_index = group_index;
  out.win_rows = (rows / R) / D;
  out.win_cols = (cols / R) / D;
  out.values.setZero(static_cast<Eigen::Index>(out.win_rows) * R,
                     static_cast<Eigen::Index>(out.win_cols) * R);
  out.angle_map.setZero(out.win_rows, out.win_cols);
  out.kurt_map.setZero(out.win_rows, out.win_cols);
  if (scan)
    scan->kurt.setConstant(static_cast<Eigen::Index>(out.win_rows) * out.win_cols, Q,
                           std::numeric_limits<double>::quiet_NaN());

  const int half = (R - 1) / 2;
  const std::size_t nvals = static_cast<std::size_t>(R) * R;
  std::vector<double> chip(nvals);       // current candidate values
  std::vector<double> best_chip(nvals);  // winning candidate

  for (int wi = 0; wi < out.win_rows; ++wi) {
    const int cy = wi * D * R + half;
    for (int wj = 0; wj < out.win_cols; ++wj) {
      const int cx = wj * D * R + half;
      double best_dist = std::numeric_limits<double>::infinity();
      int best_q = 0;
      double best_kurt = std::numeric_limits<double>::quiet_NaN();
      bool any = false;
      for (int q = 0; q < Q; ++q) {
        for (int m = 0; m < R; ++m) {
          const Fieldd& frame = group[static_cast<std::size_t>(m)];
          for (int i = 0; i < R; ++i) {
            const auto& off = lut.at(q, i);
            chip[static_cast<std::size_t>(m * R + i)] = frame(cy + off[1], cx + off[0]);
          }
        }
        const MomentSummary ms = moments(std::span<const double>(chip.data(), nvals));
        if (ms.degenerate) continue;  // distance +inf
        if (scan)
          scan->kurt(static_cast<Eigen::Index>(wi) * out.win_cols + wj, q) = ms.kurtosis;
        const double dist = std::abs(ms.kurtosis - 3.0);
        if (dist < best_dist) {  // strict: ties keep the smaller angle index
          best_dist = dist;
          best_q = q;
          best_kurt = ms.kurtosis;
          std::copy_n(chip.begin(), nvals, best_chip.begin());
          any = true;
        }
      }
      if (!any) {
        // Fully degenerate window: angle 0, constant line from the angle-0 chip.
        for (int m = 0; m < R; ++m) {
          const Fieldd& frame = group[static_cast<std::size_t>(m)];
          for (int i = 0; i < R; ++i) {
            const auto& off = lut.at(0, i);
            best_chip[static_cast<std::size_t>(m * R + i)] = frame(cy + off[1], cx + off[0]);
          }
        }
        best_q = 0;
        best_kurt = std::numeric_limits<double>::quiet_NaN();
      }
      out.angle_map(wi, wj) = best_q;
      out.kurt_map(wi, wj) = best_kurt;
      for (int m = 0; m < R; ++m)
        for (int i = 0; i < R; ++i)
          out.values(static_cast<Eigen::Index>(wi) * R + m,
                     static_cast<Eigen::Index>(wj) * R + i) =
              best_chip[static_cast<std::size_t>(m * R + i)];
    }
  }
  return out;
}

}  // namespace chipqa
