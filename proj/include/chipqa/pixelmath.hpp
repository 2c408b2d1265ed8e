#pragma once

// Per-frame pixel transforms: BT.709 luma passthrough, CIELAB chroma magnitude,
// Sobel gradient magnitude, 2x downscale, and the separable filtering helpers
// the normalization stages build on.

#include "chipqa/core.hpp"
#include "chipqa/video_io.hpp"

#include <vector>

namespace chipqa {

// 1-D correlation along each row / column with edge replication.
template <typename T>
Field<T> correlate_rows(const Field<T>& f, const std::vector<T>& kernel) {
  const int radius = static_cast<int>(kernel.size()) / 2;
  const int rows = static_cast<int>(f.rows()), cols = static_cast<int>(f.cols());
  Field<T> out(rows, cols);
  for (int y = 0; y < rows; ++y) {
    const T* src = f.data() + static_cast<std::ptrdiff_t>(y) * cols;
    T* dst = out.data() + static_cast<std::ptrdiff_t>(y) * cols;
    for (int x = 0; x < cols; ++x) {
      T acc{};
      for (int k = -radius; k <= radius; ++k) {
        int xx = x + k;
        xx = xx < 0 ? 0 : (xx >= cols ? cols - 1 : xx);
        acc += kernel[static_cast<std::size_t>(k + radius)] * src[xx];
      }
      dst[x] = acc;
    }
  }
  return out;
}

template <typename T>
Field<T> correlate_cols(const Field<T>& f, const std::vector<T>& kernel) {
  const int radius = static_cast<int>(kernel.size()) / 2;
  const int rows = static_cast<int>(f.rows()), cols = static_cast<int>(f.cols());
  Field<T> out(rows, cols);
  for (int y = 0; y < rows; ++y) {
    T* dst = out.data() + static_cast<std::ptrdiff_t>(y) * cols;
    for (int k = -radius; k <= radius; ++k) {
      int yy = y + k;
      yy = yy < 0 ? 0 : (yy >= rows ? rows - 1 : yy);
      const T w = kernel[static_cast<std::size_t>(k + radius)];
      const T* src = f.data() + static_cast<std::ptrdiff_t>(yy) * cols;
      if (k == -radius)
        for (int x = 0; x < cols; ++x) dst[x] = w * src[x];
      else
        for (int x = 0; x < cols; ++x) dst[x] += w * src[x];
    }
  }
  return out;
}

template <typename T>
Field<T> separable_filter(const Field<T>& f, const std::vector<T>& kernel) {
  return correlate_cols(correlate_rows(f, kernel), kernel);
}

// BT.709 luma. Y4M planes already carry Y'; pass through.
inline Fieldd luma709(const PlanarFrame& frame) { return frame.y; }

// CIELAB chroma magnitude C* = sqrt(a*^2 + b*^2), per pixel.
// Path: full-range BT.709 Y'CbCr -> R'G'B' -> sRGB linearization -> XYZ(D65) -> Lab.
Fieldd chroma_map(const PlanarFrame& frame);

// Sobel gradient magnitude (3x3 pair, edge replication, output same size).
Fieldd gradient_magnitude(const Fieldd& field);

// 2x2 box average then decimation by 2; output dims are floor(halves).
Fieldd downscale2(const Fieldd& field);

}  // namespace chipqa
