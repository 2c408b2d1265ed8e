#include "chipqa/pixelmath.hpp"

#include <cmath>

namespace chipqa {
namespace {

inline double srgb_linearize(double c) {
  c = c < 0.0 ? 0.0 : (c > 1.0 ? 1.0 : c);
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

inline double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

}  // namespace

Fieldd chroma_map(const PlanarFrame& frame) {
  const int rows = static_cast<int>(frame.y.rows()), cols = static_cast<int>(frame.y.cols());
  if (frame.cb.rows() != rows || frame.cb.cols() != cols || frame.cr.rows() != rows ||
      frame.cr.cols() != cols)
    throw std::invalid_argument("chroma_map: planes must share full-frame dimensions");

  // D65 reference white, taken as the matrix image of R=G=B=1 so the
  // neutral axis lands exactly on a* = b* = 0.  (The published 7-digit
  // matrix rows sum to 0.95047, 1.0000001, 1.08883 — using the textbook
  // white directly would leave grays a residual chroma of ~2e-5.)
  constexpr double Xn = 0.4124564 + 0.3575761 + 0.1804375;
  constexpr double Yn = 0.2126729 + 0.7151522 + 0.0721750;
  constexpr double Zn = 0.0193339 + 0.1191920 + 0.9503041;
  Fieldd out(rows, cols);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      const double Y = frame.y(y, x);
      const double Pb = frame.cb(y, x) - 0.5;
      const double Pr = frame.cr(y, x) - 0.5;
      // BT.709 inverse matrix (Kr=0.2126, Kb=0.0722), full-range codes.
      const double r = srgb_linearize(Y + 1.5748 * Pr);
      const double g = srgb_linearize(Y - 0.18732427 * Pb - 0.46812427 * Pr);
      const double b = srgb_linearize(Y + 1.8556 * Pb);
      // sRGB primaries to XYZ (D65).
      const double X = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
      const double Yl = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
      const double Z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
      const double fy = lab_f(Yl / Yn);
      const double astar = 500.0 * (lab_f(X / Xn) - fy);
      const double bstar = 200.0 * (fy - lab_f(Z / Zn));
      out(y, x) = std::hypot(astar, bstar);
    }
  }
  return out;
}

Fieldd gradient_magnitude(const Fieldd& field) {
  const int rows = static_cast<int>(field.rows()), cols = static_cast<int>(field.cols());
  if (rows < 3 || cols < 3)
    throw std::invalid_argument("gradient_magnitude: field must be at least 3x3");
  // Sobel is separable: d = [-1,0,1], s = [1,2,1].
  const std::vector<double> d{-1.0, 0.0, 1.0}, s{1.0, 2.0, 1.0};
  Fieldd gx = correlate_cols(correlate_rows(field, d), s);
  Fieldd gy = correlate_rows(correlate_cols(field, d), s);
  return (gx.square() + gy.square()).sqrt();
}

Fieldd downscale2(const Fieldd& field) {
  const int rows = static_cast<int>(field.rows()) / 2, cols = static_cast<int>(field.cols()) / 2;
  if (rows < 1 || cols < 1) throw std::invalid_argument("downscale2: field must be at least 2x2");
  Fieldd out(rows, cols);
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x)
      out(y, x) = 0.25 * (field(2 * y, 2 * x) + field(2 * y, 2 * x + 1) +
                          field(2 * y + 1, 2 * x) + field(2 * y + 1, 2 * x + 1));
  return out;
}

}  // namespace chipqa
