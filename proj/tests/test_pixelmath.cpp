#include "chipqa/pixelmath.hpp"

#include "chipqa/bandpass.hpp"
#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>
#include <vector>

using namespace chipqa;
using chipqa::test::gaussian_field;

namespace {

PlanarFrame frame_from_ycbcr(const Fieldd& y, double cb, double cr) {
  PlanarFrame f;
  f.y = y;
  f.cb = Fieldd::Constant(y.rows(), y.cols(), cb);
  f.cr = Fieldd::Constant(y.rows(), y.cols(), cr);
  return f;
}

}  // namespace

TEST_SUITE("pixelmath") {

TEST_CASE("luma is the decoded Y' plane: white 1, black 0, green 0.7152") {
  // Full-range Y'CbCr encodings of the primaries under the BT.709 matrix.
  CHECK(luma709(frame_from_ycbcr(Fieldd::Constant(2, 2, 1.0), 0.5, 0.5))(0, 0) == 1.0);
  CHECK(luma709(frame_from_ycbcr(Fieldd::Constant(2, 2, 0.0), 0.5, 0.5))(0, 0) == 0.0);
  const double yg = 0.7152;  // BT.709 green coefficient
  const double cbg = (0.0 - yg) / 1.8556 + 0.5;
  const double crg = (0.0 - yg) / 1.5748 + 0.5;
  CHECK(luma709(frame_from_ycbcr(Fieldd::Constant(2, 2, yg), cbg, crg))(0, 0) ==
        doctest::Approx(0.7152).epsilon(1e-12));
}

TEST_CASE("achromatic pixels have zero chroma at any level") {
  for (double v : {0.0, 0.2, 0.5, 0.9, 1.0}) {
    const Fieldd c = chroma_map(frame_from_ycbcr(Fieldd::Constant(3, 3, v), 0.5, 0.5));
    CHECK(c.abs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("sRGB red lands at the reference CIELAB chroma") {
  // Red (1,0,0): Y = 0.2126, Cb = (0 - Y)/1.8556 + 0.5, Cr = (1 - Y)/1.5748 + 0.5.
  const double y = 0.2126;
  const double cb = (0.0 - y) / 1.8556 + 0.5;
  const double cr = (1.0 - y) / 1.5748 + 0.5;
  const Fieldd c = chroma_map(frame_from_ycbcr(Fieldd::Constant(2, 2, y), cb, cr));
  // Independent CIELAB reference for sRGB red under D65: C* = 104.55.
  CHECK(c(0, 0) == doctest::Approx(104.55).epsilon(0.005));
  CHECK(c.minCoeff() >= 0.0);
}

TEST_CASE("chroma commutes with pixel permutation") {
  PlanarFrame f;
  f.y = gaussian_field(4, 4, 11, 0.5, 0.1).min(1.0).max(0.0);
  f.cb = gaussian_field(4, 4, 12, 0.5, 0.1).min(1.0).max(0.0);
  f.cr = gaussian_field(4, 4, 13, 0.5, 0.1).min(1.0).max(0.0);
  const Fieldd c = chroma_map(f);

  PlanarFrame g = f;  // transpose is a pixel permutation
  g.y = f.y.transpose().eval();
  g.cb = f.cb.transpose().eval();
  g.cr = f.cr.transpose().eval();
  const Fieldd ct = chroma_map(g);
  CHECK((ct - c.transpose()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("gradient of a constant field vanishes") {
  CHECK(gradient_magnitude(Fieldd::Constant(8, 8, 0.37)).abs().maxCoeff() == 0.0);
}

TEST_CASE("a vertical step edge of height h has interior magnitude 4h") {
  const double h = 0.25;
  Fieldd f = Fieldd::Zero(9, 10);
  f.block(0, 5, 9, 5).setConstant(h);  // step between columns 4 and 5
  const Fieldd g = gradient_magnitude(f);
  for (int r = 1; r < 8; ++r) {
    CHECK(g(r, 4) == doctest::Approx(4.0 * h).epsilon(1e-12));
    CHECK(g(r, 5) == doctest::Approx(4.0 * h).epsilon(1e-12));
    CHECK(std::abs(g(r, 2)) <= 1e-12);
    CHECK(std::abs(g(r, 7)) <= 1e-12);
  }
}

TEST_CASE("gradient magnitude is invariant to adding a constant") {
  const Fieldd f = gaussian_field(12, 14, 21);
  const Fieldd g1 = gradient_magnitude(f);
  const Fieldd g2 = gradient_magnitude(Fieldd(f + 3.7));
  CHECK((g1 - g2).abs().maxCoeff() < 1e-11);
}

TEST_CASE("rotating the input by 90 degrees rotates the interior magnitudes") {
  const Fieldd f = gaussian_field(9, 9, 31);
  Fieldd rot(9, 9);  // counter-clockwise quarter turn
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) rot(8 - c, r) = f(r, c);
  const Fieldd g = gradient_magnitude(f);
  const Fieldd gr = gradient_magnitude(rot);
  for (int r = 1; r < 8; ++r)
    for (int c = 1; c < 8; ++c)
      CHECK(gr(8 - c, r) == doctest::Approx(g(r, c)).epsilon(1e-10));
}

TEST_CASE("gradient rejects fields smaller than the kernel") {
  CHECK_THROWS_AS(gradient_magnitude(Fieldd::Zero(2, 5)), std::invalid_argument);
}

TEST_CASE("downscale halves dims and averages 2x2 blocks") {
  CHECK((downscale2(Fieldd::Constant(6, 8, 0.4)) == 0.4).all());
  CHECK(downscale2(Fieldd::Constant(6, 8, 0.4)).rows() == 3);
  CHECK(downscale2(Fieldd::Constant(6, 8, 0.4)).cols() == 4);

  Fieldd checker(4, 4);
  checker << 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0;
  CHECK((downscale2(checker) == 0.5).all());

  Fieldd ramp(4, 4);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) ramp(r, c) = r * 4 + c;
  const Fieldd d = downscale2(ramp);
  CHECK(d(0, 0) == 2.5);
  CHECK(d(0, 1) == 4.5);
  CHECK(d(1, 0) == 10.5);
  CHECK(d(1, 1) == 12.5);
}

TEST_CASE("downscale drops trailing odd rows and columns") {
  const Fieldd d = downscale2(gaussian_field(7, 5, 41));
  CHECK(d.rows() == 3);
  CHECK(d.cols() == 2);
}

TEST_CASE("downscale preserves the global mean on even dims") {
  const Fieldd f = gaussian_field(32, 48, 51);
  CHECK(downscale2(f).mean() == doctest::Approx(f.mean()).epsilon(1e-9));
}

TEST_CASE("separable filtering matches a brute-force 2-D window") {
  const Fieldd f = gaussian_field(10, 12, 61);
  const auto w = gaussian_window(3);
  const Fieldd fast = separable_filter(f, w);
  const int K = 3, rows = 10, cols = 12;
  for (int y = 0; y < rows; ++y)
    for (int x = 0; x < cols; ++x) {
      double acc = 0;
      for (int dy = -K; dy <= K; ++dy)
        for (int dx = -K; dx <= K; ++dx) {
          const int yy = std::clamp(y + dy, 0, rows - 1);
          const int xx = std::clamp(x + dx, 0, cols - 1);
          acc += w[static_cast<std::size_t>(dy + K)] * w[static_cast<std::size_t>(dx + K)] *
                 f(yy, xx);
        }
      CHECK(fast(y, x) == doctest::Approx(acc).epsilon(1e-12));
    }
}

}  // TEST_SUITE
