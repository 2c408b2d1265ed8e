#include "chipqa/bandpass.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

using namespace chipqa;
using chipqa::test::gaussian_field;

TEST_SUITE("bandpass") {

TEST_CASE("temporal taps match n(1-an)exp(-2an) with the (0,+,0,-,-) signs") {
  const auto k = temporal_kernel(0.5, 5);
  REQUIRE(k.taps.size() == 5);
  for (int n = 0; n < 5; ++n) {
    const double ref = n * (1.0 - 0.5 * n) * std::exp(-n);
    CHECK(k.taps[static_cast<std::size_t>(n)] == doctest::Approx(ref).epsilon(1e-12));
  }
  // Six-decimal values read off the closed form.
  CHECK(k.taps[1] == doctest::Approx(0.183940).epsilon(1e-5));
  CHECK(k.taps[3] == doctest::Approx(-0.074681).epsilon(1e-4));
  CHECK(k.taps[4] == doctest::Approx(-0.073263).epsilon(1e-4));
  CHECK(k.taps[0] == 0.0);
  CHECK(k.taps[2] == 0.0);
  CHECK(k.taps[1] > 0.0);
  CHECK(k.taps[3] < 0.0);
  CHECK(k.taps[4] < 0.0);
}

TEST_CASE("the leading tap is zero and signs flip past n = 1/a") {
  for (double a : {0.2, 0.3, 0.7, 1.5}) {
    const auto k = temporal_kernel(a, 8);
    CHECK(k.taps[0] == 0.0);
    for (int n = 1; n < 8; ++n) {
      const double tap = k.taps[static_cast<std::size_t>(n)];
      if (n < 1.0 / a) CHECK(tap > 0.0);
      if (n > 1.0 / a) CHECK(tap < 0.0);
    }
  }
  CHECK_THROWS_AS(temporal_kernel(0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(temporal_kernel(0.5, 1), std::invalid_argument);
}

TEST_CASE("the taps do not sum to zero, so static content stays non-degenerate") {
  const auto k = temporal_kernel(0.5, 5);
  const double sum = std::accumulate(k.taps.begin(), k.taps.end(), 0.0);
  CHECK(sum > 0.03);
  CHECK(sum < 0.04);
}

TEST_CASE("gaussian window is unit-sum, symmetric, and peaked at the center") {
  for (int K : {1, 3, 5}) {
    const auto w = gaussian_window(K);
    REQUIRE(static_cast<int>(w.size()) == 2 * K + 1);
    CHECK(std::accumulate(w.begin(), w.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < K; ++i)
      CHECK(w[static_cast<std::size_t>(i)] ==
            doctest::Approx(w[static_cast<std::size_t>(2 * K - i)]).epsilon(1e-15));
    CHECK(w[static_cast<std::size_t>(K)] == *std::max_element(w.begin(), w.end()));
  }
  CHECK_THROWS_AS(gaussian_window(0), std::invalid_argument);
}

TEST_CASE("normalization of a constant field is exactly degenerate") {
  const auto r = mscn(Fieldd::Constant(32, 32, 0.6), 3, 1.0 / 255.0);
  CHECK(r.mscn.abs().maxCoeff() < 1e-12);
  CHECK((r.mu - 0.6).abs().maxCoeff() < 1e-12);
  CHECK(r.sigma.abs().maxCoeff() < 1e-7);  // sqrt of a fp-cancelled moment difference
}

TEST_CASE("normalization validates its parameters") {
  CHECK_THROWS_AS(mscn(Fieldd::Zero(32, 32), 3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(mscn(Fieldd::Zero(32, 32), 3, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(mscn(Fieldd::Zero(7, 7), 3, 0.01), std::invalid_argument);
}

TEST_CASE("normalized Gaussian noise is symmetric and sub-Gaussian in the tails") {
  // Including the centre pixel in the local moments self-normalizes: each
  // coefficient is bounded by ~1/sqrt(w0), which trims the tails of white
  // noise.  An independent oracle (direct convolution with the same K=3,
  // sigma = K/3 unit-sum window over 10^6 iid N(0,1) pixels) puts the
  // kurtosis at 2.202 +/- 0.005 across seeds, well below the Gaussian 3.
  const Fieldd f = gaussian_field(1000, 1000, 71);
  const auto r = mscn(f, 3, 1.0 / 255.0);
  std::vector<double> v(r.mscn.data(), r.mscn.data() + r.mscn.size());
  const auto m = chipqa::test::brute_moments(v);
  CHECK(m.kurtosis > 2.15);
  CHECK(m.kurtosis < 2.25);
  CHECK(std::abs(m.mean) < 0.01);
  CHECK(std::abs(m.skewness) < 0.01);
}

TEST_CASE("normalization is invariant to shifts and asymptotically to scale") {
  const Fieldd f = gaussian_field(64, 64, 81, 0.5, 0.1);
  const auto base = mscn(f, 3, 1.0 / 255.0);

  const auto shifted = mscn(Fieldd(f + 5.0), 3, 1.0 / 255.0);
  CHECK((shifted.mscn - base.mscn).abs().maxCoeff() < 1e-6);

  // (sI - s mu)/(s sigma + C) -> (I - mu)/sigma as s grows.
  const Fieldd limit = (f - base.mu) / base.sigma.max(1e-300);
  double prev = std::numeric_limits<double>::infinity();
  for (double s : {1e2, 1e4, 1e6}) {
    const auto scaled = mscn(Fieldd(f * s), 3, 1.0 / 255.0);
    const double dev = (scaled.mscn - limit).abs().maxCoeff();
    CHECK(dev < prev);
    prev = dev;
  }
  CHECK(prev < 1e-4);
}

TEST_CASE("sigma field is non-negative and dimensioned like the input") {
  const auto r = mscn(gaussian_field(40, 50, 91), 3, 1.0 / 255.0);
  CHECK(r.sigma.minCoeff() >= 0.0);
  CHECK(r.sigma.rows() == 40);
  CHECK(r.sigma.cols() == 50);
}

TEST_CASE("filtering a temporally constant group collapses to the tap sum") {
  const auto k = temporal_kernel(0.5, 5);
  const double tapsum = std::accumulate(k.taps.begin(), k.taps.end(), 0.0);
  const std::vector<Fieldd> group(5, Fieldd::Constant(6, 6, 0.8));
  const auto out = temporal_filter(group, k);
  REQUIRE(out.size() == 5);
  for (const auto& f : out) CHECK((f - 0.8 * tapsum).abs().maxCoeff() < 1e-12);
}

TEST_CASE("an impulse response carries the taps plus their reflection") {
  const auto k = temporal_kernel(0.5, 5);
  std::vector<Fieldd> group(5, Fieldd::Zero(2, 2));
  group[2](1, 1) = 1.0;  // impulse at frame 2 of 5, one pixel
  const auto out = temporal_filter(group, k);
  // y[t] = k[t-2] (for t >= 2) + k[t+2] (reflected tail, t <= 2).
  const auto& taps = k.taps;
  const double expect[5] = {taps[2], taps[3], taps[0] + taps[4], taps[1], taps[2]};
  for (int t = 0; t < 5; ++t) {
    CHECK(out[static_cast<std::size_t>(t)](1, 1) ==
          doctest::Approx(expect[t]).epsilon(1e-12));
    CHECK(out[static_cast<std::size_t>(t)](0, 0) == 0.0);
  }
}

TEST_CASE("a pure-delay kernel shifts the group with a reflected head") {
  TemporalKernel delay;
  delay.taps = {0, 1, 0, 0, 0};
  std::vector<Fieldd> group;
  for (int t = 0; t < 5; ++t) group.push_back(Fieldd::Constant(2, 2, t + 1.0));
  const auto out = temporal_filter(group, delay);
  // y[t] = x[|t-1|] -> values (2, 1, 2, 3, 4).
  const double expect[5] = {2, 1, 2, 3, 4};
  for (int t = 0; t < 5; ++t)
    CHECK(out[static_cast<std::size_t>(t)](0, 0) == doctest::Approx(expect[t]).epsilon(1e-15));
}

TEST_CASE("temporal filtering is linear") {
  const auto k = temporal_kernel(0.5, 5);
  std::vector<Fieldd> x, y, mix;
  for (int t = 0; t < 5; ++t) {
    x.push_back(gaussian_field(8, 8, 100 + static_cast<std::uint64_t>(t)));
    y.push_back(gaussian_field(8, 8, 200 + static_cast<std::uint64_t>(t)));
    mix.push_back(Fieldd(1.7 * x.back() - 0.4 * y.back()));
  }
  const auto fx = temporal_filter(x, k);
  const auto fy = temporal_filter(y, k);
  const auto fm = temporal_filter(mix, k);
  for (int t = 0; t < 5; ++t) {
    const Fieldd ref = 1.7 * fx[static_cast<std::size_t>(t)] - 0.4 * fy[static_cast<std::size_t>(t)];
    CHECK((fm[static_cast<std::size_t>(t)] - ref).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("white-noise output variance at the causal frame matches the tap energy") {
  const auto k = temporal_kernel(0.5, 5);
  double energy = 0;
  for (double tap : k.taps) energy += tap * tap;
  std::vector<Fieldd> group;
  for (int t = 0; t < 5; ++t) group.push_back(gaussian_field(512, 512, 300 + static_cast<std::uint64_t>(t)));
  const auto out = temporal_filter(group, k);
  // Frame 4 uses lags 0..4 without reflection, so Var = sum(taps^2) * Var(input).
  const Fieldd& last = out[4];
  const double var = (last - last.mean()).square().mean();
  CHECK(var == doctest::Approx(energy).epsilon(0.02));
}

TEST_CASE("group/kernel length mismatch is rejected") {
  const auto k = temporal_kernel(0.5, 5);
  const std::vector<Fieldd> group(4, Fieldd::Zero(4, 4));
  CHECK_THROWS_AS(temporal_filter(group, k), std::invalid_argument);
}

}  // TEST_SUITE
