#include "chipqa/statfits.hpp"

#include "doctest.h"
#include "helpers.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace chipqa;
using chipqa::test::ggd_samples;

namespace {

std::vector<double> normal_samples(std::size_t n, double sigma, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, sigma);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

std::vector<double> laplace_samples(std::size_t n, double b, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> v(n);
  for (auto& x : v) {
    const double t = u(rng);
    x = -b * (t < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(t));
  }
  return v;
}

}  // namespace

TEST_SUITE("statfits") {

TEST_CASE("hand-computed central moments of {0,0,0,1}") {
  const std::vector<double> v = {0, 0, 0, 1};
  const auto m = moments(std::span<const double>(v));
  CHECK(m.mean == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(m.variance == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(m.skewness == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));  // 1.1547...
  CHECK(m.kurtosis == doctest::Approx(7.0 / 3.0).epsilon(1e-12));             // 2.3333...
  CHECK_FALSE(m.degenerate);
}

TEST_CASE("a balanced two-point sample has kurtosis 1 and no skew") {
  const std::vector<double> v = {-1, 1, -1, 1};
  const auto m = moments(std::span<const double>(v));
  CHECK(m.kurtosis == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(std::abs(m.skewness) <= 1e-15);
}

TEST_CASE("standard-normal kurtosis concentrates near 3") {
  const auto v = normal_samples(1'000'000, 1.0, 101);
  const auto m = moments(std::span<const double>(v));
  CHECK(m.kurtosis > 2.97);
  CHECK(m.kurtosis < 3.03);
}

TEST_CASE("zero-variance samples are flagged degenerate") {
  const std::vector<double> v(16, 0.42);
  const auto m = moments(std::span<const double>(v));
  CHECK(m.degenerate);
  CHECK(std::abs(m.variance) <= 1e-15);
}

TEST_CASE("moments are affine-equivariant") {
  const auto v = normal_samples(20'000, 1.0, 111);
  std::vector<double> w(v.size()), neg(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    w[i] = 2.5 * v[i] - 7.0;
    neg[i] = -v[i];
  }
  const auto mv = moments(std::span<const double>(v));
  const auto mw = moments(std::span<const double>(w));
  const auto mn = moments(std::span<const double>(neg));
  CHECK(mw.kurtosis == doctest::Approx(mv.kurtosis).epsilon(1e-9));
  CHECK(mw.skewness == doctest::Approx(mv.skewness).epsilon(1e-6));
  CHECK(mn.skewness == doctest::Approx(-mv.skewness).epsilon(1e-9));
}

TEST_CASE("shape fit recovers the Gaussian member") {
  const auto v = normal_samples(1'000'000, 1.0, 121);
  const auto p = fit_ggd(std::span<const double>(v));
  CHECK(p.alpha > 1.95);
  CHECK(p.alpha < 2.05);
  CHECK(p.sigma2 > 0.98);
  CHECK(p.sigma2 < 1.02);
}

TEST_CASE("shape fit recovers the Laplacian member") {
  const auto v = laplace_samples(1'000'000, 1.0, 131);
  const auto p = fit_ggd(std::span<const double>(v));
  CHECK(p.alpha > 0.95);
  CHECK(p.alpha < 1.05);
  CHECK(p.sigma2 > 1.96);  // Laplacian variance is 2 b^2
  CHECK(p.sigma2 < 2.04);
}

TEST_CASE("shape fit recovers a heavy-tailed member from the sampling oracle") {
  const auto v = ggd_samples(1'000'000, 0.5, 1.0, 141);
  const auto p = fit_ggd(std::span<const double>(v));
  CHECK(p.alpha == doctest::Approx(0.5).epsilon(0.05));
  CHECK(p.sigma2 == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("shape fit is scale-equivariant") {
  const auto v = ggd_samples(200'000, 1.5, 1.0, 151);
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = 3.0 * v[i];
  const auto pv = fit_ggd(std::span<const double>(v));
  const auto pw = fit_ggd(std::span<const double>(w));
  CHECK(pw.alpha == doctest::Approx(pv.alpha).epsilon(0.002));
  CHECK(pw.sigma2 == doctest::Approx(9.0 * pv.sigma2).epsilon(1e-9));
}

TEST_CASE("the shape grid clamps at both ends") {
  // Uniform data is flatter than any grid member: ratio pushes to the top cap.
  std::mt19937_64 rng(161);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> flat(100'000);
  for (auto& x : flat) x = u(rng);
  CHECK(fit_ggd(std::span<const double>(flat)).alpha == doctest::Approx(10.0));

  // A two-point sign-symmetric mixture with a rare huge level: the moment
  // ratio m2/m1^2 is ~83, far past the bottom grid member's ~15.9, so the
  // shape must clamp at 0.2 exactly (deterministic, unlike heavy-tail draws).
  std::vector<double> heavy(100'000, 1.0);
  for (std::size_t i = 0; i < heavy.size(); ++i) {
    if (i % 2) heavy[i] = -heavy[i];
    if (i % 10'000 == 0) heavy[i] *= 1000.0;
  }
  CHECK(fit_ggd(std::span<const double>(heavy)).alpha == doctest::Approx(0.2));

  // Constant nonzero magnitude is the opposite extreme: ratio exactly 1,
  // below every grid member, so the shape clamps at the top.
  const std::vector<double> ones(64, 1.0);
  CHECK(fit_ggd(std::span<const double>(ones)).alpha == doctest::Approx(10.0));
}

TEST_CASE("degenerate and tiny sample sets are rejected") {
  // The family is zero-mean: degeneracy means vanishing second moment.
  const std::vector<double> zeros(64, 0.0);
  CHECK_THROWS_AS(fit_ggd(std::span<const double>(zeros)), numeric_error);
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(fit_ggd(std::span<const double>(one)), std::invalid_argument);
}

TEST_CASE("asymmetric fit is symmetric on Gaussian input") {
  const auto v = normal_samples(1'000'000, 1.0, 171);
  const auto p = fit_aggd(std::span<const double>(v));
  CHECK(p.nu == doctest::Approx(2.0).epsilon(0.05));
  const double ratio = p.sigma_l2 / p.sigma_r2;
  CHECK(ratio > 0.95);
  CHECK(ratio < 1.05);
  CHECK(std::abs(p.eta) < 0.01);
}

TEST_CASE("negating the input swaps the side variances and negates eta") {
  const auto v = ggd_samples(300'000, 1.2, 1.0, 181);
  std::vector<double> skewed(v.size()), neg(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    skewed[i] = v[i] > 0 ? 1.8 * v[i] : v[i];  // stretch the right side
    neg[i] = -skewed[i];
  }
  const auto p = fit_aggd(std::span<const double>(skewed));
  const auto q = fit_aggd(std::span<const double>(neg));
  CHECK(q.sigma_l2 == doctest::Approx(p.sigma_r2).epsilon(1e-12));
  CHECK(q.sigma_r2 == doctest::Approx(p.sigma_l2).epsilon(1e-12));
  CHECK(q.nu == doctest::Approx(p.nu).epsilon(1e-12));
  CHECK(q.eta == doctest::Approx(-p.eta).epsilon(1e-12));
}

TEST_CASE("a sign-split half-Gaussian mixture shows the planted variance ratio") {
  // Left side from |N(0,1)|, right side from |N(0,2)|: population ratio 4.
  std::mt19937_64 rng(191);
  std::normal_distribution<double> n1(0.0, 1.0), n2(0.0, 2.0);
  std::bernoulli_distribution side(0.5);
  std::vector<double> v(1'000'000);
  for (auto& x : v) x = side(rng) ? std::abs(n2(rng)) : -std::abs(n1(rng));
  const auto p = fit_aggd(std::span<const double>(v));
  const double ratio = p.sigma_r2 / p.sigma_l2;
  CHECK(ratio > 3.6);
  CHECK(ratio < 4.4);
  CHECK(p.eta > 0.0);  // right side is heavier
}

TEST_CASE("one-signed samples cannot be fit asymmetrically") {
  std::vector<double> pos(1000);
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = 0.5 + static_cast<double>(i % 7);
  CHECK_THROWS_AS(fit_aggd(std::span<const double>(pos)), numeric_error);
  // Zeros do not count toward either side.
  std::vector<double> zeros_and_pos = {0, 0, 0, 1, 2, 3};
  CHECK_THROWS_AS(fit_aggd(std::span<const double>(zeros_and_pos)), numeric_error);
}

TEST_CASE("asymmetric and symmetric shape estimates agree on symmetric data") {
  const auto v = ggd_samples(1'000'000, 1.0, 1.0, 201);
  const auto g = fit_ggd(std::span<const double>(v));
  const auto a = fit_aggd(std::span<const double>(v));
  CHECK(a.nu == doctest::Approx(g.alpha).epsilon(0.05));
}

TEST_CASE("eigen expressions feed the fits directly") {
  const Fieldd f = chipqa::test::gaussian_field(300, 300, 211);
  const auto p = fit_ggd(f);
  CHECK(p.alpha == doctest::Approx(2.0).epsilon(0.1));
  const auto m = moments(f);
  CHECK(m.variance == doctest::Approx(1.0).epsilon(0.05));
}

}  // TEST_SUITE
