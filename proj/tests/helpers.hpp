#pragma once

// Shared fixtures for the test suite: seeded samplers, scratch-file helpers,
// and small brute-force reference implementations.

#include "chipqa/core.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace chipqa::test {

inline Fieldd gaussian_field(int rows, int cols, std::uint64_t seed, double mean = 0.0,
                             double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(mean, sigma);
  Fieldd f(rows, cols);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = dist(rng);
  return f;
}

inline Fieldd uniform_field(int rows, int cols, std::uint64_t seed, double lo = 0.0,
                            double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Fieldd f(rows, cols);
  for (Eigen::Index i = 0; i < f.size(); ++i) f.data()[i] = dist(rng);
  return f;
}

// Gamma-transform sampler for the symmetric generalized Gaussian family:
// X = b * G^{1/alpha} * sign, with G ~ Gamma(1/alpha, 1), gives |X|^alpha
// proportional to a gamma variate; b is chosen so Var X = sigma2.
inline std::vector<double> ggd_samples(std::size_t n, double alpha, double sigma2,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> gamma(1.0 / alpha, 1.0);
  std::bernoulli_distribution coin(0.5);
  const double b =
      std::sqrt(sigma2 * std::tgamma(1.0 / alpha) / std::tgamma(3.0 / alpha));
  std::vector<double> out(n);
  for (auto& x : out) {
    const double mag = b * std::pow(gamma(rng), 1.0 / alpha);
    x = coin(rng) ? mag : -mag;
  }
  return out;
}

// Scratch directory for file-format round trips, unique per process.
inline std::filesystem::path scratch_dir() {
  static const std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("chipqa_tests_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

inline std::string scratch_file(const std::string& name) {
  return (scratch_dir() / name).string();
}

// Brute-force population moments for oracle comparisons.
struct BruteMoments {
  double mean = 0, variance = 0, skewness = 0, kurtosis = 0;
};

inline BruteMoments brute_moments(const std::vector<double>& v) {
  BruteMoments m;
  const double n = static_cast<double>(v.size());
  for (double x : v) m.mean += x;
  m.mean /= n;
  double m2 = 0, m3 = 0, m4 = 0;
  for (double x : v) {
    const double d = x - m.mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  m.variance = m2;
  m.skewness = m3 / std::pow(m2, 1.5);
  m.kurtosis = m4 / (m2 * m2);
  return m;
}

}  // namespace chipqa::test
