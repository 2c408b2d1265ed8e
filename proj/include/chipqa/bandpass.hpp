#pragma once

// Spatial divisive normalization (local mean subtraction + contrast normalization)
// and the causal temporal bandpass filter applied per T'-frame group.

#include "chipqa/core.hpp"
#include "chipqa/pixelmath.hpp"

#include <cmath>
#include <vector>

namespace chipqa {

struct MscnResult {
  Fieldd mscn;   // (I - mu) / (sigma + C)
  Fieldd mu;     // Gaussian-weighted local mean
  Fieldd sigma;  // Gaussian-weighted local deviation, >= 0
};

// Gaussian window sampled out to 3 standard deviations (sigma = K/3), unit sum.
inline std::vector<double> gaussian_window(int K) {
  if (K < 1) throw std::invalid_argument("gaussian_window: K must be >= 1");
  const double sigma = K / 3.0;
  std::vector<double> w(static_cast<std::size_t>(2 * K + 1));
  double sum = 0.0;
  for (int i = -K; i <= K; ++i) {
    w[static_cast<std::size_t>(i + K)] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += w[static_cast<std::size_t>(i + K)];
  }
  for (auto& v : w) v /= sum;
  return w;
}

// Local moments via separable Gaussian filtering with edge replication.
// sigma^2 = E[I^2] - mu^2 under the window (identical to the windowed
// (I - mu)^2 form because mu is held at the center pixel).
inline MscnResult mscn(const Fieldd& field, int K, double C) {
  if (C <= 0) throw std::invalid_argument("mscn: stabilizer must be positive");
  if (field.rows() <= 2 * K + 1 || field.cols() <= 2 * K + 1)
    throw std::invalid_argument("mscn: field dims must exceed the window size");
  const auto w = gaussian_window(K);
  MscnResult r;
  r.mu = separable_filter(field, w);
  Fieldd m2 = separable_filter(Fieldd(field.square()), w);
  r.sigma = (m2 - r.mu.square()).max(0.0).sqrt();
  r.mscn = (field - r.mu) / (r.sigma + C);
  return r;
}

struct TemporalKernel {
  std::vector<double> taps;  // k[n] = n (1 - a n) exp(-2 a n)
  double a = 0.5;
};

inline TemporalKernel temporal_kernel(double a, int P) {
  if (a <= 0) throw std::invalid_argument("temporal_kernel: decay must be positive");
  if (P < 2) throw std::invalid_argument("temporal_kernel: need at least two taps");
  TemporalKernel k;
  k.a = a;
  k.taps.resize(static_cast<std::size_t>(P));
  for (int n = 0; n < P; ++n) k.taps[static_cast<std::size_t>(n)] = n * (1.0 - a * n) * std::exp(-2.0 * a * n);
  return k;
}

// Causal per-pixel convolution along time with reflective padding at the group
// boundary (x[-i] = x[i]); output has exactly T' frames.
inline std::vector<Fieldd> temporal_filter(const std::vector<Fieldd>& group,
                                           const TemporalKernel& kernel) {
  const int T = static_cast<int>(group.size());
  if (T != static_cast<int>(kernel.taps.size()))
    throw std::invalid_argument("temporal_filter: group length must equal kernel length");
  std::vector<Fieldd> out(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t) {
    Fieldd acc = Fieldd::Zero(group[0].rows(), group[0].cols());
    for (int i = 0; i < T; ++i) {
      int j = t - i;
      if (j < 0) j = -j;  // reflect
      acc += kernel.taps[static_cast<std::size_t>(i)] * group[static_cast<std::size_t>(j)];
    }
    out[static_cast<std::size_t>(t)] = std::move(acc);
  }
  return out;
}

}  // namespace chipqa
