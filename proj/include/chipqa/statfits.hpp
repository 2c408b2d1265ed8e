#pragma once

// Sample-moment statistics and moment-matching parametric fits for the
// generalized Gaussian family (symmetric and asymmetric).

#include "chipqa/core.hpp"

#include <cmath>
#include <span>

namespace chipqa {

inline constexpr double kDegenerateVariance = 1e-12;

struct MomentSummary {
  double mean = 0, variance = 0, skewness = 0, kurtosis = 0;
  bool degenerate = false;  // variance below threshold: skewness/kurtosis not meaningful
};

struct GGDParams {
  double alpha = 0;   // shape
  double sigma2 = 0;  // variance (second raw moment about zero)
};

struct AGGDParams {
  double nu = 0;        // shape
  double sigma_l2 = 0;  // left-side variance
  double sigma_r2 = 0;  // right-side variance
  double eta = 0;       // mean-offset parameter
};

// Population-form moments (divide by n): kurtosis = m4/m2^2, skewness = m3/m2^{3/2}.
MomentSummary moments(std::span<const double> samples);

// Moment matching on the shape grid alpha in [0.2, 10] step 1e-3, nearest-ratio lookup
// of r(alpha) = Gamma(1/a)Gamma(3/a)/Gamma(2/a)^2 = m2/m1^2; sigma2 = m2.
// Throws numeric_error on degenerate samples.
GGDParams fit_ggd(std::span<const double> samples);

// Standard asymmetric moment-matching estimator; side deviations exclude exact zeros.
// Throws numeric_error when one sign class is empty.
AGGDParams fit_aggd(std::span<const double> samples);

// Eigen-friendly overloads for dense fields/vectors.
template <typename Derived>
MomentSummary moments(const Eigen::DenseBase<Derived>& x) {
  const auto& d = x.derived().eval();
  return moments(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())));
}
template <typename Derived>
GGDParams fit_ggd(const Eigen::DenseBase<Derived>& x) {
  const auto& d = x.derived().eval();
  return fit_ggd(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())));
}
template <typename Derived>
AGGDParams fit_aggd(const Eigen::DenseBase<Derived>& x) {
  const auto& d = x.derived().eval();
  return fit_aggd(std::span<const double>(d.data(), static_cast<std::size_t>(d.size())));
}

}  // namespace chipqa
