#include "chipqa/statfits.hpp"

#include <algorithm>
#include <vector>

namespace chipqa {
namespace {

constexpr double kAlphaMin = 0.2, kAlphaMax = 10.0, kAlphaStep = 1e-3;

inline double lgamma_ratio_ggd(double a) {
  // Gamma(1/a) Gamma(3/a) / Gamma(2/a)^2, via lgamma for range safety.
  return std::exp(std::lgamma(1.0 / a) + std::lgamma(3.0 / a) - 2.0 * std::lgamma(2.0 / a));
}

inline double lgamma_ratio_aggd(double a) {
  // Gamma(2/a)^2 / (Gamma(1/a) Gamma(3/a)) — reciprocal of the GGD ratio.
  return std::exp(2.0 * std::lgamma(2.0 / a) - std::lgamma(1.0 / a) - std::lgamma(3.0 / a));
}

struct ShapeGrid {
  std::vector<double> alpha;
  std::vector<double> ggd_ratio;   // decreasing in alpha
  std::vector<double> aggd_ratio;  // increasing in alpha
  ShapeGrid() {
    const std::size_t n = static_cast<std::size_t>(std::llround((kAlphaMax - kAlphaMin) / kAlphaStep)) + 1;
    alpha.resize(n);
    ggd_ratio.resize(n);
    aggd_ratio.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      alpha[i] = kAlphaMin + static_cast<double>(i) * kAlphaStep;
      ggd_ratio[i] = lgamma_ratio_ggd(alpha[i]);
      aggd_ratio[i] = lgamma_ratio_aggd(alpha[i]);
    }
  }
};

const ShapeGrid& grid() {
  static const ShapeGrid g;
  return g;
}

// Nearest-ratio lookup on a monotone grid.
double nearest_alpha(const std::vector<double>& ratios, const std::vector<double>& alphas,
                     double target, bool increasing) {
  std::size_t lo;
  if (increasing) {
    auto it = std::lower_bound(ratios.begin(), ratios.end(), target);
    lo = static_cast<std::size_t>(it - ratios.begin());
  } else {
    auto it = std::lower_bound(ratios.begin(), ratios.end(), target, std::greater<double>());
    lo = static_cast<std::size_t>(it - ratios.begin());
  }
  // Compare the two bracketing grid points.
  double best_alpha = alphas.back();
  double best_err = std::abs(ratios.back() - target);
  for (std::size_t i : {lo > 0 ? lo - 1 : 0, std::min(lo, ratios.size() - 1)}) {
    const double err = std::abs(ratios[i] - target);
    if (err < best_err) {
      best_err = err;
      best_alpha = alphas[i];
    }
  }
  return best_alpha;
}

}  // namespace

MomentSummary moments(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("moments: need at least two samples");
  double mean = 0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  double m2 = 0, m3 = 0, m4 = 0;
  for (double v : samples) {
    const double c = v - mean;
    const double c2 = c * c;
    m2 += c2;
    m3 += c2 * c;
    m4 += c2 * c2;
  }
  m2 /= static_cast<double>(n);
  m3 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  MomentSummary s;
  s.mean = mean;
  s.variance = m2;
  if (m2 < kDegenerateVariance) {
    s.degenerate = true;
    return s;
  }
  s.skewness = m3 / std::pow(m2, 1.5);
  s.kurtosis = m4 / (m2 * m2);
  return s;
}

GGDParams fit_ggd(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("fit_ggd: need at least two samples");
  double m1 = 0, m2 = 0;
  for (double v : samples) {
    m1 += std::abs(v);
    m2 += v * v;
  }
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  if (m2 < kDegenerateVariance || m1 <= 0)
    throw numeric_error("fit_ggd: degenerate samples (variance below threshold)");
  const double ratio = m2 / (m1 * m1);
  GGDParams p;
  p.alpha = nearest_alpha(grid().ggd_ratio, grid().alpha, ratio, /*increasing=*/false);
  p.sigma2 = m2;
  return p;
}

AGGDParams fit_aggd(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) throw std::invalid_argument("fit_aggd: need at least two samples");
  double sum_l2 = 0, sum_r2 = 0, m1 = 0, m2 = 0;
  std::size_t n_l = 0, n_r = 0;
  for (double v : samples) {
    m1 += std::abs(v);
    m2 += v * v;
    if (v < 0) {
      sum_l2 += v * v;
      ++n_l;
    } else if (v > 0) {
      sum_r2 += v * v;
      ++n_r;
    }
    // exact zeros excluded from side statistics
  }
  if (n_l == 0 || n_r == 0)
    throw numeric_error("fit_aggd: one-sided distribution (a sign class is empty)");
  m1 /= static_cast<double>(n);
  m2 /= static_cast<double>(n);
  if (m2 < kDegenerateVariance) throw numeric_error("fit_aggd: degenerate samples");

  const double sigma_l = std::sqrt(sum_l2 / static_cast<double>(n_l));
  const double sigma_r = std::sqrt(sum_r2 / static_cast<double>(n_r));
  const double gamma_hat = sigma_l / sigma_r;
  const double r_hat = (m1 * m1) / m2;
  const double g3 = gamma_hat * gamma_hat * gamma_hat;
  const double denom = (gamma_hat * gamma_hat + 1.0);
  const double R_hat = r_hat * (g3 + 1.0) * (gamma_hat + 1.0) / (denom * denom);

  AGGDParams p;
  p.nu = nearest_alpha(grid().aggd_ratio, grid().alpha, R_hat, /*increasing=*/true);
  p.sigma_l2 = sigma_l * sigma_l;
  p.sigma_r2 = sigma_r * sigma_r;
  const double gr = std::exp(std::lgamma(2.0 / p.nu) - std::lgamma(1.0 / p.nu));
  const double beta_scale = std::sqrt(std::exp(std::lgamma(1.0 / p.nu) - std::lgamma(3.0 / p.nu)));
  p.eta = (sigma_r - sigma_l) * beta_scale * gr;
  return p;
}

}  // namespace chipqa
