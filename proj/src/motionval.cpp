#include "chipqa/motionval.hpp"

#include "chipqa/bandpass.hpp"
#include "chipqa/stchips.hpp"

#include <json.hpp>

#include <cmath>
#include <random>
#include <sstream>

namespace chipqa {
namespace {

constexpr double kImpulseDensity = 1.0 / 16.0;
constexpr double kPeakAmplitude = 0.3;

long shift_round(double v) { return std::llround(v); }  // half away from zero

// Fold an orientation difference into [0, pi/2] (theta and theta+pi coincide).
double fold_offset(double a, double b) {
  double d = std::fmod(std::abs(a - b), M_PI);
  return d > M_PI_2 ? M_PI - d : d;
}

}  // namespace

void SyntheticSpec::validate() const {
  if (width < 64 || height < 64)
    throw std::invalid_argument("synthetic video must be at least 64x64");
  if (frames < 1) throw std::invalid_argument("synthetic video needs at least one frame");
  if (speed < 0) throw std::invalid_argument("speed must be non-negative");
  if (theta < 0 || theta >= M_PI)
    throw std::invalid_argument("orientation must lie in [0, pi)");
  if (texture == TextureKind::SmoothedNoise && sigma_s < 0)
    throw std::invalid_argument("blur width must be non-negative");
}

Fieldd periodic_gaussian_blur(const Fieldd& field, double sigma) {
  if (sigma <= 0) return field;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  Vec kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
  kernel /= kernel.sum();

  const Eigen::Index rows = field.rows(), cols = field.cols();
  Fieldd tmp(rows, cols), out(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        Eigen::Index cc = (c + k) % cols;
        if (cc < 0) cc += cols;
        acc += kernel[k + radius] * field(r, cc);
      }
      tmp(r, c) = acc;
    }
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) {
      double acc = 0;
      for (int k = -radius; k <= radius; ++k) {
        Eigen::Index rr = (r + k) % rows;
        if (rr < 0) rr += rows;
        acc += kernel[k + radius] * tmp(rr, c);
      }
      out(r, c) = acc;
    }
  return out;
}

Fieldd impulse_image(const SyntheticSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Fieldd base(spec.height, spec.width);
  for (Eigen::Index r = 0; r < base.rows(); ++r)
    for (Eigen::Index c = 0; c < base.cols(); ++c) {
      const double u = unit(rng);
      base(r, c) = u < 0.5 * kImpulseDensity ? -1.0 : (u < kImpulseDensity ? 1.0 : 0.0);
    }
  return base;
}

Fieldd make_texture(const SyntheticSpec& spec) {
  spec.validate();
  Fieldd base = impulse_image(spec);
  if (spec.texture == TextureKind::SmoothedNoise)
    base = periodic_gaussian_blur(base, spec.sigma_s);
  const double peak = base.abs().maxCoeff();
  if (peak > 0) base *= kPeakAmplitude / peak;
  return base + 0.5;
}

std::vector<Fieldd> make_video(const SyntheticSpec& spec) {
  spec.validate();
  const double vx = spec.speed * std::cos(spec.theta);
  const double vy = spec.speed * std::sin(spec.theta);

  std::vector<Fieldd> frames;
  frames.reserve(static_cast<std::size_t>(spec.frames));

  if (spec.texture == TextureKind::WhiteNoise || spec.sigma_s <= 0) {
    // A Dirac comb has no band-limited translation: shift by the nearest
    // lattice displacement, which is lossless for integer steps.
    const Fieldd base = make_texture(spec);
    const Eigen::Index H = base.rows(), W = base.cols();
    for (int t = 0; t < spec.frames; ++t) {
      long dx = shift_round(t * vx) % W;
      long dy = shift_round(t * vy) % H;
      if (dx < 0) dx += W;
      if (dy < 0) dy += H;
      Fieldd f(H, W);
      for (Eigen::Index r = 0; r < H; ++r) {
        const Eigen::Index sr = (r - dy + H) % H;
        for (Eigen::Index c = 0; c < W; ++c) f(r, c) = base(sr, (c - dx + W) % W);
      }
      frames.push_back(std::move(f));
    }
    return frames;
  }

  // Smoothed noise is a Gaussian mixture field: translating the impulse
  // centers translates the continuous field exactly, and sampling the lattice
  // afterwards loses nothing.  Fractional displacements therefore carry no
  // interpolation penalty (no per-frame blur jitter, no velocity rounding),
  // and integer displacements reproduce circular shifts bit-exactly because
  // every kernel argument is the same shifted integer difference.
  const Fieldd impulses = impulse_image(spec);
  const Eigen::Index H = impulses.rows(), W = impulses.cols();
  struct Impulse {
    double x, y, a;
  };
  std::vector<Impulse> centers;
  for (Eigen::Index r = 0; r < H; ++r)
    for (Eigen::Index c = 0; c < W; ++c)
      if (impulses(r, c) != 0.0)
        centers.push_back({static_cast<double>(c), static_cast<double>(r), impulses(r, c)});

  const double sigma = spec.sigma_s;
  const int radius = static_cast<int>(std::ceil(3.0 * sigma)) + 1;
  const int span = 2 * radius + 2;
  std::vector<double> wx(static_cast<std::size_t>(span)), wy(static_cast<std::size_t>(span));
  const auto render = [&](double dx, double dy) {
    Fieldd f = Fieldd::Zero(H, W);
    for (const Impulse& im : centers) {
      const double cx = im.x + dx, cy = im.y + dy;
      const long bx = static_cast<long>(std::floor(cx)) - radius;
      const long by = static_cast<long>(std::floor(cy)) - radius;
      for (int i = 0; i < span; ++i) {
        const double ddx = static_cast<double>(bx + i) - cx;
        const double ddy = static_cast<double>(by + i) - cy;
        wx[static_cast<std::size_t>(i)] = std::exp(-0.5 * ddx * ddx / (sigma * sigma));
        wy[static_cast<std::size_t>(i)] = std::exp(-0.5 * ddy * ddy / (sigma * sigma));
      }
      for (int j = 0; j < span; ++j) {
        const Eigen::Index rr = static_cast<Eigen::Index>(((by + j) % H + H) % H);
        const double aj = im.a * wy[static_cast<std::size_t>(j)];
        for (int i = 0; i < span; ++i) {
          const Eigen::Index cc = static_cast<Eigen::Index>(((bx + i) % W + W) % W);
          f(rr, cc) += aj * wx[static_cast<std::size_t>(i)];
        }
      }
    }
    return f;
  };

  // One gain for the whole clip, anchored on the first frame, keeps frames
  // exact translates of each other.
  Fieldd first = render(0.0, 0.0);
  const double peak = first.abs().maxCoeff();
  const double gain = peak > 0 ? kPeakAmplitude / peak : 0.0;
  frames.push_back(Fieldd(first * gain + 0.5));
  for (int t = 1; t < spec.frames; ++t) {
    // Snap near-integer displacements (cos/sin residue at axis angles) so the
    // lossless-shift invariant survives floating point.
    double dx = static_cast<double>(t) * vx, dy = static_cast<double>(t) * vy;
    if (std::abs(dx - std::round(dx)) < 1e-9) dx = std::round(dx);
    if (std::abs(dy - std::round(dy)) < 1e-9) dy = std::round(dy);
    frames.push_back(Fieldd(render(dx, dy) * gain + 0.5));
  }
  return frames;
}

AngleReport evaluate_orientation(const std::vector<Fieldd>& frames, double theta_star,
                                 double speed, const PipelineConfig& cfg) {
  cfg.validate();
  AngleReport rep;
  rep.theta = std::fmod(std::fmod(theta_star, M_PI) + M_PI, M_PI);
  rep.speed = speed;
  rep.not_applicable = speed == 0.0;
  const int Q = cfg.Q;
  rep.angle_histogram.assign(static_cast<std::size_t>(Q), 0);
  rep.offsets.resize(static_cast<std::size_t>(Q));
  for (int k = 0; k < Q; ++k) rep.offsets[static_cast<std::size_t>(k)] = k * M_PI / Q;
  rep.bin_counts.assign(static_cast<std::size_t>(Q), 0);
  std::vector<double> kurt_sum(static_cast<std::size_t>(Q), 0.0);
  std::vector<double> dev_sum(static_cast<std::size_t>(Q), 0.0);

  const ChipLut lut = build_lut(Q, cfg.R);
  const TemporalKernel kernel = temporal_kernel(cfg.a, cfg.T);
  const long n_groups = static_cast<long>(frames.size()) / cfg.T;
  if (n_groups < 1) throw format_error("video shorter than one complete frame group");

  double abs_dev_total = 0;
  for (long g = 0; g < n_groups; ++g) {
    std::vector<Fieldd> group;
    for (int m = 0; m < cfg.T; ++m)
      group.push_back(mscn(frames[static_cast<std::size_t>(g * cfg.T + m)], cfg.K, cfg.C_stab).mscn);
    const std::vector<Fieldd> band = temporal_filter(group, kernel);
    CandidateScan scan;
    const ChipFrame chips = extract_chips(band, lut, cfg.D, g, &scan);

    for (int wi = 0; wi < chips.win_rows; ++wi)
      for (int wj = 0; wj < chips.win_cols; ++wj) {
        const int q_sel = chips.angle_map(wi, wj);
        ++rep.angle_histogram[static_cast<std::size_t>(q_sel)];
        abs_dev_total += fold_offset(q_sel * M_PI / Q, rep.theta);
        ++rep.windows;
        const Eigen::Index w = static_cast<Eigen::Index>(wi) * chips.win_cols + wj;
        bool any_finite = false;
        for (int q = 0; q < Q; ++q) {
          const double k = scan.kurt(w, q);
          if (!std::isfinite(k)) continue;
          any_finite = true;
          const double off = fold_offset(q * M_PI / Q, rep.theta);
          const int bin = static_cast<int>(std::llround(off / (M_PI / Q)));
          ++rep.bin_counts[static_cast<std::size_t>(bin)];
          kurt_sum[static_cast<std::size_t>(bin)] += k;
          dev_sum[static_cast<std::size_t>(bin)] += std::abs(k - 3.0);
        }
        if (!any_finite) ++rep.degenerate_windows;
      }
  }

  rep.maad = rep.not_applicable ? std::numeric_limits<double>::quiet_NaN()
                                : abs_dev_total / static_cast<double>(rep.windows);
  rep.mean_kurtosis.assign(static_cast<std::size_t>(Q),
                           std::numeric_limits<double>::quiet_NaN());
  rep.mean_abs_dev.assign(static_cast<std::size_t>(Q),
                          std::numeric_limits<double>::quiet_NaN());
  for (int k = 0; k < Q; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (rep.bin_counts[i] > 0) {
      rep.mean_kurtosis[i] = kurt_sum[i] / static_cast<double>(rep.bin_counts[i]);
      rep.mean_abs_dev[i] = dev_sum[i] / static_cast<double>(rep.bin_counts[i]);
    }
  }
  return rep;
}

std::string angle_report_to_json(const AngleReport& rep) {
  nlohmann::json j;
  j["theta"] = rep.theta;
  j["speed"] = rep.speed;
  j["not_applicable"] = rep.not_applicable;
  if (std::isfinite(rep.maad))
    j["maad"] = rep.maad;
  else
    j["maad"] = nullptr;
  j["windows"] = rep.windows;
  j["degenerate_windows"] = rep.degenerate_windows;
  j["angle_histogram"] = rep.angle_histogram;
  j["offsets"] = rep.offsets;
  j["bin_counts"] = rep.bin_counts;
  auto nullable = [](const std::vector<double>& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (double x : v)
      arr.push_back(std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr));
    return arr;
  };
  j["mean_kurtosis"] = nullable(rep.mean_kurtosis);
  j["mean_abs_dev"] = nullable(rep.mean_abs_dev);
  return j.dump(2) + "\n";
}

std::string angle_report_to_csv(const AngleReport& rep) {
  std::ostringstream out;
  out << "angular_offset,mean_kurtosis\n";
  out.precision(17);
  for (std::size_t k = 0; k < rep.offsets.size(); ++k)
    if (rep.bin_counts[k] > 0) out << rep.offsets[k] << "," << rep.mean_kurtosis[k] << "\n";
  return out.str();
}

}  // namespace chipqa
