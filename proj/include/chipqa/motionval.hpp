#pragma once

// Synthetic-motion validation harness: seeded textures translated at a known
// orientation and speed, orientation-estimation accuracy via mean absolute
// angular deviation, and the kurtosis-versus-angular-offset curve.

#include "chipqa/core.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace chipqa {

enum class TextureKind { WhiteNoise, SmoothedNoise };

struct SyntheticSpec {
  TextureKind texture = TextureKind::SmoothedNoise;
  double sigma_s = 2.0;  // Gaussian blur width (smoothed-noise only)
  double theta = 0.0;    // ground-truth orientation, radians in [0, pi)
  double speed = 1.0;    // pixels per frame, >= 0
  int width = 64, height = 64;
  int frames = 10;
  std::uint64_t seed = 0;

  void validate() const;
};

// Base texture: sparse Rademacher impulses (density 1/16), optionally blurred
// with a periodic Gaussian, peak-normalized to amplitude 0.3 about mid-gray.
Fieldd make_texture(const SyntheticSpec& spec);

// Circular (periodic) separable Gaussian blur; sigma <= 0 is the identity.
Fieldd periodic_gaussian_blur(const Fieldd& field, double sigma);

// Frame t is the base texture circularly shifted by the cumulative
// displacement round(t * speed * (cos theta, sin theta)), half away from zero,
// so integer-speed axis motion shifts losslessly.
std::vector<Fieldd> make_video(const SyntheticSpec& spec);

struct AngleReport {
  double theta = 0;  // ground truth, folded into [0, pi)
  double speed = 0;
  bool not_applicable = false;  // static input: no motion to estimate
  double maad = 0;              // mean |selected - truth| folded into [0, pi/2]; NaN when N/A
  long windows = 0;
  long degenerate_windows = 0;       // all-candidate-degenerate fallbacks (counted into bin 0)
  std::vector<long> angle_histogram; // Q bins of selected angle indices
  std::vector<double> offsets;       // Q bin centers k*pi/Q (folded range ends at pi/2)
  std::vector<long> bin_counts;      // candidate chips per offset bin
  std::vector<double> mean_kurtosis; // per bin; NaN when the bin is empty
  std::vector<double> mean_abs_dev;  // per-bin mean |kurtosis - 3|; NaN when empty
};

// Runs the bandpass + chip-selection pipeline on luma frames at full scale and
// scores every window's selected angle against the known orientation. All
// candidate chips (not just winners) feed the kurtosis-by-offset bins.
AngleReport evaluate_orientation(const std::vector<Fieldd>& frames, double theta_star,
                                 double speed, const PipelineConfig& cfg);

std::string angle_report_to_json(const AngleReport& report);
// Two columns (angular_offset, mean_kurtosis); empty bins are skipped.
std::string angle_report_to_csv(const AngleReport& report);

}  // namespace chipqa
