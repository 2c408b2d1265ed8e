#pragma once

// Assembly of the canonical 221-entry feature vector: chroma / sigma-map /
// gradient-product / luma-sigma spatial blocks, their five-frame
// deviation-pooled twins, the patch-based naturalness block, and the
// space-time chip blocks, each at two scales.

#include "chipqa/core.hpp"
#include "chipqa/statfits.hpp"
#include "chipqa/video_io.hpp"

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace chipqa {

inline constexpr int kFeatureCount = 221;
inline constexpr const char* kFeatureSchemaVersion = "chipqa-221/1";

struct PairedProducts {
  Fieldd H, V, D1, D2;  // one-pixel-shifted neighbor products
};

PairedProducts paired_products(const Fieldd& field);

struct NiqeModel {
  Vec mean;        // 36
  Mat cov;         // 36 x 36
  int patch_size = 96;
  double sharpness_fraction = 0.75;
};

// Mahalanobis-type distance sqrt(d' ((S1+S2)/2)^-1 d) between a sample feature
// mean/covariance and the pristine model (pseudo-inverse on singular pools).
double naturalness_distance(const NiqeModel& model, const Vec& sample_mean,
                            const Mat& sample_cov);

NiqeModel load_niqe_model(const std::string& path);
void save_niqe_model(const NiqeModel& model, const std::string& path);
// Fits the pristine-corpus Gaussian from luma stills.
NiqeModel fit_niqe_model(const std::vector<Fieldd>& pristine_lumas, const PipelineConfig& cfg,
                         int patch_size = 96, double sharpness_fraction = 0.75);

struct FeatureVector {
  Eigen::Matrix<double, kFeatureCount, 1> values;
  std::string schema_version = kFeatureSchemaVersion;
  std::string video_id;
  std::vector<std::string> warnings;
  int sentinel_count = 0;
};

// Canonical name map (names are 0-indexed into values; f-numbers are 1-based).
const std::array<std::string, kFeatureCount>& feature_names();
// 1-based f-number for a canonical name; throws std::invalid_argument if unknown.
int feature_fnumber(const std::string& name);

// Per-stage wall time in milliseconds, keyed by stage name.
using StageTimings = std::map<std::string, double>;

// Runs the full pipeline over a frame stream. The model may be null only if
// you accept a configuration error when the naturalness block is reached.
FeatureVector extract_features(VideoReader& reader, const PipelineConfig& cfg,
                               const NiqeModel* model, StageTimings* timings = nullptr);

// Same pipeline over pre-decoded frames (synthetic corpora, tests).
FeatureVector extract_features(const std::vector<PlanarFrame>& frames, const PipelineConfig& cfg,
                               const NiqeModel* model, StageTimings* timings = nullptr);

// Convenience for luma-only synthetic videos: neutral chroma planes are attached.
std::vector<PlanarFrame> wrap_luma_frames(const std::vector<Fieldd>& luma);

// Serialization: JSON object {video_id, schema_version, features, warnings}
// and a flat CSV (header = canonical names) round-tripping bit-exactly.
std::string to_json(const FeatureVector& fv);
FeatureVector feature_vector_from_json(const std::string& json_text);
std::string to_csv(const FeatureVector& fv);
FeatureVector feature_vector_from_csv(const std::string& csv_text);

}  // namespace chipqa
