#include "chipqa/features.hpp"

#include "chipqa/bandpass.hpp"
#include "chipqa/pixelmath.hpp"
#include "chipqa/stchips.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

namespace chipqa {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// ---- schema ---------------------------------------------------------------

constexpr const char* kScaleTag[2] = {"_s1", "_s2"};
constexpr const char* kProdTag[4] = {"h", "v", "d1", "d2"};
constexpr const char* kAggdTag[4] = {"nu", "eta", "sigmal2", "sigmar2"};

std::array<std::string, kFeatureCount> build_names() {
  std::array<std::string, kFeatureCount> names;
  int i = 0;
  auto ggd_quad_names = [&](const std::string& prefix) {
    for (int s = 0; s < 2; ++s) {
      names[i++] = prefix + "_ggd_shape" + kScaleTag[s];
      names[i++] = prefix + "_ggd_scale" + kScaleTag[s];
      names[i++] = prefix + "_skew" + kScaleTag[s];
      names[i++] = prefix + "_kurt" + kScaleTag[s];
    }
  };
  auto aggd_block_names = [&](const std::string& prefix, int s) {
    for (int p = 0; p < 4; ++p)
      for (int a = 0; a < 4; ++a)
        names[i++] = prefix + "_aggd_" + kProdTag[p] + "_" + kAggdTag[a] + kScaleTag[s];
  };
  auto chip_block_names = [&](const std::string& prefix) {
    for (int s = 0; s < 2; ++s) {
      names[i++] = prefix + "_ggd_shape" + kScaleTag[s];
      names[i++] = prefix + "_ggd_scale" + kScaleTag[s];
      aggd_block_names(prefix, s);
    }
  };

  // f1..f56: spatial blocks.
  ggd_quad_names("chroma");
  ggd_quad_names("chroma_sigma");
  for (int s = 0; s < 2; ++s) aggd_block_names("grad", s);
  ggd_quad_names("luma_sigma");
  // f57..f112: deviation-pooled twins.
  const int pooled_base = i;
  for (int k = 0; k < 56; ++k) names[pooled_base + k] = "std_" + names[k];
  i += 56;
  // f113..f149: naturalness block.
  for (int s = 0; s < 2; ++s) {
    names[i++] = std::string("niqe_ggd_shape") + kScaleTag[s];
    names[i++] = std::string("niqe_ggd_scale") + kScaleTag[s];
    aggd_block_names("niqe", s);
  }
  names[i++] = "niqe_score";
  // f150..f185 and f186..f221: space-time chip blocks.
  chip_block_names("stchip");
  chip_block_names("stgradchip");
  if (i != kFeatureCount) throw std::logic_error("feature name schema out of sync");
  return names;
}

// ---- fit helpers ----------------------------------------------------------

// (shape, scale, skewness, kurtosis) with the Gaussian-limit sentinel on degenerate data.
void ggd_quad(std::span<const double> samples, double* out, int& sentinels) {
  try {
    const GGDParams g = fit_ggd(samples);
    const MomentSummary m = moments(samples);
    if (m.degenerate) throw numeric_error("degenerate");
    out[0] = g.alpha;
    out[1] = g.sigma2;
    out[2] = m.skewness;
    out[3] = m.kurtosis;
  } catch (const numeric_error&) {
    out[0] = 2.0;
    out[1] = 0.0;
    out[2] = 0.0;
    out[3] = 3.0;
    ++sentinels;
  }
}

void aggd_quad(std::span<const double> samples, double* out, int& sentinels) {
  try {
    const AGGDParams p = fit_aggd(samples);
    out[0] = p.nu;
    out[1] = p.eta;
    out[2] = p.sigma_l2;
    out[3] = p.sigma_r2;
  } catch (const numeric_error&) {
    out[0] = 2.0;
    out[1] = 0.0;
    out[2] = 0.0;
    out[3] = 0.0;
    ++sentinels;
  }
}

std::span<const double> flat(const Fieldd& f) {
  return {f.data(), static_cast<std::size_t>(f.size())};
}

// 16 values: AGGD quads of the four paired products.
void aggd_products(const Fieldd& field, double* out, int& sentinels) {
  const PairedProducts pp = paired_products(field);
  aggd_quad(flat(pp.H), out + 0, sentinels);
  aggd_quad(flat(pp.V), out + 4, sentinels);
  aggd_quad(flat(pp.D1), out + 8, sentinels);
  aggd_quad(flat(pp.D2), out + 12, sentinels);
}

// 18 values: GGD(shape, scale) + product AGGDs, the per-scale chip/patch recipe.
void chip_scale_stats(const Fieldd& field, double* out, int& sentinels) {
  double q[4];
  ggd_quad(flat(field), q, sentinels);
  out[0] = q[0];
  out[1] = q[1];
  aggd_products(field, out + 2, sentinels);
}

// ---- per-frame spatial work -------------------------------------------------

struct FrameArtifacts {
  // What later (group-level) stages need, per scale.
  Fieldd luma_mscn[2];
  Fieldd grad_mscn[2];
  Fieldd sigma_full;  // Eq.-4 deviation field of full-scale luma (naturalness block)
  Eigen::Matrix<double, 56, 1> spatial;
  int sentinels = 0;
};

FrameArtifacts process_frame(const PlanarFrame& frame, const PipelineConfig& cfg) {
  FrameArtifacts art;
  const Fieldd luma_full = luma709(frame);
  const Fieldd chroma_full = chroma_map(frame);
  for (int s = 0; s < 2; ++s) {
    const Fieldd luma = s == 0 ? luma_full : downscale2(luma_full);
    const Fieldd chroma = s == 0 ? chroma_full : downscale2(chroma_full);

    const MscnResult lm = mscn(luma, cfg.K, cfg.C_stab);
    art.luma_mscn[s] = lm.mscn;
    if (s == 0) art.sigma_full = lm.sigma;

    // chroma block
    const MscnResult cm = mscn(chroma, cfg.K, cfg.C_stab);
    ggd_quad(flat(cm.mscn), art.spatial.data() + 0 + 4 * s, art.sentinels);
    // chroma sigma-map block
    const MscnResult csm = mscn(cm.sigma, cfg.K, cfg.C_stab);
    ggd_quad(flat(csm.mscn), art.spatial.data() + 8 + 4 * s, art.sentinels);
    // gradient block
    const Fieldd grad = gradient_magnitude(luma);
    const MscnResult gm = mscn(grad, cfg.K, cfg.C_stab);
    art.grad_mscn[s] = gm.mscn;
    aggd_products(gm.mscn, art.spatial.data() + 16 + 16 * s, art.sentinels);
    // luma sigma-map block
    const MscnResult lsm = mscn(lm.sigma, cfg.K, cfg.C_stab);
    ggd_quad(flat(lsm.mscn), art.spatial.data() + 48 + 4 * s, art.sentinels);
  }
  return art;
}

// ---- naturalness (patch) machinery ----------------------------------------

int effective_patch_size(int requested, int rows, int cols) {
  int p = std::min(requested, std::min(rows, cols) / 2);
  p -= p % 2;  // half-scale patches need an even size
  return std::max(p, 4);
}

// Rows of per-patch 18+18 features for one luma frame.
Mat niqe_patch_features(const Fieldd& luma, const PipelineConfig& cfg, int patch_size,
                        double sharpness_fraction, int& sentinels) {
  const MscnResult full = mscn(luma, cfg.K, cfg.C_stab);
  const MscnResult half = mscn(downscale2(luma), cfg.K, cfg.C_stab);
  const int p = effective_patch_size(patch_size, static_cast<int>(luma.rows()),
                                     static_cast<int>(luma.cols()));
  const int py = static_cast<int>(luma.rows()) / p;
  const int px = static_cast<int>(luma.cols()) / p;
  if (py < 1 || px < 1) throw numeric_error("naturalness block: frame smaller than one patch");

  Eigen::ArrayXXd sharpness(py, px);
  for (int i = 0; i < py; ++i)
    for (int j = 0; j < px; ++j)
      sharpness(i, j) = full.sigma.block(i * p, j * p, p, p).mean();
  const double cut = sharpness_fraction * sharpness.maxCoeff();

  std::vector<std::pair<int, int>> kept;
  for (int i = 0; i < py; ++i)
    for (int j = 0; j < px; ++j)
      if (sharpness(i, j) >= cut) kept.emplace_back(i, j);

  Mat rows(static_cast<Eigen::Index>(kept.size()), 36);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const auto [i, j] = kept[k];
    double feats[36];
    const Fieldd patch1 = full.mscn.block(i * p, j * p, p, p);
    chip_scale_stats(patch1, feats, sentinels);
    const int h = p / 2;
    const Fieldd patch2 = half.mscn.block(i * h, j * h, h, h);
    chip_scale_stats(patch2, feats + 18, sentinels);
    for (int c = 0; c < 36; ++c) rows(static_cast<Eigen::Index>(k), c) = feats[c];
  }
  return rows;
}

// Mahalanobis-type distance against the pristine model.
double niqe_score(const NiqeModel& model, const Vec& mean2, const Mat& cov2,
                  std::vector<std::string>& warnings) {
  const Vec d = model.mean - mean2;
  const Mat M = 0.5 * (model.cov + cov2);
  Eigen::LDLT<Mat> ldlt(M);
  if (ldlt.info() == Eigen::Success) {
    const Vec z = ldlt.solve(d);
    const double q = d.dot(z);
    if (std::isfinite(q) && q >= 0) return std::sqrt(q);
  }
  warnings.push_back("naturalness block: singular pooled covariance, pseudo-inverse fallback");
  Eigen::SelfAdjointEigenSolver<Mat> es(M);
  const double tol = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Vec inv = es.eigenvalues();
  for (Eigen::Index i = 0; i < inv.size(); ++i) inv[i] = inv[i] > tol ? 1.0 / inv[i] : 0.0;
  const Vec z = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * d;
  return std::sqrt(std::max(0.0, d.dot(z)));
}

// ---- group-level work -------------------------------------------------------

struct GroupResult {
  Eigen::Matrix<double, 56, Eigen::Dynamic> spatial;  // 56 x T'
  Eigen::Matrix<double, 37, 1> niqe;
  Eigen::Matrix<double, 36, 1> chip;
  Eigen::Matrix<double, 36, 1> gchip;
  int sentinels = 0;
  std::vector<std::string> warnings;
  StageTimings timings;
};

GroupResult process_group(const FrameGroup& group, const PipelineConfig& cfg,
                          const NiqeModel* model, const ChipLut& lut) {
  GroupResult res;
  const int T = cfg.T;
  res.spatial.resize(56, T);

  auto t0 = Clock::now();
  std::vector<FrameArtifacts> arts;
  arts.reserve(static_cast<std::size_t>(T));
  for (int m = 0; m < T; ++m) {
    arts.push_back(process_frame(group.frames[static_cast<std::size_t>(m)], cfg));
    res.spatial.col(m) = arts.back().spatial;
    res.sentinels += arts.back().sentinels;
  }
  res.timings["spatial"] += ms_since(t0);

  // Space-time chips: luma and gradient mosaics at both scales.  The temporal
  // band-pass is timed separately from chip extraction so the stage costs
  // reflect work that scales with the frame count versus the window stride.
  const TemporalKernel kernel = temporal_kernel(cfg.a, T);
  for (int s = 0; s < 2; ++s) {
    std::vector<Fieldd> lgroup, ggroup;
    lgroup.reserve(static_cast<std::size_t>(T));
    ggroup.reserve(static_cast<std::size_t>(T));
    for (int m = 0; m < T; ++m) {
      lgroup.push_back(arts[static_cast<std::size_t>(m)].luma_mscn[s]);
      ggroup.push_back(arts[static_cast<std::size_t>(m)].grad_mscn[s]);
    }
    t0 = Clock::now();
    const std::vector<Fieldd> lband = temporal_filter(lgroup, kernel);
    const std::vector<Fieldd> gband = temporal_filter(ggroup, kernel);
    res.timings["temporal"] += ms_since(t0);
    t0 = Clock::now();
    const ChipFrame lchips = extract_chips(lband, lut, cfg.D, group.group_index);
    const ChipFrame gchips = extract_chips(gband, lut, cfg.D, group.group_index);
    chip_scale_stats(lchips.values, res.chip.data() + 18 * s, res.sentinels);
    chip_scale_stats(gchips.values, res.gchip.data() + 18 * s, res.sentinels);
    res.timings["chips"] += ms_since(t0);
  }

  // Naturalness block, one frame per group (the group's last frame).
  t0 = Clock::now();
  if (!model) throw std::invalid_argument("naturalness block requires a model (configuration)");
  const Fieldd& last_luma = group.frames.back().y;
  Mat rows = niqe_patch_features(last_luma, cfg, model->patch_size, model->sharpness_fraction,
                                 res.sentinels);
  if (rows.rows() == 0) throw numeric_error("naturalness block: no patches kept");
  const Vec mean2 = rows.colwise().mean();
  Mat centered = rows.rowwise() - mean2.transpose();
  const Mat cov2 = centered.transpose() * centered / static_cast<double>(rows.rows());
  res.niqe.head<36>() = mean2;
  res.niqe[36] = niqe_score(*model, mean2, cov2, res.warnings);
  res.timings["naturalness"] += ms_since(t0);
  return res;
}

}  // namespace

// ---- public schema ----------------------------------------------------------

const std::array<std::string, kFeatureCount>& feature_names() {
  static const auto names = build_names();
  return names;
}

int feature_fnumber(const std::string& name) {
  const auto& names = feature_names();
  for (int i = 0; i < kFeatureCount; ++i)
    if (names[static_cast<std::size_t>(i)] == name) return i + 1;
  throw std::invalid_argument("unknown feature name: " + name);
}

double naturalness_distance(const NiqeModel& model, const Vec& sample_mean,
                            const Mat& sample_cov) {
  std::vector<std::string> warnings;
  return niqe_score(model, sample_mean, sample_cov, warnings);
}

PairedProducts paired_products(const Fieldd& field) {
  const Eigen::Index rows = field.rows(), cols = field.cols();
  if (rows < 2 || cols < 2) throw std::invalid_argument("paired_products: dims must be >= 2");
  PairedProducts pp;
  pp.H = field.block(0, 0, rows, cols - 1) * field.block(0, 1, rows, cols - 1);
  pp.V = field.block(0, 0, rows - 1, cols) * field.block(1, 0, rows - 1, cols);
  pp.D1 = field.block(0, 0, rows - 1, cols - 1) * field.block(1, 1, rows - 1, cols - 1);
  pp.D2 = field.block(0, 1, rows - 1, cols - 1) * field.block(1, 0, rows - 1, cols - 1);
  return pp;
}

// ---- model io ---------------------------------------------------------------

NiqeModel load_niqe_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw format_error("naturalness model file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw format_error("naturalness model parse failure in " + path + ": " + e.what());
  }
  NiqeModel m;
  const auto mean = j.at("mean");
  const auto cov = j.at("cov");
  if (mean.size() != 36 || cov.size() != 36)
    throw format_error("naturalness model must carry a 36-entry mean and 36x36 covariance");
  m.mean.resize(36);
  m.cov.resize(36, 36);
  for (int i = 0; i < 36; ++i) {
    m.mean[i] = mean[static_cast<std::size_t>(i)].get<double>();
    if (cov[static_cast<std::size_t>(i)].size() != 36)
      throw format_error("naturalness model covariance row " + std::to_string(i) + " malformed");
    for (int k = 0; k < 36; ++k)
      m.cov(i, k) = cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)].get<double>();
  }
  m.patch_size = j.value("patch_size", 96);
  m.sharpness_fraction = j.value("sharpness_fraction", 0.75);
  if ((m.cov - m.cov.transpose()).cwiseAbs().maxCoeff() > 1e-9)
    throw format_error("naturalness model covariance is not symmetric");
  return m;
}

void save_niqe_model(const NiqeModel& model, const std::string& path) {
  nlohmann::json j;
  j["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
  auto& cov = j["cov"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.cov.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(model.cov.cols()));
    for (Eigen::Index k = 0; k < model.cov.cols(); ++k) row[static_cast<std::size_t>(k)] = model.cov(i, k);
    cov.push_back(row);
  }
  j["patch_size"] = model.patch_size;
  j["sharpness_fraction"] = model.sharpness_fraction;
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write naturalness model: " + path);
  out << j.dump(2) << "\n";
}

NiqeModel fit_niqe_model(const std::vector<Fieldd>& pristine_lumas, const PipelineConfig& cfg,
                         int patch_size, double sharpness_fraction) {
  if (pristine_lumas.empty())
    throw std::invalid_argument("naturalness model fit needs at least one pristine image");
  int sentinels = 0;
  std::vector<Mat> all;
  Eigen::Index total = 0;
  for (const auto& luma : pristine_lumas) {
    all.push_back(niqe_patch_features(luma, cfg, patch_size, sharpness_fraction, sentinels));
    total += all.back().rows();
  }
  if (total < 2) throw numeric_error("naturalness model fit: fewer than two patches kept");
  Mat rows(total, 36);
  Eigen::Index at = 0;
  for (const auto& m : all) {
    rows.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  NiqeModel model;
  model.patch_size = patch_size;
  model.sharpness_fraction = sharpness_fraction;
  model.mean = rows.colwise().mean();
  Mat centered = rows.rowwise() - model.mean.transpose();
  model.cov = centered.transpose() * centered / static_cast<double>(rows.rows());
  return model;
}

// ---- extraction -------------------------------------------------------------

namespace {

FeatureVector assemble(const std::vector<GroupResult>& groups, StageTimings* timings) {
  if (groups.empty()) throw format_error("video shorter than one complete frame group");
  FeatureVector fv;
  fv.values.setZero();

  // f1..f56: mean over all frames; f57..f112: per-group deviation, mean over groups.
  Eigen::Matrix<double, 56, 1> frame_mean = Eigen::Matrix<double, 56, 1>::Zero();
  Eigen::Matrix<double, 56, 1> pooled = Eigen::Matrix<double, 56, 1>::Zero();
  long frames = 0;
  for (const auto& g : groups) {
    frame_mean += g.spatial.rowwise().sum();
    frames += g.spatial.cols();
    const Eigen::Matrix<double, 56, 1> mu = g.spatial.rowwise().mean();
    const Eigen::Matrix<double, 56, 1> var =
        (g.spatial.colwise() - mu).array().square().rowwise().mean();
    pooled += var.array().sqrt().matrix();
  }
  frame_mean /= static_cast<double>(frames);
  pooled /= static_cast<double>(groups.size());

  Eigen::Matrix<double, 37, 1> niqe = Eigen::Matrix<double, 37, 1>::Zero();
  Eigen::Matrix<double, 36, 1> chip = Eigen::Matrix<double, 36, 1>::Zero();
  Eigen::Matrix<double, 36, 1> gchip = Eigen::Matrix<double, 36, 1>::Zero();
  for (const auto& g : groups) {
    niqe += g.niqe;
    chip += g.chip;
    gchip += g.gchip;
    fv.sentinel_count += g.sentinels;
    fv.warnings.insert(fv.warnings.end(), g.warnings.begin(), g.warnings.end());
    if (timings)
      for (const auto& [k, v] : g.timings) (*timings)[k] += v;
  }
  niqe /= static_cast<double>(groups.size());
  chip /= static_cast<double>(groups.size());
  gchip /= static_cast<double>(groups.size());

  fv.values.segment<56>(0) = frame_mean;
  fv.values.segment<56>(56) = pooled;
  fv.values.segment<37>(112) = niqe;
  fv.values.segment<36>(149) = chip;
  fv.values.segment<36>(185) = gchip;
  if (fv.sentinel_count > 0)
    fv.warnings.push_back(std::to_string(fv.sentinel_count) +
                          " degenerate fits replaced by the Gaussian-limit sentinel");
  if (!fv.values.allFinite()) throw numeric_error("feature vector contains non-finite entries");
  return fv;
}

}  // namespace

FeatureVector extract_features(VideoReader& reader, const PipelineConfig& cfg,
                               const NiqeModel* model, StageTimings* timings) {
  cfg.validate();
  const VideoHeader& h = reader.header();
  const int min_dim = cfg.R * cfg.D * 2;  // two scales: half frame still needs one window
  if (h.width < min_dim || h.height < min_dim)
    throw std::invalid_argument("video geometry too small: minimum " + std::to_string(min_dim) +
                                "x" + std::to_string(min_dim) + " for chip windows at two scales");

  const ChipLut lut = build_lut(cfg.Q, cfg.R);
  std::vector<GroupResult> results;
  long next_index = 0;
  const int batch = std::max(1, cfg.threads);
  auto t_read = Clock::now();
  double decode_ms = 0;
  while (true) {
    std::vector<FrameGroup> groups;
    t_read = Clock::now();
    for (int b = 0; b < batch; ++b) {
      auto g = next_group(reader, cfg.T, next_index);
      if (!g) break;
      groups.push_back(std::move(*g));
    }
    decode_ms += ms_since(t_read);
    if (groups.empty()) break;

    std::vector<GroupResult> batch_results(groups.size());
    if (groups.size() == 1) {
      batch_results[0] = process_group(groups[0], cfg, model, lut);
    } else {
      std::vector<std::thread> workers;
      std::exception_ptr failure;
      std::mutex failure_mu;
      for (std::size_t i = 0; i < groups.size(); ++i)
        workers.emplace_back([&, i] {
          try {
            batch_results[i] = process_group(groups[i], cfg, model, lut);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        });
      for (auto& w : workers) w.join();
      if (failure) std::rethrow_exception(failure);
    }
    for (auto& r : batch_results) results.push_back(std::move(r));
  }
  if (timings) (*timings)["decode"] += decode_ms;
  return assemble(results, timings);
}

FeatureVector extract_features(const std::vector<PlanarFrame>& frames, const PipelineConfig& cfg,
                               const NiqeModel* model, StageTimings* timings) {
  cfg.validate();
  const ChipLut lut = build_lut(cfg.Q, cfg.R);
  std::vector<GroupResult> results;
  const long n_groups = static_cast<long>(frames.size()) / cfg.T;
  for (long g = 0; g < n_groups; ++g) {
    FrameGroup group;
    group.group_index = g;
    group.frames.assign(frames.begin() + g * cfg.T, frames.begin() + (g + 1) * cfg.T);
    results.push_back(process_group(group, cfg, model, lut));
  }
  return assemble(results, timings);
}

std::vector<PlanarFrame> wrap_luma_frames(const std::vector<Fieldd>& luma) {
  std::vector<PlanarFrame> out;
  out.reserve(luma.size());
  long idx = 0;
  for (const auto& y : luma) {
    PlanarFrame f;
    f.y = y;
    f.cb = Fieldd::Constant(y.rows(), y.cols(), 0.5);
    f.cr = Fieldd::Constant(y.rows(), y.cols(), 0.5);
    f.index = idx++;
    out.push_back(std::move(f));
  }
  return out;
}

// ---- serialization ----------------------------------------------------------

std::string to_json(const FeatureVector& fv) {
  nlohmann::json j;
  j["video_id"] = fv.video_id;
  j["schema_version"] = fv.schema_version;
  j["features"] = std::vector<double>(fv.values.data(), fv.values.data() + kFeatureCount);
  j["warnings"] = fv.warnings;
  return j.dump(2) + "\n";
}

FeatureVector feature_vector_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("feature JSON parse failure: ") + e.what());
  }
  FeatureVector fv;
  fv.video_id = j.value("video_id", "");
  fv.schema_version = j.value("schema_version", "");
  if (fv.schema_version != kFeatureSchemaVersion)
    throw format_error("feature schema version mismatch: '" + fv.schema_version + "' vs '" +
                       kFeatureSchemaVersion + "'");
  const auto& vals = j.at("features");
  if (vals.size() != kFeatureCount)
    throw format_error("feature vector length " + std::to_string(vals.size()) + ", expected " +
                       std::to_string(kFeatureCount));
  for (int i = 0; i < kFeatureCount; ++i) fv.values[i] = vals[static_cast<std::size_t>(i)].get<double>();
  if (j.contains("warnings"))
    for (const auto& w : j["warnings"]) fv.warnings.push_back(w.get<std::string>());
  return fv;
}

namespace {
std::string full_precision(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}
}  // namespace

std::string to_csv(const FeatureVector& fv) {
  std::ostringstream out;
  out << "video_id";
  for (const auto& n : feature_names()) out << "," << n;
  out << "\n" << fv.video_id;
  for (int i = 0; i < kFeatureCount; ++i) out << "," << full_precision(fv.values[i]);
  out << "\n";
  return out.str();
}

FeatureVector feature_vector_from_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string header, row;
  if (!std::getline(in, header) || !std::getline(in, row))
    throw format_error("feature CSV must carry a header and one data row");
  std::ostringstream expect;
  expect << "video_id";
  for (const auto& n : feature_names()) expect << "," << n;
  if (header != expect.str()) throw format_error("feature CSV header does not match the schema");
  FeatureVector fv;
  std::istringstream cells(row);
  std::string cell;
  if (!std::getline(cells, cell, ',')) throw format_error("feature CSV row is empty");
  fv.video_id = cell;
  for (int i = 0; i < kFeatureCount; ++i) {
    if (!std::getline(cells, cell, ','))
      throw format_error("feature CSV row truncated at column " + std::to_string(i));
    fv.values[i] = std::stod(cell);
  }
  return fv;
}

}  // namespace chipqa
