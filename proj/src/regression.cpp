#include "chipqa/regression.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace chipqa {
namespace {

constexpr double kSmoTol = 1e-3;
constexpr long kSmoMaxIter = 2'000'000;

Mat rbf_kernel(const Mat& A, const Mat& B, double gamma) {
  // K(i,j) = exp(-gamma * |a_i - b_j|^2), computed via the norm expansion.
  const Vec an = A.rowwise().squaredNorm();
  const Vec bn = B.rowwise().squaredNorm();
  Mat d2 = (-2.0 * A * B.transpose()).colwise() + an;
  d2 = d2.rowwise() + bn.transpose();
  return (-gamma * d2.cwiseMax(0.0)).array().exp();
}

struct SmoSolution {
  Vec beta;  // alpha - alpha*
  double bias = 0;
  double dual_objective = 0;
  long iterations = 0;
};

// Sequential minimal optimization on the standard 2n-variable dual:
// variables t < n are alpha_t, t >= n are alpha*_{t-n}; sign s_t = +1 / -1;
// box [0, C]; equality constraint sum_t s_t a_t = 0. Working pairs are chosen
// by maximal violation, the analytic two-variable step is clipped to the box.
SmoSolution smo_solve(const Mat& K, const Vec& y, double C, double eps) {
  const int n = static_cast<int>(y.size());
  Vec a = Vec::Zero(2 * n);
  Vec u = Vec::Zero(n);  // u_p = sum_q beta_q K(p, q)
  SmoSolution out;

  double m_val = 0, M_val = 0;
  for (long iter = 0;; ++iter) {
    m_val = -std::numeric_limits<double>::infinity();
    M_val = std::numeric_limits<double>::infinity();
    int i = -1, j = -1;
    for (int t = 0; t < 2 * n; ++t) {
      const int p = t < n ? t : t - n;
      const double s = t < n ? 1.0 : -1.0;
      const double v = -s * (s * (u[p] - y[p]) + eps);
      const bool in_up = s > 0 ? a[t] < C : a[t] > 0;
      const bool in_low = s > 0 ? a[t] > 0 : a[t] < C;
      if (in_up && v > m_val) {
        m_val = v;
        i = t;
      }
      if (in_low && v < M_val) {
        M_val = v;
        j = t;
      }
    }
    if (i < 0 || j < 0 || m_val - M_val <= kSmoTol) {
      out.iterations = iter;
      break;
    }
    if (iter >= kSmoMaxIter)
      throw numeric_error("dual optimizer failed to reach tolerance within iteration budget");

    const int pi = i < n ? i : i - n;
    const int pj = j < n ? j : j - n;
    const double si = i < n ? 1.0 : -1.0;
    const double sj = j < n ? 1.0 : -1.0;
    const double quad = std::max(K(pi, pi) + K(pj, pj) - 2.0 * K(pi, pj), 1e-12);
    double lam = (m_val - M_val) / quad;
    lam = std::min(lam, si > 0 ? C - a[i] : a[i]);
    lam = std::min(lam, sj > 0 ? a[j] : C - a[j]);
    a[i] += si * lam;
    a[j] -= sj * lam;
    u += lam * (K.col(pi) - K.col(pj));
  }

  out.bias = std::isfinite(m_val) && std::isfinite(M_val) ? 0.5 * (m_val + M_val) : 0.0;
  out.beta = a.head(static_cast<Eigen::Index>(n)) - a.tail(static_cast<Eigen::Index>(n));
  out.dual_objective = 0.5 * out.beta.dot(u) + eps * a.sum() - y.dot(out.beta);
  return out;
}

Vec column_std(const Mat& X, const Vec& mean) {
  return ((X.rowwise() - mean.transpose()).array().square().colwise().mean()).sqrt();
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double std_of(const std::vector<double>& v) {
  const double mu = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0;
  for (double x : v) s += (x - mu) * (x - mu);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

// ---- model ------------------------------------------------------------------

Vec SVRModel::standardize(const Vec& raw) const {
  Vec z(raw.size());
  for (Eigen::Index k = 0; k < raw.size(); ++k)
    z[k] = feat_std[k] > 0 ? (raw[k] - feat_mean[k]) / feat_std[k] : 0.0;
  return z;
}

double SVRModel::predict(const Vec& raw) const {
  const Vec z = standardize(raw);
  double f = bias;
  for (Eigen::Index i = 0; i < support_vectors.rows(); ++i) {
    const double d2 = (support_vectors.row(i).transpose() - z).squaredNorm();
    f += dual_coeffs[i] * std::exp(-gamma * d2);
  }
  return f * label_std + label_mean;
}

Vec SVRModel::predict_rows(const Mat& raw) const {
  Vec out(raw.rows());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) out[i] = predict(Vec(raw.row(i).transpose()));
  return out;
}

SVRModel train_svr(const Mat& features, const Vec& labels, double gamma, double C,
                   double epsilon) {
  if (features.rows() < 2) throw std::invalid_argument("training needs at least two samples");
  if (features.rows() != labels.size())
    throw std::invalid_argument("feature rows and label count differ");
  if (!features.allFinite() || !labels.allFinite())
    throw format_error("training data contains non-finite values");
  if (!(gamma > 0) || !(C > 0) || !(epsilon >= 0))
    throw std::invalid_argument("gamma and C must be positive, epsilon non-negative");

  SVRModel m;
  m.gamma = gamma;
  m.C = C;
  m.epsilon = epsilon;
  m.feat_mean = features.colwise().mean();
  m.feat_std = column_std(features, m.feat_mean);
  Mat Z(features.rows(), features.cols());
  for (Eigen::Index i = 0; i < features.rows(); ++i)
    Z.row(i) = m.standardize(features.row(i).transpose()).transpose();

  m.label_mean = labels.mean();
  const double lstd = std::sqrt((labels.array() - m.label_mean).square().mean());
  m.label_std = lstd > 1e-12 ? lstd : 1.0;
  const Vec yz = (labels.array() - m.label_mean) / m.label_std;

  const Mat K = rbf_kernel(Z, Z, gamma);
  const SmoSolution sol = smo_solve(K, yz, C, epsilon);
  m.bias = sol.bias;
  m.dual_objective = sol.dual_objective;
  m.iterations = sol.iterations;

  std::vector<Eigen::Index> sv;
  for (Eigen::Index i = 0; i < sol.beta.size(); ++i)
    if (sol.beta[i] != 0.0) sv.push_back(i);
  m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), features.cols());
  m.dual_coeffs.resize(static_cast<Eigen::Index>(sv.size()));
  for (std::size_t k = 0; k < sv.size(); ++k) {
    m.support_vectors.row(static_cast<Eigen::Index>(k)) = Z.row(sv[k]);
    m.dual_coeffs[static_cast<Eigen::Index>(k)] = sol.beta[sv[k]];
  }
  return m;
}

std::string svr_to_json(const SVRModel& m) {
  nlohmann::json j;
  j["schema_version"] = kSvrSchemaVersion;
  j["gamma"] = m.gamma;
  j["C"] = m.C;
  j["epsilon"] = m.epsilon;
  j["bias"] = m.bias;
  j["label_mean"] = m.label_mean;
  j["label_std"] = m.label_std;
  j["dual_objective"] = m.dual_objective;
  j["feat_mean"] = std::vector<double>(m.feat_mean.data(), m.feat_mean.data() + m.feat_mean.size());
  j["feat_std"] = std::vector<double>(m.feat_std.data(), m.feat_std.data() + m.feat_std.size());
  j["dual_coeffs"] =
      std::vector<double>(m.dual_coeffs.data(), m.dual_coeffs.data() + m.dual_coeffs.size());
  auto& sv = j["support_vectors"] = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.support_vectors.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.support_vectors.cols()));
    for (Eigen::Index k = 0; k < m.support_vectors.cols(); ++k)
      row[static_cast<std::size_t>(k)] = m.support_vectors(i, k);
    sv.push_back(row);
  }
  return j.dump(2) + "\n";
}

SVRModel svr_from_json(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw format_error(std::string("model JSON parse failure: ") + e.what());
  }
  if (j.value("schema_version", "") != kSvrSchemaVersion)
    throw format_error("model schema version mismatch");
  SVRModel m;
  m.gamma = j.at("gamma").get<double>();
  m.C = j.at("C").get<double>();
  m.epsilon = j.at("epsilon").get<double>();
  m.bias = j.at("bias").get<double>();
  m.label_mean = j.at("label_mean").get<double>();
  m.label_std = j.at("label_std").get<double>();
  m.dual_objective = j.value("dual_objective", 0.0);
  const auto fm = j.at("feat_mean").get<std::vector<double>>();
  const auto fs = j.at("feat_std").get<std::vector<double>>();
  const auto dc = j.at("dual_coeffs").get<std::vector<double>>();
  m.feat_mean = Eigen::Map<const Vec>(fm.data(), static_cast<Eigen::Index>(fm.size()));
  m.feat_std = Eigen::Map<const Vec>(fs.data(), static_cast<Eigen::Index>(fs.size()));
  m.dual_coeffs = Eigen::Map<const Vec>(dc.data(), static_cast<Eigen::Index>(dc.size()));
  const auto& sv = j.at("support_vectors");
  if (sv.size() != dc.size()) throw format_error("support vector and dual coefficient counts differ");
  m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), m.feat_mean.size());
  for (std::size_t i = 0; i < sv.size(); ++i) {
    const auto row = sv[i].get<std::vector<double>>();
    if (row.size() != static_cast<std::size_t>(m.feat_mean.size()))
      throw format_error("support vector dimensionality mismatch");
    for (std::size_t k = 0; k < row.size(); ++k)
      m.support_vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = row[k];
  }
  return m;
}

// ---- splits -----------------------------------------------------------------

namespace {

// Deal the training side into folds: whole contents round-robin when enough
// distinct contents exist, per-video dealing otherwise.
void assign_folds(SplitPlan& plan, const std::vector<int>& effective, std::mt19937_64& rng,
                  int n_folds) {
  plan.val_folds.assign(static_cast<std::size_t>(n_folds), {});
  std::vector<int> train_contents;
  for (int i : plan.train_idx) train_contents.push_back(effective[static_cast<std::size_t>(i)]);
  std::sort(train_contents.begin(), train_contents.end());
  train_contents.erase(std::unique(train_contents.begin(), train_contents.end()),
                       train_contents.end());
  std::shuffle(train_contents.begin(), train_contents.end(), rng);

  if (static_cast<int>(train_contents.size()) >= n_folds) {
    for (std::size_t k = 0; k < train_contents.size(); ++k)
      for (int i : plan.train_idx)
        if (effective[static_cast<std::size_t>(i)] == train_contents[k])
          plan.val_folds[k % static_cast<std::size_t>(n_folds)].push_back(i);
  } else {
    std::vector<int> shuffled = plan.train_idx;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    for (std::size_t k = 0; k < shuffled.size(); ++k)
      plan.val_folds[k % static_cast<std::size_t>(n_folds)].push_back(shuffled[k]);
  }
}

std::vector<int> effective_contents(const std::vector<int>& content_ids, bool content_separated) {
  std::vector<int> effective = content_ids;
  if (!content_separated)
    for (std::size_t i = 0; i < effective.size(); ++i) effective[i] = static_cast<int>(i);
  return effective;
}

}  // namespace

SplitPlan make_split(const std::vector<int>& content_ids, std::uint64_t seed,
                     bool content_separated, int n_folds) {
  const int n = static_cast<int>(content_ids.size());
  if (n < 2) throw std::invalid_argument("corpus must hold at least two videos");
  if (n_folds < 2) throw std::invalid_argument("at least two validation folds required");

  SplitPlan plan;
  plan.seed = seed;
  plan.content_ids = content_ids;
  const std::vector<int> effective = effective_contents(content_ids, content_separated);

  std::vector<int> contents = effective;
  std::sort(contents.begin(), contents.end());
  contents.erase(std::unique(contents.begin(), contents.end()), contents.end());
  std::mt19937_64 rng(seed);
  std::shuffle(contents.begin(), contents.end(), rng);

  const int target_test = std::max<int>(1, static_cast<int>(std::llround(0.2 * n)));
  std::vector<bool> in_test_content;
  int test_count = 0;
  std::vector<int> test_contents;
  for (int c : contents) {
    if (test_count >= target_test) break;
    test_contents.push_back(c);
    test_count += static_cast<int>(std::count(effective.begin(), effective.end(), c));
  }
  auto is_test = [&](int c) {
    return std::find(test_contents.begin(), test_contents.end(), c) != test_contents.end();
  };
  for (int i = 0; i < n; ++i)
    (is_test(effective[static_cast<std::size_t>(i)]) ? plan.test_idx : plan.train_idx).push_back(i);
  if (plan.train_idx.empty() || plan.test_idx.empty())
    throw std::invalid_argument("80/20 split left an empty side; corpus too small or one content");

  assign_folds(plan, effective, rng, n_folds);
  return plan;
}

SplitPlan make_cv_plan(const std::vector<int>& content_ids, std::uint64_t seed,
                       bool content_separated, int n_folds) {
  const int n = static_cast<int>(content_ids.size());
  if (n < 2) throw std::invalid_argument("corpus must hold at least two videos");
  if (n_folds < 2) throw std::invalid_argument("at least two validation folds required");
  SplitPlan plan;
  plan.seed = seed;
  plan.content_ids = content_ids;
  plan.train_idx.resize(static_cast<std::size_t>(n));
  std::iota(plan.train_idx.begin(), plan.train_idx.end(), 0);
  const std::vector<int> effective = effective_contents(content_ids, content_separated);
  std::mt19937_64 rng(seed);
  assign_folds(plan, effective, rng, n_folds);
  return plan;
}

// ---- grid search ------------------------------------------------------------

namespace {

Mat take_rows(const Mat& X, const std::vector<int>& idx) {
  Mat out(static_cast<Eigen::Index>(idx.size()), X.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = X.row(idx[k]);
  return out;
}

Vec take(const Vec& y, const std::vector<int>& idx) {
  Vec out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = y[idx[k]];
  return out;
}

}  // namespace

GridChoice grid_search(const Mat& features, const Vec& labels, const SplitPlan& plan,
                       double epsilon) {
  if (plan.val_folds.empty()) throw std::invalid_argument("plan has no validation folds");
  for (const auto& fold : plan.val_folds)
    if (fold.size() < 2)
      throw std::invalid_argument("validation fold with fewer than two samples");

  std::vector<std::vector<int>> fold_train(plan.val_folds.size());
  for (std::size_t f = 0; f < plan.val_folds.size(); ++f) {
    for (int i : plan.train_idx)
      if (std::find(plan.val_folds[f].begin(), plan.val_folds[f].end(), i) ==
          plan.val_folds[f].end())
        fold_train[f].push_back(i);
    if (fold_train[f].size() < 2)
      throw std::invalid_argument("validation fold leaves fewer than two training samples");
  }

  GridChoice best;
  best.mean_val_srocc = -std::numeric_limits<double>::infinity();
  for (int gi = 0; gi < 10; ++gi) {
    const double gamma = 1e-8 * std::pow(10.0, gi);
    for (int ci = 0; ci < 10; ++ci) {
      const double C = 2.0 * std::pow(2.0, ci);
      double sum = 0;
      for (std::size_t f = 0; f < plan.val_folds.size(); ++f) {
        const SVRModel m =
            train_svr(take_rows(features, fold_train[f]), take(labels, fold_train[f]), gamma, C,
                      epsilon);
        const Vec pred = m.predict_rows(take_rows(features, plan.val_folds[f]));
        double s;
        try {
          s = spearman(pred, take(labels, plan.val_folds[f]));
        } catch (const numeric_error&) {
          s = -2.0;  // constant predictions rank below any real correlation
        }
        sum += s;
      }
      const double score = sum / static_cast<double>(plan.val_folds.size());
      const bool better =
          score > best.mean_val_srocc ||
          (score == best.mean_val_srocc && (C < best.C || (C == best.C && gamma < best.gamma)));
      if (better) best = {gamma, C, score};
    }
  }
  return best;
}

// ---- logistic remap ---------------------------------------------------------

double logistic_remap(const std::array<double, 5>& beta, double s) {
  const double z = beta[1] * (s - beta[2]);
  // numerically stable 1/(1+exp(z))
  const double sig = z >= 0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
  return beta[0] * (0.5 - sig) + beta[3] * s + beta[4];
}

namespace {

double logistic_sse(const std::array<double, 5>& beta, const Vec& pred, const Vec& mos) {
  double sse = 0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double d = logistic_remap(beta, pred[i]) - mos[i];
    sse += d * d;
  }
  return sse;
}

// Textbook simplex descent (reflection/expansion/contraction/shrink).
double nelder_mead(std::array<double, 5>& x, const Vec& pred, const Vec& mos, int max_iter,
                   bool& converged) {
  constexpr int D = 5;
  std::array<std::array<double, D>, D + 1> pts;
  std::array<double, D + 1> f;
  pts[0] = x;
  for (int k = 0; k < D; ++k) {
    pts[static_cast<std::size_t>(k) + 1] = x;
    double& c = pts[static_cast<std::size_t>(k) + 1][static_cast<std::size_t>(k)];
    c += c != 0.0 ? 0.05 * c : 0.00025;
  }
  for (int v = 0; v <= D; ++v) f[static_cast<std::size_t>(v)] = logistic_sse(pts[static_cast<std::size_t>(v)], pred, mos);

  std::array<int, D + 1> order;
  converged = false;
  for (int iter = 0; iter < max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return f[static_cast<std::size_t>(a)] < f[static_cast<std::size_t>(b)]; });
    const int lo = order[0], hi = order[D], nx = order[D - 1];
    if (f[static_cast<std::size_t>(hi)] - f[static_cast<std::size_t>(lo)] <=
        1e-14 * (1.0 + std::abs(f[static_cast<std::size_t>(lo)]))) {
      converged = true;
      break;
    }
    std::array<double, D> centroid{};
    for (int v = 0; v <= D; ++v)
      if (v != hi)
        for (int k = 0; k < D; ++k) centroid[static_cast<std::size_t>(k)] += pts[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] / D;
    auto blend = [&](double t) {
      std::array<double, 5> p;
      for (int k = 0; k < D; ++k)
        p[static_cast<std::size_t>(k)] = centroid[static_cast<std::size_t>(k)] +
                                         t * (centroid[static_cast<std::size_t>(k)] -
                                              pts[static_cast<std::size_t>(hi)][static_cast<std::size_t>(k)]);
      return p;
    };
    const auto refl = blend(1.0);
    const double f_refl = logistic_sse(refl, pred, mos);
    if (f_refl < f[static_cast<std::size_t>(lo)]) {
      const auto expd = blend(2.0);
      const double f_expd = logistic_sse(expd, pred, mos);
      pts[static_cast<std::size_t>(hi)] = f_expd < f_refl ? expd : refl;
      f[static_cast<std::size_t>(hi)] = std::min(f_expd, f_refl);
    } else if (f_refl < f[static_cast<std::size_t>(nx)]) {
      pts[static_cast<std::size_t>(hi)] = refl;
      f[static_cast<std::size_t>(hi)] = f_refl;
    } else {
      const auto ctr = blend(f_refl < f[static_cast<std::size_t>(hi)] ? 0.5 : -0.5);
      const double f_ctr = logistic_sse(ctr, pred, mos);
      if (f_ctr < std::min(f_refl, f[static_cast<std::size_t>(hi)])) {
        pts[static_cast<std::size_t>(hi)] = ctr;
        f[static_cast<std::size_t>(hi)] = f_ctr;
      } else {
        for (int v = 0; v <= D; ++v) {
          if (v == lo) continue;
          for (int k = 0; k < D; ++k)
            pts[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] =
                0.5 * (pts[static_cast<std::size_t>(v)][static_cast<std::size_t>(k)] +
                       pts[static_cast<std::size_t>(lo)][static_cast<std::size_t>(k)]);
          f[static_cast<std::size_t>(v)] = logistic_sse(pts[static_cast<std::size_t>(v)], pred, mos);
        }
      }
    }
  }
  int best = 0;
  for (int v = 1; v <= D; ++v)
    if (f[static_cast<std::size_t>(v)] < f[static_cast<std::size_t>(best)]) best = v;
  x = pts[static_cast<std::size_t>(best)];
  return f[static_cast<std::size_t>(best)];
}

}  // namespace

LogisticFit logistic_fit(const Vec& predicted, const Vec& mos) {
  if (predicted.size() != mos.size() || predicted.size() < 5)
    throw std::invalid_argument("logistic fit needs at least five paired points");

  const double pstd = std::sqrt((predicted.array() - predicted.mean()).square().mean());
  const std::array<double, 5> init{mos.maxCoeff() - mos.minCoeff(),
                                   pstd > 1e-12 ? 1.0 / pstd : 1.0, predicted.mean(), 0.0,
                                   mos.mean()};
  // Closed-form affine seed: with the curve amplitude at zero the model is
  // beta4*s + beta5, whose least-squares solution is exact. Starting one
  // round there lets affine-consistent data reach machine-precision error.
  const double sm = predicted.mean(), ym = mos.mean();
  const double sxx = (predicted.array() - sm).square().sum();
  const double sxy = ((predicted.array() - sm) * (mos.array() - ym)).sum();
  const double b4 = sxx > 0 ? sxy / sxx : 0.0;
  const std::array<double, 5> affine{0.0, init[1], sm, b4, ym - b4 * sm};

  LogisticFit best;
  best.sse = std::numeric_limits<double>::infinity();
  std::array<double, 5> x = init;
  for (int restart = 0; restart < 6; ++restart) {
    if (restart == 1) {
      x = affine;
    } else if (restart > 1) {
      std::mt19937_64 rng(9000 + static_cast<std::uint64_t>(restart));
      std::normal_distribution<double> jitter(0.0, 1.0);
      x = best.beta;
      for (double& c : x) c = c * (1.0 + 0.1 * jitter(rng)) + 0.01 * jitter(rng);
    }
    bool conv = false;
    const double sse = nelder_mead(x, predicted, mos, 2000, conv);
    if (sse < best.sse) {
      best.sse = sse;
      best.beta = x;
      best.converged = conv;
    }
  }
  best.remapped.resize(predicted.size());
  for (Eigen::Index i = 0; i < predicted.size(); ++i)
    best.remapped[i] = logistic_remap(best.beta, predicted[i]);
  return best;
}

// ---- metrics ----------------------------------------------------------------

Vec average_ranks(const Vec& v) {
  const Eigen::Index n = v.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return v[a] < v[b]; });
  Vec ranks(n);
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && v[order[static_cast<std::size_t>(j + 1)]] == v[order[static_cast<std::size_t>(i)]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (Eigen::Index k = i; k <= j; ++k) ranks[order[static_cast<std::size_t>(k)]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

double pearson(const Vec& a, const Vec& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("correlation needs two equal-length vectors of size >= 2");
  const Vec da = a.array() - a.mean();
  const Vec db = b.array() - b.mean();
  const double va = da.squaredNorm(), vb = db.squaredNorm();
  if (va <= 0 || vb <= 0) throw numeric_error("correlation undefined for zero-variance input");
  return da.dot(db) / std::sqrt(va * vb);
}

double spearman(const Vec& a, const Vec& b) { return pearson(average_ranks(a), average_ranks(b)); }

MetricsResult metrics(const Vec& predicted, const Vec& mos) {
  MetricsResult r;
  r.srocc = spearman(predicted, mos);
  r.fit = logistic_fit(predicted, mos);
  r.lcc = pearson(r.fit.remapped, mos);
  r.rmse = std::sqrt((r.fit.remapped - mos).squaredNorm() / static_cast<double>(mos.size()));
  return r;
}

// ---- protocol ---------------------------------------------------------------

EvalReport run_protocol(const Mat& features, const Vec& mos, const std::vector<int>& content_ids,
                        int n_splits, bool content_separated, std::uint64_t seed, double epsilon) {
  if (features.rows() < 10) throw std::invalid_argument("protocol needs a corpus of >= 10 videos");
  if (features.rows() != mos.size() ||
      content_ids.size() != static_cast<std::size_t>(features.rows()))
    throw std::invalid_argument("features, labels and content ids must align");
  if (content_separated && content_ids.empty())
    throw std::invalid_argument("content separation requested but no content map given");

  EvalReport report;
  report.seed = seed;
  report.content_separated = content_separated;
  for (int s = 0; s < n_splits; ++s) {
    const SplitPlan plan = make_split(content_ids, seed + static_cast<std::uint64_t>(s),
                                      content_separated);
    const GridChoice grid = grid_search(features, mos, plan, epsilon);
    const SVRModel model = train_svr(take_rows(features, plan.train_idx),
                                     take(mos, plan.train_idx), grid.gamma, grid.C, epsilon);
    const Vec pred = model.predict_rows(take_rows(features, plan.test_idx));
    const MetricsResult m = metrics(pred, take(mos, plan.test_idx));
    SplitOutcome out;
    out.split = s;
    out.gamma = grid.gamma;
    out.C = grid.C;
    out.srocc = m.srocc;
    out.lcc = m.lcc;
    out.rmse = m.rmse;
    out.beta = m.fit.beta;
    out.logistic_converged = m.fit.converged;
    report.splits.push_back(out);
  }

  std::vector<double> sr, lc, rm;
  for (const auto& o : report.splits) {
    sr.push_back(o.srocc);
    lc.push_back(o.lcc);
    rm.push_back(o.rmse);
  }
  report.median_srocc = median_of(sr);
  report.median_lcc = median_of(lc);
  report.median_rmse = median_of(rm);
  report.std_srocc = std_of(sr);
  report.std_lcc = std_of(lc);
  report.std_rmse = std_of(rm);
  return report;
}

std::string eval_report_to_json(const EvalReport& report) {
  nlohmann::json j;
  j["seed"] = report.seed;
  j["content_separated"] = report.content_separated;
  j["median"] = {{"srocc", report.median_srocc},
                 {"lcc", report.median_lcc},
                 {"rmse", report.median_rmse}};
  j["std"] = {{"srocc", report.std_srocc}, {"lcc", report.std_lcc}, {"rmse", report.std_rmse}};
  auto& splits = j["splits"] = nlohmann::json::array();
  for (const auto& o : report.splits)
    splits.push_back({{"split", o.split},
                      {"gamma", o.gamma},
                      {"C", o.C},
                      {"srocc", o.srocc},
                      {"lcc", o.lcc},
                      {"rmse", o.rmse},
                      {"beta", o.beta},
                      {"logistic_converged", o.logistic_converged}});
  return j.dump(2) + "\n";
}

std::string eval_report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "split,gamma,C,srocc,lcc,rmse,beta1,beta2,beta3,beta4,beta5,logistic_converged\n";
  out.precision(17);
  for (const auto& o : report.splits) {
    out << o.split << "," << o.gamma << "," << o.C << "," << o.srocc << "," << o.lcc << ","
        << o.rmse;
    for (double b : o.beta) out << "," << b;
    out << "," << (o.logistic_converged ? 1 : 0) << "\n";
  }
  return out.str();
}

}  // namespace chipqa
