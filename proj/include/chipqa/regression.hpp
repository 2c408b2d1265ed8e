#pragma once

// Learning and evaluation: epsilon-SVR with an RBF kernel trained by
// sequential minimal optimization, grid-search cross-validation, the
// five-parameter logistic remap, and rank/linear-correlation reporting over
// content-separated random splits.

#include "chipqa/core.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace chipqa {

inline constexpr const char* kSvrSchemaVersion = "svr-model/1";

struct SVRModel {
  Mat support_vectors;  // standardized rows
  Vec dual_coeffs;      // alpha_i - alpha_i*, one per support vector
  double bias = 0;
  double gamma = 0;
  double C = 0;
  double epsilon = 0;
  Vec feat_mean, feat_std;  // per-feature standardizer (std 0 -> coordinate forced to 0)
  double label_mean = 0, label_std = 1;
  double dual_objective = 0;  // final value of the minimized dual
  long iterations = 0;

  Vec standardize(const Vec& raw) const;
  double predict(const Vec& raw) const;
  Vec predict_rows(const Mat& raw) const;
};

// Trains on raw features (n x d) and labels; both are standardized internally.
// Throws format_error on non-finite inputs, numeric_error if the optimizer
// fails to reach its tolerance.
SVRModel train_svr(const Mat& features, const Vec& labels, double gamma, double C,
                   double epsilon = 0.1);

std::string svr_to_json(const SVRModel& model);
SVRModel svr_from_json(const std::string& json_text);

struct SplitPlan {
  std::vector<int> train_idx, test_idx;
  std::vector<std::vector<int>> val_folds;  // partition of train_idx
  std::vector<int> content_ids;             // one id per corpus row
  std::uint64_t seed = 0;
};

// 80/20 partition (test >= 20% by first crossing in shuffled-content order).
// With content separation no content id spans train and test; validation
// folds keep contents whole whenever the training set holds at least
// `n_folds` distinct contents, else they fall back to per-video dealing.
SplitPlan make_split(const std::vector<int>& content_ids, std::uint64_t seed,
                     bool content_separated, int n_folds = 5);

// Cross-validation plan over the whole corpus (empty test side), for final
// training runs that grid-search without holding data out.
SplitPlan make_cv_plan(const std::vector<int>& content_ids, std::uint64_t seed,
                       bool content_separated, int n_folds = 5);

struct GridChoice {
  double gamma = 0, C = 0;
  double mean_val_srocc = 0;
};

// 10x10 grid (gamma = 1e-8..1e1 by decades, C = 2..1024 by doubling),
// maximizing mean validation rank correlation; ties -> smaller C, then gamma.
GridChoice grid_search(const Mat& features, const Vec& labels, const SplitPlan& plan,
                       double epsilon = 0.1);

struct LogisticFit {
  std::array<double, 5> beta{};
  Vec remapped;
  double sse = 0;
  bool converged = false;
};

double logistic_remap(const std::array<double, 5>& beta, double s);
// Least-squares fit of the five-parameter logistic by simplex descent:
// two deterministic seeds (curve-shaped and exact affine least squares)
// plus four jittered restarts, 2000 iterations each.
LogisticFit logistic_fit(const Vec& predicted, const Vec& mos);

Vec average_ranks(const Vec& v);
double pearson(const Vec& a, const Vec& b);  // throws numeric_error on zero variance
double spearman(const Vec& a, const Vec& b);

struct MetricsResult {
  double srocc = 0;
  double lcc = 0;   // Pearson of logistic-remapped predictions vs labels
  double rmse = 0;  // on remapped predictions
  LogisticFit fit;
};

MetricsResult metrics(const Vec& predicted, const Vec& mos);

struct SplitOutcome {
  int split = 0;
  double gamma = 0, C = 0;
  double srocc = 0, lcc = 0, rmse = 0;
  std::array<double, 5> beta{};
  bool logistic_converged = false;
};

struct EvalReport {
  std::vector<SplitOutcome> splits;
  double median_srocc = 0, median_lcc = 0, median_rmse = 0;
  double std_srocc = 0, std_lcc = 0, std_rmse = 0;
  std::uint64_t seed = 0;
  bool content_separated = true;
};

std::string eval_report_to_json(const EvalReport& report);
std::string eval_report_to_csv(const EvalReport& report);

// Full protocol: per split (seeded by master seed + index) an 80/20
// content-separated partition, grid search on the training side, a retrain on
// the full training set, and test metrics; medians and stds over splits.
EvalReport run_protocol(const Mat& features, const Vec& mos, const std::vector<int>& content_ids,
                        int n_splits, bool content_separated, std::uint64_t seed,
                        double epsilon = 0.1);

}  // namespace chipqa
