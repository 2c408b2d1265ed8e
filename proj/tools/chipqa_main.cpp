// Command-line entrypoint binding the pipeline: feature extraction, model
// training/prediction, protocol evaluation, naturalness-model fitting, and
// synthetic-motion validation.

#include "chipqa/features.hpp"
#include "chipqa/pixelmath.hpp"
#include "chipqa/motionval.hpp"
#include "chipqa/regression.hpp"
#include "chipqa/video_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace chipqa;

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << content;
}

std::vector<FeatureVector> load_corpus(const std::string& path) {
  const std::string text = slurp(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw format_error("empty feature file: " + path);
  std::vector<FeatureVector> rows;
  if (text[first] == '{') {
    rows.push_back(feature_vector_from_json(text));
  } else if (text[first] == '[') {
    nlohmann::json arr;
    try {
      arr = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw format_error(std::string("feature JSON parse failure: ") + e.what());
    }
    for (const auto& e : arr) rows.push_back(feature_vector_from_json(e.dump()));
  } else {
    std::istringstream in(text);
    std::string header, line;
    if (!std::getline(in, header)) throw format_error("feature CSV missing header: " + path);
    while (std::getline(in, line)) {
      if (line.empty() || line == "\r") continue;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      rows.push_back(feature_vector_from_csv(header + "\n" + line + "\n"));
    }
  }
  if (rows.empty()) throw format_error("feature file holds no rows: " + path);
  return rows;
}

struct MosTable {
  std::vector<std::string> ids;
  std::vector<double> mos;
  std::vector<int> content;
  bool has_content = false;
};

MosTable load_mos_csv(const std::string& path) {
  std::istringstream in(slurp(path));
  std::string header;
  if (!std::getline(in, header)) throw format_error("empty MOS file: " + path);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  MosTable t;
  if (header == "video_id,mos,content_id")
    t.has_content = true;
  else if (header != "video_id,mos")
    throw format_error("MOS CSV header must be video_id,mos[,content_id], got: " + header);

  std::map<std::string, int> content_codes;
  std::string line;
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string id, mos_str, content_str;
    if (!std::getline(cells, id, ',') || !std::getline(cells, mos_str, ','))
      throw format_error("MOS CSV line " + std::to_string(lineno) + " malformed");
    t.ids.push_back(id);
    try {
      t.mos.push_back(std::stod(mos_str));
    } catch (const std::exception&) {
      throw format_error("MOS CSV line " + std::to_string(lineno) + ": bad mos value");
    }
    if (t.has_content) {
      if (!std::getline(cells, content_str, ','))
        throw format_error("MOS CSV line " + std::to_string(lineno) + " missing content_id");
      auto [it, _] = content_codes.emplace(content_str, static_cast<int>(content_codes.size()));
      t.content.push_back(it->second);
    }
  }
  if (t.ids.empty()) throw format_error("MOS file holds no rows: " + path);
  return t;
}

struct JoinedCorpus {
  Mat X;
  Vec y;
  std::vector<int> content;
  std::vector<std::string> ids;
  bool has_content = false;
};

JoinedCorpus join_corpus(const std::vector<FeatureVector>& rows, const MosTable& mos) {
  JoinedCorpus j;
  j.has_content = mos.has_content;
  j.X.resize(static_cast<Eigen::Index>(rows.size()), kFeatureCount);
  j.y.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto it = std::find(mos.ids.begin(), mos.ids.end(), rows[i].video_id);
    if (it == mos.ids.end())
      throw format_error("no MOS entry for video_id '" + rows[i].video_id + "'");
    const auto k = static_cast<std::size_t>(it - mos.ids.begin());
    j.X.row(static_cast<Eigen::Index>(i)) = rows[i].values.transpose();
    j.y[static_cast<Eigen::Index>(i)] = mos.mos[k];
    j.content.push_back(mos.has_content ? mos.content[k] : static_cast<int>(i));
    j.ids.push_back(rows[i].video_id);
  }
  return j;
}

void add_pipeline_flags(CLI::App* sub, PipelineConfig& cfg) {
  sub->add_option("--K", cfg.K, "normalization window half-size");
  sub->add_option("--C-stab", cfg.C_stab, "normalization stabilizer");
  sub->add_option("--a", cfg.a, "temporal kernel decay");
  sub->add_option("--T", cfg.T, "frames per group");
  sub->add_option("--R", cfg.R, "chip side length (must equal T)");
  sub->add_option("--Q", cfg.Q, "quantized angle count");
  sub->add_option("--D", cfg.D, "window stride factor");
  sub->add_option("--threads", cfg.threads, "worker threads over frame groups");
  sub->add_option("--seed", cfg.seed, "master random seed");
}

int run(int argc, char** argv) {
  CLI::App app{"ChipQA: no-reference video quality features, training and evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML-style configuration file (section per subcommand)");

  PipelineConfig cfg;

  // ---- extract ----
  auto* sub_extract = app.add_subcommand("extract", "Extract the 221-entry feature vector");
  std::string ex_input, ex_output = "-", ex_csv, ex_id, ex_model;
  sub_extract->add_option("--input,-i", ex_input, "input Y4M video ('-' for stdin)")->required();
  sub_extract->add_option("--output,-o", ex_output, "feature JSON output ('-' for stdout)");
  sub_extract->add_option("--csv", ex_csv, "also write the flat CSV form here");
  sub_extract->add_option("--id", ex_id, "video id recorded in the output (default: basename)");
  sub_extract->add_option("--niqe-model", ex_model, "naturalness model JSON (required)");
  add_pipeline_flags(sub_extract, cfg);
  sub_extract->callback([&] {
    cfg.niqe_model_path = ex_model.empty() ? cfg.niqe_model_path : ex_model;
    if (cfg.niqe_model_path.empty())
      throw std::invalid_argument("a naturalness model is required (--niqe-model)");
    const NiqeModel model = load_niqe_model(cfg.niqe_model_path);
    StageTimings timings;
    FeatureVector fv;
    if (ex_input == "-") {
      auto reader = open_video(std::make_unique<std::istream>(std::cin.rdbuf()));
      fv = extract_features(*reader, cfg, &model, &timings);
    } else {
      auto reader = open_video(ex_input);
      fv = extract_features(*reader, cfg, &model, &timings);
    }
    fv.video_id = !ex_id.empty()          ? ex_id
                  : ex_input == "-"       ? "stdin"
                                          : std::filesystem::path(ex_input).stem().string();
    spit(ex_output, to_json(fv));
    if (!ex_csv.empty()) spit(ex_csv, to_csv(fv));
    for (const auto& [stage, t_ms] : timings)
      std::cerr << "timing " << stage << ": " << t_ms << " ms\n";
    for (const auto& w : fv.warnings) std::cerr << "warning: " << w << "\n";
  });

  // ---- train ----
  auto* sub_train = app.add_subcommand("train", "Train the quality regressor");
  std::string tr_features, tr_mos, tr_output;
  double tr_gamma = 0, tr_C = 0, tr_eps = 0.1;
  bool tr_no_content = false;
  sub_train->add_option("--features", tr_features, "feature corpus (JSON array or CSV)")->required();
  sub_train->add_option("--mos", tr_mos, "MOS CSV: video_id,mos[,content_id]")->required();
  sub_train->add_option("--output,-o", tr_output, "model JSON output")->required();
  sub_train->add_option("--gamma", tr_gamma, "fixed kernel width (0 = grid search)");
  sub_train->add_option("--C", tr_C, "fixed regularization (0 = grid search)");
  sub_train->add_option("--epsilon", tr_eps, "tube width on z-scored labels");
  sub_train->add_flag("--no-content-separation", tr_no_content,
                      "allow contents to span validation folds");
  add_pipeline_flags(sub_train, cfg);
  sub_train->callback([&] {
    const JoinedCorpus corpus = join_corpus(load_corpus(tr_features), load_mos_csv(tr_mos));
    const bool separated = corpus.has_content && !tr_no_content;
    double gamma = tr_gamma, C = tr_C;
    if (!(gamma > 0) || !(C > 0)) {
      SplitPlan plan = make_cv_plan(corpus.content, cfg.seed, separated);
      const GridChoice grid = grid_search(corpus.X, corpus.y, plan, tr_eps);
      gamma = grid.gamma;
      C = grid.C;
      std::cerr << "grid search: gamma=" << gamma << " C=" << C
                << " mean validation srocc=" << grid.mean_val_srocc << "\n";
    }
    const SVRModel model = train_svr(corpus.X, corpus.y, gamma, C, tr_eps);
    spit(tr_output, svr_to_json(model));
    std::cerr << "trained on " << corpus.ids.size() << " videos, " << model.dual_coeffs.size()
              << " support vectors\n";
  });

  // ---- predict ----
  auto* sub_predict = app.add_subcommand("predict", "Score feature vectors with a trained model");
  std::string pr_features, pr_model, pr_output = "-";
  sub_predict->add_option("--features", pr_features, "feature file (single or corpus)")->required();
  sub_predict->add_option("--model", pr_model, "model JSON")->required();
  sub_predict->add_option("--output,-o", pr_output, "CSV output: video_id,score");
  sub_predict->callback([&] {
    const SVRModel model = svr_from_json(slurp(pr_model));
    std::ostringstream out;
    out << "video_id,score\n";
    out.precision(17);
    for (const auto& fv : load_corpus(pr_features))
      out << fv.video_id << "," << model.predict(Vec(fv.values)) << "\n";
    spit(pr_output, out.str());
  });

  // ---- eval ----
  auto* sub_eval = app.add_subcommand("eval", "Run the split-evaluation protocol");
  std::string ev_features, ev_mos, ev_output = "-", ev_csv;
  int ev_splits = 10;
  double ev_eps = 0.1;
  bool ev_no_content = false;
  sub_eval->add_option("--features", ev_features, "feature corpus (JSON array or CSV)")->required();
  sub_eval->add_option("--mos", ev_mos, "MOS CSV: video_id,mos[,content_id]")->required();
  sub_eval->add_option("--splits", ev_splits, "number of random splits");
  sub_eval->add_option("--epsilon", ev_eps, "tube width on z-scored labels");
  sub_eval->add_option("--output,-o", ev_output, "report JSON output");
  sub_eval->add_option("--csv", ev_csv, "per-split CSV output");
  sub_eval->add_flag("--no-content-separation", ev_no_content, "ignore content ids in splits");
  add_pipeline_flags(sub_eval, cfg);
  sub_eval->callback([&] {
    const JoinedCorpus corpus = join_corpus(load_corpus(ev_features), load_mos_csv(ev_mos));
    const bool separated = !ev_no_content;
    if (separated && !corpus.has_content)
      throw std::invalid_argument(
          "content separation requested but the MOS file has no content_id column "
          "(pass --no-content-separation to split per video)");
    const EvalReport report =
        run_protocol(corpus.X, corpus.y, corpus.content, ev_splits, separated, cfg.seed, ev_eps);
    spit(ev_output, eval_report_to_json(report));
    if (!ev_csv.empty()) spit(ev_csv, eval_report_to_csv(report));
    std::cerr << "median srocc=" << report.median_srocc << " lcc=" << report.median_lcc
              << " rmse=" << report.median_rmse << " over " << ev_splits << " splits\n";
  });

  // ---- validate-motion ----
  auto* sub_motion = app.add_subcommand("validate-motion",
                                        "Synthetic-motion orientation validation");
  SyntheticSpec spec;
  std::string mo_texture = "smoothed", mo_output = "-", mo_csv;
  sub_motion->add_option("--theta", spec.theta, "ground-truth orientation in [0, pi)")->required();
  sub_motion->add_option("--speed", spec.speed, "pixels per frame");
  sub_motion->add_option("--texture", mo_texture, "texture kind: smoothed | white")
      ->check(CLI::IsMember({"smoothed", "white"}));
  sub_motion->add_option("--sigma-s", spec.sigma_s, "blur width of the smoothed texture");
  sub_motion->add_option("--width", spec.width, "frame width");
  sub_motion->add_option("--height", spec.height, "frame height");
  sub_motion->add_option("--frames", spec.frames, "frame count (>= 2 groups)");
  sub_motion->add_option("--output,-o", mo_output, "report JSON output");
  sub_motion->add_option("--csv", mo_csv, "two-column offset/kurtosis CSV output");
  add_pipeline_flags(sub_motion, cfg);
  sub_motion->callback([&] {
    spec.texture = mo_texture == "white" ? TextureKind::WhiteNoise : TextureKind::SmoothedNoise;
    spec.seed = cfg.seed;
    if (spec.frames < 2 * cfg.T)
      throw std::invalid_argument("need at least " + std::to_string(2 * cfg.T) + " frames");
    const std::vector<Fieldd> frames = make_video(spec);
    const AngleReport report = evaluate_orientation(frames, spec.theta, spec.speed, cfg);
    spit(mo_output, angle_report_to_json(report));
    if (!mo_csv.empty()) spit(mo_csv, angle_report_to_csv(report));
  });

  // ---- niqe-model ----
  auto* sub_niqe = app.add_subcommand("niqe-model", "Fit the pristine naturalness model");
  std::vector<std::string> nm_videos;
  int nm_synth = 0, nm_width = 288, nm_height = 288, nm_patch = 96;
  double nm_frac = 0.75;
  std::string nm_output;
  sub_niqe->add_option("--videos", nm_videos, "pristine Y4M inputs (every frame becomes a still)");
  sub_niqe->add_option("--synthetic", nm_synth, "generate N seeded smoothed-noise stills instead");
  sub_niqe->add_option("--width", nm_width, "synthetic still width");
  sub_niqe->add_option("--height", nm_height, "synthetic still height");
  sub_niqe->add_option("--patch-size", nm_patch, "patch side length");
  sub_niqe->add_option("--sharpness-fraction", nm_frac, "keep patches >= fraction of peak sharpness");
  sub_niqe->add_option("--output,-o", nm_output, "model JSON output")->required();
  add_pipeline_flags(sub_niqe, cfg);
  sub_niqe->callback([&] {
    std::vector<Fieldd> stills;
    for (const auto& path : nm_videos) {
      auto reader = open_video(path);
      while (auto frame = reader->next_frame()) stills.push_back(luma709(*frame));
    }
    const double sigma_cycle[5] = {0.8, 1.2, 1.6, 2.4, 3.2};
    for (int i = 0; i < nm_synth; ++i) {
      SyntheticSpec s;
      s.width = nm_width;
      s.height = nm_height;
      s.sigma_s = sigma_cycle[i % 5];
      s.seed = cfg.seed + static_cast<std::uint64_t>(i);
      stills.push_back(make_texture(s));
    }
    if (stills.empty())
      throw std::invalid_argument("no pristine stills: pass --videos and/or --synthetic N");
    const NiqeModel model = fit_niqe_model(stills, cfg, nm_patch, nm_frac);
    save_niqe_model(model, nm_output);
    std::cerr << "fitted naturalness model from " << stills.size() << " stills\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const chipqa::format_error& e) {
    std::cerr << "input format error: " << e.what() << "\n";
    return 3;
  } catch (const chipqa::numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
