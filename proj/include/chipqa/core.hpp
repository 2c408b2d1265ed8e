#pragma once

// Core scalar-field types and pipeline configuration shared by every module.
// The numeric core is Eigen-based: dense arrays templated on scalar,
// free functions, no other math dependency.

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace chipqa {

// Row-major so field(y, x) walks memory like an image raster.
template <typename T>
using Field = Eigen::Array<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Fieldd = Field<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Malformed input data (bad header, truncated payload, bad schema). CLI exit code 3.
struct format_error : std::runtime_error {
  explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

// Numeric failure or degenerate corpus (one-sided samples, zero-variance labels...).
// CLI exit code 4.
struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

// Pipeline parameters. Defaults are the deployed configuration.
struct PipelineConfig {
  int K = 3;                    // MSCN window half-size: (2K+1)^2 window
  double C_stab = 1.0 / 255.0;  // MSCN stabilizer on the [0,1] sample scale
  double a = 0.5;               // temporal kernel decay
  int T = 5;                    // frames per group (T')
  int R = 5;                    // chip side length; coupled to T
  int Q = 6;                    // quantized angle count
  int D = 4;                    // window stride factor (windows every D*R px)
  int scales = 2;               // spatial scales
  std::string niqe_model_path;  // empty -> NIQE block needs an explicit model
  std::uint64_t seed = 0;
  int threads = 1;

  void validate() const {
    if (R != T) throw std::invalid_argument("config: R must equal T (coupled group/chip length)");
    if (R % 2 == 0 || R < 3) throw std::invalid_argument("config: R must be odd and >= 3");
    if (Q < 2) throw std::invalid_argument("config: Q must be >= 2");
    if (D < 1) throw std::invalid_argument("config: D must be >= 1");
    if (K < 1) throw std::invalid_argument("config: K must be >= 1");
    if (C_stab <= 0) throw std::invalid_argument("config: stabilizer must be positive");
    if (a <= 0) throw std::invalid_argument("config: temporal decay must be positive");
    if (scales < 1 || scales > 2) throw std::invalid_argument("config: scales must be 1 or 2");
    if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  }
};

}  // namespace chipqa
