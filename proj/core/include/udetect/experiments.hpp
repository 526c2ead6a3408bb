#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "udetect/model.hpp"
#include "udetect/montecarlo.hpp"

namespace udetect {

// Configuration of one reproducible experiment run. The builders mirror the
// three stock case studies:
//   exp1 - H0 uniform, H1 per-index PMFs ramping linearly from the steep
//          leftmost column to uniform (one class of weight 1/n per column);
//   exp2 - H0 iid triangular, H1 half the indices with mass 1-delta on the
//          first symbol and half with mass 1-delta on the last;
//   exp3 - binary alphabet, non-iid halves under both hypotheses.
struct ExperimentConfig {
  enum class Kind { Exp1, Exp2, Exp3, Custom };

  Kind kind = Kind::Exp1;
  int m = 3;
  int n = 100;
  double delta = 0.5;  // exp2 only
  int runs = 10000;
  std::uint64_t seed = 12345;
  std::vector<DetectorKind> detectors;
  std::string model_file;  // custom only
  std::string out_dir = ".";
  int threads = 0;
};

ExperimentConfig::Kind experiment_from_name(const std::string& name);
const char* experiment_name(ExperimentConfig::Kind kind);

// Builds the exact class structure for the configured experiment; throws
// ConfigError naming the offending field when an invariant fails
// (exp1 needs m >= 2 and n >= 2, exp2 needs 0 < delta < 1, exp3 forces m = 2).
HypothesisModel build_experiment(const ExperimentConfig& cfg);

}  // namespace udetect
