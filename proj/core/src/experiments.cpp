#include "udetect/experiments.hpp"

#include <cmath>
#include <stdexcept>

#include "udetect/errors.hpp"

namespace udetect {

ExperimentConfig::Kind experiment_from_name(const std::string& name) {
  if (name == "exp1") return ExperimentConfig::Kind::Exp1;
  if (name == "exp2") return ExperimentConfig::Kind::Exp2;
  if (name == "exp3") return ExperimentConfig::Kind::Exp3;
  if (name == "custom") return ExperimentConfig::Kind::Custom;
  throw ConfigError("unknown experiment: " + name);
}

const char* experiment_name(ExperimentConfig::Kind kind) {
  switch (kind) {
    case ExperimentConfig::Kind::Exp1: return "exp1";
    case ExperimentConfig::Kind::Exp2: return "exp2";
    case ExperimentConfig::Kind::Exp3: return "exp3";
    case ExperimentConfig::Kind::Custom: return "custom";
  }
  return "?";
}

namespace {

HypothesisModel build_exp1(int m, int n) {
  if (m < 2) throw ConfigError("exp1: field m must be >= 2");
  if (n < 2) throw ConfigError("exp1: field n must be >= 2");
  const double kappa = 2.0 / (m * (m - 1.0));
  std::vector<DistributionClass> h1;
  h1.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    std::vector<double> col(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      const double left = k * kappa;  // leftmost column; contains a literal zero at k = 0
      col[static_cast<std::size_t>(k)] = left + j * (1.0 / m - left) / (n - 1.0);
    }
    h1.push_back({Pmf(std::move(col)), 1.0 / n});
  }
  std::vector<DistributionClass> h0{{Pmf::uniform(m), 1.0}};
  return HypothesisModel(m, std::move(h1), std::move(h0));
}

HypothesisModel build_exp2(int m, double delta) {
  if (m < 2) throw ConfigError("exp2: field m must be >= 2");
  if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("exp2: field delta must be in (0,1)");
  const double step = 2.0 / (m * (m + 1.0));
  std::vector<double> q(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) q[static_cast<std::size_t>(k)] = (k + 1) * step;

  auto spiked = [&](int at) {
    std::vector<double> p(static_cast<std::size_t>(m), delta / (m - 1.0));
    p[static_cast<std::size_t>(at)] = 1.0 - delta;
    return Pmf(std::move(p));
  };
  std::vector<DistributionClass> h1{{spiked(0), 0.5}, {spiked(m - 1), 0.5}};
  std::vector<DistributionClass> h0{{Pmf(std::move(q)), 1.0}};
  return HypothesisModel(m, std::move(h1), std::move(h0));
}

HypothesisModel build_exp3() {
  std::vector<DistributionClass> h1{{Pmf({0.1, 0.9}), 0.5}, {Pmf({0.9, 0.1}), 0.5}};
  std::vector<DistributionClass> h0{{Pmf({0.5, 0.5}), 0.5}, {Pmf({0.3, 0.7}), 0.5}};
  return HypothesisModel(2, std::move(h1), std::move(h0));
}

}  // namespace

HypothesisModel build_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentConfig::Kind::Exp1:
      return build_exp1(cfg.m, cfg.n);
    case ExperimentConfig::Kind::Exp2:
      return build_exp2(cfg.m, cfg.delta);
    case ExperimentConfig::Kind::Exp3:
      if (cfg.m != 2) throw ConfigError("exp3: field m is fixed at 2");
      return build_exp3();
    case ExperimentConfig::Kind::Custom: {
      if (cfg.model_file.empty()) throw ConfigError("custom experiment: field model is required");
      return load_model_file(cfg.model_file).model;
    }
  }
  throw ConfigError("build_experiment: unknown experiment kind");
}

}  // namespace udetect
