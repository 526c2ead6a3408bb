// Command-line front end: reproduces the stock experiments and exposes the
// library detectors, exponent curves, and Monte Carlo harness on configs.
// Exit codes: 0 ok, 2 usage/config error, 3 numeric/solver failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "udetect/errors.hpp"
#include "udetect/experiments.hpp"
#include "udetect/exponents.hpp"
#include "udetect/montecarlo.hpp"
#include "udetect/trellis.hpp"

namespace {

using namespace udetect;

std::uint64_t default_seed() {
  if (const char* env = std::getenv("UNLABELED_DETECT_SEED"))
    return std::strtoull(env, nullptr, 10);
  return 12345;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<DetectorKind> parse_detectors(const std::string& csv) {
  std::vector<DetectorKind> kinds;
  std::stringstream ss(csv);
  std::string token;
  while (std::getline(ss, token, ','))
    if (!token.empty()) kinds.push_back(detector_from_name(token));
  if (kinds.empty()) throw ConfigError("no detectors selected");
  return kinds;
}

std::string fmt(double v, const char* format = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

struct CommonArgs {
  std::string experiment = "exp1";
  int m = 3;
  bool m_explicit = false;
  int n = 100;
  double delta = 0.5;
  int runs = 10000;
  std::uint64_t seed = default_seed();
  int threads = 0;
  std::string detectors = "ulr,detA,detB,auction";
  std::string model_file;
  std::string out_dir = ".";

  void attach(CLI::App* cmd, bool with_mc = true) {
    cmd->add_option("--experiment", experiment, "exp1 | exp2 | exp3 | custom")
        ->check(CLI::IsMember({"exp1", "exp2", "exp3", "custom"}));
    cmd->add_option("--m", m, "alphabet size")
        ->each([this](const std::string&) { m_explicit = true; });
    cmd->add_option("--n", n, "sample size");
    cmd->add_option("--delta", delta, "spike mass parameter (exp2)");
    cmd->add_option("--model", model_file, "model JSON file (custom experiment)");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--seed", seed, "master seed (env UNLABELED_DETECT_SEED)");
    if (with_mc) {
      cmd->add_option("--runs", runs, "Monte Carlo runs per hypothesis");
      cmd->add_option("--threads", threads, "worker threads; 0 = machine parallelism");
      cmd->add_option("--detectors", detectors, "comma-separated detector list");
    }
  }

  int resolved_m() const { return experiment == "exp3" && !m_explicit ? 2 : m; }

  ExperimentConfig experiment_config() const {
    ExperimentConfig cfg;
    cfg.kind = experiment_from_name(experiment);
    cfg.m = resolved_m();
    cfg.n = n;
    cfg.delta = delta;
    cfg.runs = runs;
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.model_file = model_file;
    cfg.out_dir = out_dir;
    return cfg;
  }

  HypothesisModel build_model() const {
    const ExperimentConfig cfg = experiment_config();
    if (cfg.kind == ExperimentConfig::Kind::Custom) {
      if (cfg.model_file.empty()) throw ConfigError("custom experiment: --model is required");
      const LoadedModel loaded = load_model_file(cfg.model_file);
      if (loaded.clamped_entries > 0)
        std::cerr << "note: clamped " << loaded.clamped_entries
                  << " pmf(s), largest correction " << fmt(loaded.max_clamp_correction) << "\n";
      return loaded.model;
    }
    return build_experiment(cfg);
  }

  std::string canonical() const {
    std::ostringstream os;
    os << "experiment=" << experiment << ";m=" << resolved_m() << ";n=" << n
       << ";delta=" << fmt(delta) << ";runs=" << runs << ";seed=" << seed
       << ";detectors=" << detectors;
    if (!model_file.empty()) os << ";model=" << model_file;
    return os.str();
  }

  void write_metadata(std::ostream& out, const char* detector = nullptr) const {
    out << "# experiment=" << experiment << "\n";
    if (detector) out << "# detector=" << detector << "\n";
    out << "# m=" << resolved_m() << "\n";
    out << "# n=" << n << "\n";
    out << "# runs=" << runs << "\n";
    out << "# seed=" << seed << "\n";
    out << "# config=" << canonical() << "\n";
    char hash[32];
    std::snprintf(hash, sizeof(hash), "0x%016llx",
                  static_cast<unsigned long long>(fnv1a(canonical())));
    out << "# config_hash=" << hash << "\n";
  }
};

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file: " + path);
  return out;
}

double type2_nearest(const RocCurve& curve, double target) {
  double best = 1.0, gap = 2.0;
  for (const auto& pt : curve.points) {
    if (std::abs(pt.type1 - target) < gap) {
      gap = std::abs(pt.type1 - target);
      best = pt.type2;
    }
  }
  return best;
}

int run_roc(const CommonArgs& args, bool gnuplot) {
  const HypothesisModel model = args.build_model();
  const auto kinds = parse_detectors(args.detectors);

  std::vector<std::string> files;
  std::printf("%-10s  %-22s  %s\n", "detector", "type2 @ type1~0.1", "sweep points");
  for (DetectorKind kind : kinds) {
    const RocCurve curve = roc(model, args.n, kind, args.runs, args.seed, args.threads);
    const std::string name =
        std::string("roc_") + args.experiment + "_" + detector_name(kind) + ".csv";
    std::ofstream out = open_output(args.out_dir, name);
    args.write_metadata(out, detector_name(kind));
    out << "# degenerate=" << (curve.degenerate ? 1 : 0) << "\n";
    out << "type1,type2,type1_lo,type1_hi,type2_lo,type2_hi\n";
    for (const auto& pt : curve.points) {
      out << fmt(pt.type1) << ',' << fmt(pt.type2) << ',' << fmt(pt.type1_ci.lo) << ','
          << fmt(pt.type1_ci.hi) << ',' << fmt(pt.type2_ci.lo) << ',' << fmt(pt.type2_ci.hi)
          << "\n";
    }
    files.push_back(name);
    std::printf("%-10s  %-22s  %zu%s\n", detector_name(kind),
                fmt(type2_nearest(curve, 0.1)).c_str(), curve.points.size(),
                curve.degenerate ? "  (degenerate)" : "");
  }

  if (gnuplot) {
    std::ofstream gp = open_output(args.out_dir, std::string("plot_") + args.experiment + ".gp");
    gp << "set datafile separator ','\nset datafile commentschars '#'\n"
       << "set xlabel 'type I error'\nset ylabel 'type II error'\nset key left bottom\n"
       << "set logscale y\nplot \\\n";
    for (std::size_t i = 0; i < files.size(); ++i)
      gp << "  '" << files[i] << "' using 1:2 with lines title '" << detector_name(kinds[i])
         << (i + 1 < files.size() ? "', \\\n" : "'\n");
  }
  for (const auto& f : files) std::printf("wrote %s/%s\n", args.out_dir.c_str(), f.c_str());
  return 0;
}

int run_exponent_curve(const CommonArgs& args, int points, double min_frac, double max_frac) {
  const HypothesisModel model = args.build_model();

  const double alpha_star = legendre_psi(model.p_bar(), model.h0_classes());
  std::vector<double> grid;
  if (points > 1) {
    const double lo = alpha_star * min_frac;
    const double hi = alpha_star * max_frac;
    const double ratio = std::pow(hi / lo, 1.0 / (points - 1));
    double a = lo;
    for (int i = 0; i < points; ++i, a *= ratio) grid.push_back(a);
    grid.back() = hi;
  } else {
    grid = default_alpha_grid(alpha_star);
  }

  const ExponentCurve unlabeled = exponent_curve(model, grid);
  const ExponentCurve labeled = exponent_curve_labeled(model, grid);
  const std::vector<DistributionClass> pbar{{model.p_bar(), 1.0}};
  const std::vector<DistributionClass> qbar{{model.q_bar(), 1.0}};
  const ExponentCurve iid = exponent_curve(pbar, qbar, grid);

  std::ofstream out =
      open_output(args.out_dir, std::string("exponent_curve_") + args.experiment + ".csv");
  args.write_metadata(out);
  out << "# omega_at_zero=" << fmt(unlabeled.omega_at_zero) << "\n";
  out << "# alpha_star=" << fmt(unlabeled.alpha_star) << "\n";
  write_curves_csv(out, unlabeled, labeled, iid);
  std::printf("omega(0)=%s  alpha*=%s  points=%zu\n", fmt(unlabeled.omega_at_zero).c_str(),
              fmt(unlabeled.alpha_star).c_str(), grid.size());
  std::printf("wrote %s/exponent_curve_%s.csv\n", args.out_dir.c_str(), args.experiment.c_str());
  return 0;
}

ThresholdRule parse_rule(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError("threshold rule must be kind:value");
  const std::string kind = text.substr(0, colon);
  ThresholdRule rule;
  rule.value = std::stod(text.substr(colon + 1));
  if (kind == "error")
    rule.kind = ThresholdRule::Kind::TypeIError;
  else if (kind == "exponent")
    rule.kind = ThresholdRule::Kind::TypeIExponent;
  else
    throw ConfigError("unknown threshold rule kind: " + kind);
  return rule;
}

int run_empirical_exponents(const CommonArgs& args, const std::string& n_list_csv,
                            const std::string& rule_text) {
  const auto kinds = parse_detectors(args.detectors);
  const ThresholdRule rule = parse_rule(rule_text);

  std::vector<int> n_list;
  std::stringstream ss(n_list_csv);
  std::string token;
  while (std::getline(ss, token, ',')) n_list.push_back(std::stoi(token));
  if (n_list.empty()) throw ConfigError("empty n list");

  for (DetectorKind kind : kinds) {
    std::vector<ExponentEstimate> points;
    for (int n : n_list) {
      // experiments whose classes depend on n are regenerated per n
      CommonArgs per_n = args;
      per_n.n = n;
      const HypothesisModel model = per_n.build_model();
      const std::vector<int> single{n};
      const auto part =
          empirical_exponents(model, single, kind, rule, args.runs, args.seed, args.threads);
      points.push_back(part.front());
    }

    std::ofstream out = open_output(args.out_dir, std::string("empirical_exponents_") +
                                                      args.experiment + "_" +
                                                      detector_name(kind) + ".csv");
    args.write_metadata(out, detector_name(kind));
    out << "# threshold_rule=" << rule.describe() << "\n";
    out << "n,type1_exponent,type2_exponent,p0_err,p1_err,errors0,errors1,dropped\n";
    for (const auto& pt : points) {
      if (pt.dropped)
        std::fprintf(stderr, "warning: n=%d dropped (zero error count at this run budget)\n",
                     pt.n);
      out << pt.n << ',' << fmt(pt.minus_log_p0_err_over_n) << ','
          << fmt(pt.minus_log_p1_err_over_n) << ',' << fmt(pt.p0_err) << ',' << fmt(pt.p1_err)
          << ',' << pt.errors0 << ',' << pt.errors1 << ',' << (pt.dropped ? 1 : 0) << "\n";
    }
    std::printf("wrote %s/empirical_exponents_%s_%s.csv\n", args.out_dir.c_str(),
                args.experiment.c_str(), detector_name(kind));
  }
  return 0;
}

int run_bench(const CommonArgs& args, int reps) {
  const HypothesisModel model = args.build_model();
  const auto kinds = parse_detectors(args.detectors);
  const auto rows = bench(model, args.n, kinds, reps, args.seed);

  std::printf("%-10s  %14s  %12s  %14s  %12s\n", "detector", "H0 median ns", "H0 / ulr",
              "H1 median ns", "H1 / ulr");
  std::ofstream out = open_output(args.out_dir, std::string("bench_") + args.experiment + ".csv");
  args.write_metadata(out);
  out << "# reps=" << reps << "\n";
  out << "detector,median_ns_h0,ratio_h0,median_ns_h1,ratio_h1\n";
  for (const auto& row : rows) {
    std::printf("%-10s  %14.0f  %12.2f  %14.0f  %12.2f\n", detector_name(row.detector),
                row.median_ns_h0, row.ratio_h0, row.median_ns_h1, row.ratio_h1);
    out << detector_name(row.detector) << ',' << fmt(row.median_ns_h0) << ','
        << fmt(row.ratio_h0) << ',' << fmt(row.median_ns_h1) << ',' << fmt(row.ratio_h1)
        << "\n";
  }
  std::printf("wrote %s/bench_%s.csv\n", args.out_dir.c_str(), args.experiment.c_str());
  return 0;
}

int run_detect(const CommonArgs& args, const std::string& type_csv, const std::string& detector,
               const std::string& dump_dir) {
  const HypothesisModel model = args.build_model();

  std::vector<int> counts;
  std::stringstream ss(type_csv);
  std::string token;
  while (std::getline(ss, token, ',')) counts.push_back(std::stoi(token));
  if (static_cast<int>(counts.size()) != model.alphabet_size())
    throw ConfigError("type vector needs one count per symbol");
  TypeVector t;
  t.counts = counts;
  t.n = 0;
  for (int c : counts) {
    if (c < 0) throw ConfigError("type counts must be nonnegative");
    t.n += c;
  }

  const LogLikMatrix u = build_loglik(model, 1, t.n);
  const LogLikMatrix v = build_loglik(model, 0, t.n);

  if (!dump_dir.empty()) {
    std::ofstream fu = open_output(dump_dir, "trellis_h1.csv");
    write_trellis_csv(fu, u);
    std::ofstream fv = open_output(dump_dir, "trellis_h0.csv");
    write_trellis_csv(fv, v);
  }

  const DetectorKind kind = detector_from_name(detector);
  DetectorOutput out;
  switch (kind) {
    case DetectorKind::Ulr:
      out = ulr(t, model.p_bar(), model.q_bar());
      break;
    case DetectorKind::DetectorA:
      out = glrt(t, u, v, GlrtSolver::DetectorA);
      break;
    case DetectorKind::DetectorB:
      out = glrt(t, u, v, GlrtSolver::DetectorB);
      break;
    case DetectorKind::Hungarian:
      out = glrt(t, u, v, GlrtSolver::Hungarian);
      break;
    case DetectorKind::AuctionSp:
      out = glrt(t, u, v, GlrtSolver::AuctionSp);
      break;
    case DetectorKind::Labeled:
      throw ConfigError("detect works on unlabeled types; pick an unlabeled detector");
  }

  nlohmann::json j;
  j["detector"] = detector_name(kind);
  j["m"] = model.alphabet_size();
  j["n"] = t.n;
  j["statistic"] = out.statistic;
  auto path_json = [](const std::optional<Path>& p) {
    nlohmann::json arr = nlohmann::json::array();
    if (p)
      for (int s : p->states) arr.push_back(s + 1);  // symbols are 1-based outside
    return arr;
  };
  j["path_h1"] = out.path_h1 ? path_json(out.path_h1) : nlohmann::json();
  j["path_h0"] = out.path_h0 ? path_json(out.path_h0) : nlohmann::json();
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"binary hypothesis testing with unlabeled discrete observations"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from an INI config file");

  CommonArgs roc_args, curve_args, emp_args, bench_args, detect_args;
  bool gnuplot = false;
  int curve_points = 0;
  double curve_min_frac = 0.001, curve_max_frac = 1.2;
  std::string n_list = "50,100,250,500";
  std::string rule_text = "error:0.1";
  int bench_reps = 200;
  std::string type_csv, detect_detector = "detB", dump_dir;

  CLI::App* roc_cmd = app.add_subcommand("roc", "Monte Carlo ROC curves, one CSV per detector");
  roc_args.attach(roc_cmd);
  roc_cmd->add_flag("--gnuplot", gnuplot, "also emit a gnuplot script");

  CLI::App* curve_cmd =
      app.add_subcommand("exponent-curve", "asymptotic error-exponent curves as CSV");
  curve_args.attach(curve_cmd, false);
  curve_cmd->add_option("--points", curve_points, "grid size (default 200)");
  curve_cmd->add_option("--alpha-min-frac", curve_min_frac, "grid start as a fraction of alpha*");
  curve_cmd->add_option("--alpha-max-frac", curve_max_frac, "grid end as a fraction of alpha*");

  CLI::App* emp_cmd =
      app.add_subcommand("empirical-exponents", "empirical exponent points over a list of n");
  emp_args.attach(emp_cmd);
  emp_cmd->add_option("--n-list", n_list, "comma-separated sample sizes");
  emp_cmd->add_option("--threshold-rule", rule_text, "error:<p> or exponent:<alpha>");

  CLI::App* bench_cmd = app.add_subcommand("bench", "median detector runtimes relative to ULR");
  bench_args.attach(bench_cmd);
  bench_cmd->add_option("--reps", bench_reps, "timing repetitions");

  CLI::App* detect_cmd =
      app.add_subcommand("detect", "single-shot detection on a type vector, JSON out");
  detect_args.attach(detect_cmd, false);
  detect_cmd->add_option("--type", type_csv, "comma-separated per-symbol counts")->required();
  detect_cmd->add_option("--detector", detect_detector, "ulr | detA | detB | hungarian | auction");
  detect_cmd->add_option("--dump-trellis", dump_dir, "write both trellises as CSV to this dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (roc_cmd->parsed()) return run_roc(roc_args, gnuplot);
    if (curve_cmd->parsed())
      return run_exponent_curve(curve_args, curve_points, curve_min_frac, curve_max_frac);
    if (emp_cmd->parsed()) return run_empirical_exponents(emp_args, n_list, rule_text);
    if (bench_cmd->parsed()) return run_bench(bench_args, bench_reps);
    if (detect_cmd->parsed()) return run_detect(detect_args, type_csv, detect_detector, dump_dir);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
