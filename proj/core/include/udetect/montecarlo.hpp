#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "udetect/detectors.hpp"
#include "udetect/model.hpp"

namespace udetect {

enum class DetectorKind { Labeled, Ulr, DetectorA, DetectorB, AuctionSp, Hungarian };

const char* detector_name(DetectorKind kind);
DetectorKind detector_from_name(const std::string& name);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Exact (Clopper-Pearson) binomial confidence interval.
Interval clopper_pearson(long long successes, long long trials, double confidence = 0.95);

struct RocPoint {
  double type1 = 0.0;
  double type2 = 0.0;
  Interval type1_ci;
  Interval type2_ci;
};

struct RocCurve {
  std::vector<RocPoint> points;  // sorted by type1, type2 nonincreasing
  DetectorKind detector = DetectorKind::Ulr;
  int n = 0;
  int runs = 0;
  std::uint64_t seed = 0;
  bool degenerate = false;  // constant statistic; the sweep has no interior points
};

// Statistic samples for one hypothesis; trial i uses the stream derived from
// (seed, 2*i + hypothesis), so results do not depend on the thread schedule.
std::vector<double> draw_statistics(const HypothesisModel& model, int n, DetectorKind detector,
                                    int hypothesis, int runs, std::uint64_t seed,
                                    int threads = 0);

// Empirical ROC: the threshold sweeps every distinct pooled statistic value.
RocCurve roc(const HypothesisModel& model, int n, DetectorKind detector, int runs,
             std::uint64_t seed, int threads = 0);

// Threshold selection for exponent estimates. TypeIError fixes the empirical
// type-I error target directly; TypeIExponent fixes it at exp(-n * value) so
// points at different n share the same type-I exponent.
struct ThresholdRule {
  enum class Kind { TypeIError, TypeIExponent };
  Kind kind = Kind::TypeIError;
  double value = 0.1;

  std::string describe() const;
};

struct ExponentEstimate {
  int n = 0;
  double minus_log_p0_err_over_n = 0.0;
  double minus_log_p1_err_over_n = 0.0;
  double p0_err = 0.0;
  double p1_err = 0.0;
  long long errors0 = 0;
  long long errors1 = 0;
  bool dropped = false;  // a zero error count made the exponent unobservable
};

std::vector<ExponentEstimate> empirical_exponents(const HypothesisModel& model,
                                                  std::span<const int> n_list,
                                                  DetectorKind detector, ThresholdRule rule,
                                                  int runs, std::uint64_t seed, int threads = 0);

struct BenchRow {
  DetectorKind detector = DetectorKind::Ulr;
  double median_ns_h0 = 0.0;
  double median_ns_h1 = 0.0;
  double ratio_h0 = 0.0;  // normalized to the ULR median under H0
  double ratio_h1 = 0.0;
};

// Median per-call statistic time over `reps` fresh samples, per hypothesis,
// normalized to the ULR detector. Trellises and averaged PMFs are built once
// outside the timed region; only the per-type work is measured.
std::vector<BenchRow> bench(const HypothesisModel& model, int n,
                            std::span<const DetectorKind> detectors, int reps,
                            std::uint64_t seed);

}  // namespace udetect
