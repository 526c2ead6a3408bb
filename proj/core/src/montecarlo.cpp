#include "udetect/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "udetect/errors.hpp"
#include "udetect/rng.hpp"
#include "udetect/trellis.hpp"

namespace udetect {

const char* detector_name(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::Labeled: return "labeled";
    case DetectorKind::Ulr: return "ulr";
    case DetectorKind::DetectorA: return "detA";
    case DetectorKind::DetectorB: return "detB";
    case DetectorKind::AuctionSp: return "auction";
    case DetectorKind::Hungarian: return "hungarian";
  }
  return "?";
}

DetectorKind detector_from_name(const std::string& name) {
  for (DetectorKind k : {DetectorKind::Labeled, DetectorKind::Ulr, DetectorKind::DetectorA,
                         DetectorKind::DetectorB, DetectorKind::AuctionSp,
                         DetectorKind::Hungarian}) {
    if (name == detector_name(k)) return k;
  }
  throw ConfigError("unknown detector: " + name);
}

Interval clopper_pearson(long long successes, long long trials, double confidence) {
  if (trials <= 0 || successes < 0 || successes > trials)
    throw std::invalid_argument("clopper_pearson: bad counts");
  const double a = (1.0 - confidence) / 2.0;
  Interval ci;
  const double k = static_cast<double>(successes);
  const double n = static_cast<double>(trials);
  ci.lo = successes == 0 ? 0.0 : boost::math::ibeta_inv(k, n - k + 1.0, a);
  ci.hi = successes == trials ? 1.0 : boost::math::ibeta_inv(k + 1.0, n - k, 1.0 - a);
  return ci;
}

namespace {

// Everything shared by the per-trial statistic evaluations; immutable while
// worker threads run.
struct DetectorContext {
  const HypothesisModel* model;
  LogLikMatrix u;
  LogLikMatrix v;
  Pmf p_bar;
  Pmf q_bar;
  AuctionConfig auction;

  DetectorContext(const HypothesisModel& m, int n)
      : model(&m),
        u(build_loglik(m, 1, n)),
        v(build_loglik(m, 0, n)),
        p_bar(m.p_bar()),
        q_bar(m.q_bar()) {
    auction.epsilon_final = default_epsilon_final(m.alphabet_size());
  }

  double statistic(DetectorKind kind, std::span<const int> x, const TypeVector& t) const {
    switch (kind) {
      case DetectorKind::Labeled:
        return labeled_llr(x, u, v);
      case DetectorKind::Ulr:
        return ulr(t, p_bar, q_bar).statistic;
      case DetectorKind::DetectorA:
        return glrt(t, u, v, GlrtSolver::DetectorA).statistic;
      case DetectorKind::DetectorB:
        return glrt(t, u, v, GlrtSolver::DetectorB).statistic;
      case DetectorKind::AuctionSp:
        return glrt(t, u, v, GlrtSolver::AuctionSp, &auction).statistic;
      case DetectorKind::Hungarian:
        return glrt(t, u, v, GlrtSolver::Hungarian).statistic;
    }
    throw std::invalid_argument("statistic: unknown detector");
  }
};

void parallel_trials(int runs, int threads, const std::function<void(int)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, runs));
  if (threads == 1) {
    for (int i = 0; i < runs; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  const int block = (runs + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    const int lo = w * block;
    const int hi = std::min(runs, lo + block);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<double> draw_statistics(const HypothesisModel& model, int n, DetectorKind detector,
                                    int hypothesis, int runs, std::uint64_t seed, int threads) {
  if (runs <= 0) throw ConfigError("draw_statistics: runs must be positive");
  const DetectorContext ctx(model, n);
  const Sampler sampler(model, hypothesis, n);
  const Rng master(seed);
  std::vector<double> stats(static_cast<std::size_t>(runs));
  parallel_trials(runs, threads, [&](int i) {
    Rng rng = master.stream(2ull * static_cast<std::uint64_t>(i) +
                            static_cast<std::uint64_t>(hypothesis));
    std::vector<int> x;
    TypeVector t;
    sampler.sample_into(rng, x, t);
    stats[static_cast<std::size_t>(i)] = ctx.statistic(detector, x, t);
  });
  return stats;
}

RocCurve roc(const HypothesisModel& model, int n, DetectorKind detector, int runs,
             std::uint64_t seed, int threads) {
  if (runs < 100) throw ConfigError("roc: need at least 100 runs");
  std::vector<double> s0 = draw_statistics(model, n, detector, 0, runs, seed, threads);
  std::vector<double> s1 = draw_statistics(model, n, detector, 1, runs, seed, threads);
  std::sort(s0.begin(), s0.end());
  std::sort(s1.begin(), s1.end());

  std::vector<double> thresholds;
  thresholds.reserve(s0.size() + s1.size());
  std::merge(s0.begin(), s0.end(), s1.begin(), s1.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  RocCurve curve;
  curve.detector = detector;
  curve.n = n;
  curve.runs = runs;
  curve.seed = seed;
  curve.degenerate = thresholds.size() <= 1;

  // decide H1 iff statistic > tau; tau descends so type1 ascends
  auto add_point = [&](long long wrong0, long long wrong1) {
    RocPoint pt;
    pt.type1 = static_cast<double>(wrong0) / runs;
    pt.type2 = static_cast<double>(wrong1) / runs;
    pt.type1_ci = clopper_pearson(wrong0, runs);
    pt.type2_ci = clopper_pearson(wrong1, runs);
    curve.points.push_back(pt);
  };
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    const double tau = *it;
    const long long wrong0 = s0.end() - std::upper_bound(s0.begin(), s0.end(), tau);
    const long long wrong1 = std::upper_bound(s1.begin(), s1.end(), tau) - s1.begin();
    add_point(wrong0, wrong1);
  }
  add_point(runs, 0);  // tau below every statistic
  return curve;
}

std::string ThresholdRule::describe() const {
  return (kind == Kind::TypeIError ? std::string("type1_error=") : std::string("type1_exponent=")) +
         std::to_string(value);
}

std::vector<ExponentEstimate> empirical_exponents(const HypothesisModel& model,
                                                  std::span<const int> n_list,
                                                  DetectorKind detector, ThresholdRule rule,
                                                  int runs, std::uint64_t seed, int threads) {
  if (runs <= 0) throw ConfigError("empirical_exponents: runs must be positive");
  std::vector<ExponentEstimate> out;
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    const int n = n_list[j];
    // distinct stream block per n so estimates do not depend on list order
    const std::uint64_t seed_n = Rng(seed).stream(0x10000 + j).next_u64();
    std::vector<double> s0 = draw_statistics(model, n, detector, 0, runs, seed_n, threads);
    std::vector<double> s1 = draw_statistics(model, n, detector, 1, runs, seed_n, threads);
    std::sort(s0.begin(), s0.end());

    const double theta = rule.kind == ThresholdRule::Kind::TypeIError
                             ? rule.value
                             : std::exp(-static_cast<double>(n) * rule.value);
    const long long target =
        std::clamp<long long>(std::llround(theta * runs), 1, runs);
    const double tau = s0[static_cast<std::size_t>(runs - target)];

    ExponentEstimate est;
    est.n = n;
    est.errors0 = static_cast<long long>(
        s0.end() - std::upper_bound(s0.begin(), s0.end(), tau));
    est.errors1 = static_cast<long long>(std::count_if(
        s1.begin(), s1.end(), [tau](double s) { return s <= tau; }));
    est.p0_err = static_cast<double>(est.errors0) / runs;
    est.p1_err = static_cast<double>(est.errors1) / runs;
    est.dropped = est.errors0 == 0 || est.errors1 == 0;
    if (!est.dropped) {
      est.minus_log_p0_err_over_n = -std::log(est.p0_err) / n;
      est.minus_log_p1_err_over_n = -std::log(est.p1_err) / n;
    }
    out.push_back(est);
  }
  return out;
}

namespace {

volatile double g_bench_sink = 0.0;

// Adaptive timing: repeats the call until the elapsed window is long enough
// for the steady clock, then reports per-call nanoseconds.
template <typename Fn>
double time_call_ns(Fn&& fn) {
  using clock = std::chrono::steady_clock;
  long long iters = 1;
  for (;;) {
    const auto t0 = clock::now();
    for (long long k = 0; k < iters; ++k) g_bench_sink = g_bench_sink + fn();
    const auto t1 = clock::now();
    const double ns =
        static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    if (ns >= 2000.0 || iters >= (1ll << 22)) return ns / static_cast<double>(iters);
    iters *= 4;
  }
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

std::vector<BenchRow> bench(const HypothesisModel& model, int n,
                            std::span<const DetectorKind> detectors, int reps,
                            std::uint64_t seed) {
  if (reps < 100) throw ConfigError("bench: need at least 100 reps");
  const DetectorContext ctx(model, n);

  std::vector<DetectorKind> kinds(detectors.begin(), detectors.end());
  if (std::find(kinds.begin(), kinds.end(), DetectorKind::Ulr) == kinds.end())
    kinds.insert(kinds.begin(), DetectorKind::Ulr);  // needed for normalization

  double ulr_median[2] = {0.0, 0.0};
  std::vector<BenchRow> rows(kinds.size());
  for (std::size_t d = 0; d < kinds.size(); ++d) rows[d].detector = kinds[d];

  for (int h = 0; h <= 1; ++h) {
    const Sampler sampler(model, h, n);
    const Rng master(seed);
    std::vector<std::vector<int>> xs(static_cast<std::size_t>(reps));
    std::vector<TypeVector> ts(static_cast<std::size_t>(reps));
    for (int r = 0; r < reps; ++r) {
      Rng rng = master.stream(2ull * static_cast<std::uint64_t>(r) +
                              static_cast<std::uint64_t>(h));
      sampler.sample_into(rng, xs[static_cast<std::size_t>(r)], ts[static_cast<std::size_t>(r)]);
    }
    for (std::size_t d = 0; d < kinds.size(); ++d) {
      std::vector<double> times(static_cast<std::size_t>(reps));
      for (int r = 0; r < reps; ++r) {
        const auto& x = xs[static_cast<std::size_t>(r)];
        const auto& t = ts[static_cast<std::size_t>(r)];
        times[static_cast<std::size_t>(r)] =
            time_call_ns([&] { return ctx.statistic(kinds[d], x, t); });
      }
      const double med = median(std::move(times));
      if (h == 0)
        rows[d].median_ns_h0 = med;
      else
        rows[d].median_ns_h1 = med;
      if (kinds[d] == DetectorKind::Ulr) ulr_median[h] = med;
    }
  }
  for (auto& row : rows) {
    row.ratio_h0 = row.median_ns_h0 / ulr_median[0];
    row.ratio_h1 = row.median_ns_h1 / ulr_median[1];
  }
  return rows;
}

}  // namespace udetect
