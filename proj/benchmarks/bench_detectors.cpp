// Microbenchmarks for the per-type detector statistics and the assignment
// solvers, on the linear-ramp experiment family.

#include <benchmark/benchmark.h>

#include "udetect/assignment.hpp"
#include "udetect/detectors.hpp"
#include "udetect/experiments.hpp"
#include "udetect/exponents.hpp"
#include "udetect/montecarlo.hpp"
#include "udetect/rng.hpp"

using namespace udetect;

namespace {

Pmf random_pmf(Rng& rng, int m) {
  std::vector<double> v(static_cast<std::size_t>(m));
  for (double& x : v) x = 0.05 + rng.next_double();
  return Pmf(std::move(v));
}

struct Fixture {
  HypothesisModel model;
  LogLikMatrix u;
  LogLikMatrix v;
  Pmf p_bar;
  Pmf q_bar;
  TypeVector type;
  std::vector<int> labeled;

  Fixture(int m, int n) : model(make_model(m, n)), u(build_loglik(model, 1, n)),
                          v(build_loglik(model, 0, n)), p_bar(model.p_bar()),
                          q_bar(model.q_bar()) {
    Rng rng(7);
    auto drawn = sample(model, 1, n, rng);
    labeled = std::move(drawn.first);
    type = std::move(drawn.second);
  }

  static HypothesisModel make_model(int m, int n) {
    ExperimentConfig cfg;
    cfg.kind = ExperimentConfig::Kind::Exp1;
    cfg.m = m;
    cfg.n = n;
    return build_experiment(cfg);
  }
};

void BM_Ulr(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(ulr(f.type, f.p_bar, f.q_bar).statistic);
}

void BM_DetectorA(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(glrt(f.type, f.u, f.v, GlrtSolver::DetectorA).statistic);
}

void BM_DetectorB(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(glrt(f.type, f.u, f.v, GlrtSolver::DetectorB).statistic);
}

void BM_AuctionSp(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(glrt(f.type, f.u, f.v, GlrtSolver::AuctionSp).statistic);
}

void BM_Hungarian(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state)
    benchmark::DoNotOptimize(glrt(f.type, f.u, f.v, GlrtSolver::Hungarian).statistic);
}

void BM_LabeledLlr(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(labeled_llr(f.labeled, f.u, f.v));
}

void BM_LegendreTransform(benchmark::State& state) {
  Rng rng(11);
  const int m = static_cast<int>(state.range(0));
  std::vector<DistributionClass> classes;
  for (int c = 0; c < 2; ++c) classes.push_back({random_pmf(rng, m), 0.5});
  const Pmf omega = random_pmf(rng, m);
  for (auto _ : state) benchmark::DoNotOptimize(legendre_psi(omega, classes));
}

void BM_OmegaUnlabeled(benchmark::State& state) {
  ExperimentConfig cfg;
  cfg.kind = ExperimentConfig::Kind::Exp3;
  cfg.m = 2;
  const HypothesisModel model = build_experiment(cfg);
  const double alpha_star = legendre_psi(model.p_bar(), model.h0_classes());
  for (auto _ : state) benchmark::DoNotOptimize(omega_unlabeled(0.5 * alpha_star, model));
}

}  // namespace

BENCHMARK(BM_Ulr)->Args({5, 100})->Args({20, 100});
BENCHMARK(BM_DetectorA)->Args({5, 10})->Args({5, 100})->Args({20, 100});
BENCHMARK(BM_DetectorB)->Args({5, 10})->Args({5, 100})->Args({20, 100});
BENCHMARK(BM_AuctionSp)->Args({5, 10})->Args({5, 100})->Args({20, 100});
BENCHMARK(BM_Hungarian)->Args({5, 100});
BENCHMARK(BM_LabeledLlr)->Args({5, 100});
BENCHMARK(BM_LegendreTransform)->Arg(2)->Arg(8);
BENCHMARK(BM_OmegaUnlabeled);

BENCHMARK_MAIN();
