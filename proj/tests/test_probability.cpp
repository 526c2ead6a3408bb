#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "test_util.hpp"
#include "udetect/errors.hpp"
#include "udetect/experiments.hpp"
#include "udetect/model.hpp"
#include "udetect/pmf.hpp"

using namespace udetect;
using udetect::testing::random_classes;
using udetect::testing::random_pmf;

TEST_CASE("type_vector counts symbols") {
  // symbols are 0-based internally; (3,1,3) over {1,2,3} is {2,0,2}
  const std::vector<int> x{2, 0, 2};
  const TypeVector t = type_vector(x, 3);
  CHECK(t.counts == std::vector<int>{1, 0, 2});
  CHECK(t.n == 3);

  const std::vector<int> worked{2, 1, 0, 2, 0};  // the worked five-sample block
  CHECK(type_vector(worked, 3).counts == std::vector<int>{2, 1, 2});

  const TypeVector empty = type_vector(std::span<const int>{}, 3);
  CHECK(empty.counts == std::vector<int>{0, 0, 0});
  CHECK(empty.n == 0);
}

TEST_CASE("type_vector rejects out-of-alphabet symbols by index") {
  const std::vector<int> x{0, 3, 1};
  CHECK_THROWS_WITH_AS(static_cast<void>(type_vector(x, 3)),
                       doctest::Contains("index 2"), std::invalid_argument);
}

TEST_CASE("type_vector is permutation invariant") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(4));
    std::vector<int> x(20);
    for (int& s : x) s = static_cast<int>(rng.next_below(static_cast<std::uint32_t>(m)));
    const TypeVector before = type_vector(x, m);
    for (std::size_t i = x.size(); i > 1; --i)
      std::swap(x[i - 1], x[rng.next_below(static_cast<std::uint32_t>(i))]);
    CHECK(type_vector(x, m).counts == before.counts);
  }
}

TEST_CASE("type sorted_symbols recovers the sorted block") {
  const TypeVector t{{2, 1, 2}, 5};
  CHECK(t.sorted_symbols() == std::vector<int>{0, 0, 1, 2, 2});
}

TEST_CASE("pmf clamps zeros and renormalizes") {
  const Pmf p({1.0, 0.0});
  CHECK(p[1] > 0.0);
  CHECK(p[1] <= 2e-12);
  CHECK(p.clamp_correction() > 0.0);
  double sum = p[0] + p[1];
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(Pmf({0.5, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(Pmf({}), std::invalid_argument);
}

TEST_CASE("average_pmf examples") {
  const Pmf p({0.2, 0.3, 0.5});
  const Pmf single = average_pmf(std::vector<DistributionClass>{{p, 1.0}});
  for (int x = 0; x < 3; ++x) CHECK(single[x] == doctest::Approx(p[x]));

  const Pmf sym = average_pmf(
      std::vector<DistributionClass>{{Pmf({0.1, 0.9}), 0.5}, {Pmf({0.9, 0.1}), 0.5}});
  CHECK(sym[0] == doctest::Approx(0.5));
  CHECK(sym[1] == doctest::Approx(0.5));

  CHECK_THROWS_AS(average_pmf(std::vector<DistributionClass>{}), std::invalid_argument);
}

TEST_CASE("averaging the ramp columns is n-independent") {
  // column-averaged PMF: 1/(2m) then (m + 2k - 3)/(2m(m-1)) for k = 2..m
  for (int m : {3, 5}) {
    for (int n : {10, 37}) {
      ExperimentConfig cfg;
      cfg.kind = ExperimentConfig::Kind::Exp1;
      cfg.m = m;
      cfg.n = n;
      const Pmf avg = build_experiment(cfg).p_bar();
      CHECK(avg[0] == doctest::Approx(1.0 / (2.0 * m)).epsilon(1e-9));
      for (int k = 2; k <= m; ++k)
        CHECK(avg[k - 1] ==
              doctest::Approx((m + 2.0 * k - 3.0) / (2.0 * m * (m - 1.0))).epsilon(1e-9));
    }
  }
}

TEST_CASE("kl_divergence examples") {
  const Pmf a({0.5, 0.5});
  CHECK(kl_divergence(a, a) == 0.0);

  const Pmf b({0.25, 0.75});
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(kl_divergence(a, b) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(kl_divergence(a, b) == doctest::Approx(0.14384).epsilon(1e-4));

  const Pmf clamped({1.0, 0.0});
  CHECK(kl_divergence(clamped, Pmf::uniform(2)) == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  CHECK_THROWS_AS(kl_divergence(a, Pmf::uniform(3)), std::invalid_argument);
}

TEST_CASE("kl_divergence is nonnegative, zero only at equality") {
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(5));
    const Pmf a = random_pmf(rng, m);
    const Pmf b = random_pmf(rng, m);
    const double d = kl_divergence(a, b);
    CHECK(d >= 0.0);
    CHECK(kl_divergence(a, a) == 0.0);
    double linf = 0.0;
    for (int x = 0; x < m; ++x) linf = std::max(linf, std::abs(a[x] - b[x]));
    if (d < 1e-12) CHECK(linf < 1e-5);
  }
}

TEST_CASE("divergence_rate sums weighted class divergences") {
  const std::vector<DistributionClass> from{{Pmf({0.8, 0.2}), 0.5}, {Pmf({0.3, 0.7}), 0.5}};
  const std::vector<DistributionClass> to{{Pmf({0.6, 0.4}), 0.5}, {Pmf({0.5, 0.5}), 0.5}};

  CHECK(divergence_rate(from, from) == 0.0);
  const double expected = 0.5 * kl_divergence(from[0].pmf, to[0].pmf) +
                          0.5 * kl_divergence(from[1].pmf, to[1].pmf);
  CHECK(divergence_rate(from, to) == doctest::Approx(expected).epsilon(1e-15));

  const std::vector<DistributionClass> single_a{{Pmf({0.8, 0.2}), 1.0}};
  const std::vector<DistributionClass> single_b{{Pmf({0.5, 0.5}), 1.0}};
  CHECK(divergence_rate(single_a, single_b) ==
        doctest::Approx(kl_divergence(single_a[0].pmf, single_b[0].pmf)));

  const std::vector<DistributionClass> lopsided{{Pmf({0.8, 0.2}), 0.25},
                                                {Pmf({0.3, 0.7}), 0.75}};
  CHECK_THROWS_AS(static_cast<void>(divergence_rate(from, lopsided)), std::invalid_argument);
}

TEST_CASE("refine_classes pairs mismatched partitions") {
  const std::vector<DistributionClass> h1{{Pmf({0.8, 0.2}), 0.5}, {Pmf({0.3, 0.7}), 0.5}};
  const std::vector<DistributionClass> h0{{Pmf({0.5, 0.5}), 1.0}};
  const auto pairs = refine_classes(h1, h0);
  REQUIRE(pairs.size() == 2);
  CHECK(pairs[0].weight == doctest::Approx(0.5));
  CHECK(pairs[1].weight == doctest::Approx(0.5));
  CHECK(pairs[0].q[0] == doctest::Approx(0.5));
  CHECK(pairs[1].p[0] == doctest::Approx(0.3));
}

TEST_CASE("sampling: concentration, convergence, determinism") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentConfig::Kind::Exp3;
  cfg.m = 2;
  const HypothesisModel exp3 = build_experiment(cfg);

  SUBCASE("near-deterministic class") {
    const HypothesisModel model(2, {{Pmf({1.0, 0.0}), 1.0}}, {{Pmf::uniform(2), 1.0}});
    Rng rng(3);
    const auto [x, t] = sample(model, 1, 1000, rng);
    CHECK(t.counts[0] == 1000);
  }

  SUBCASE("type frequencies approach the averaged PMF") {
    Rng rng(99);
    const auto [x, t] = sample(exp3, 0, 100000, rng);
    const auto f = t.frequencies();
    CHECK(std::abs(f[0] - 0.4) < 0.01);
    CHECK(std::abs(f[1] - 0.6) < 0.01);
  }

  SUBCASE("fixed seed reproduces the draw") {
    Rng a(42), b(42);
    const auto [xa, ta] = sample(exp3, 1, 500, a);
    const auto [xb, tb] = sample(exp3, 1, 500, b);
    CHECK(xa == xb);
    CHECK(ta.counts == tb.counts);
  }

  SUBCASE("non-integral class sizes fail before sampling") {
    Rng rng(1);
    CHECK_THROWS_AS(static_cast<void>(sample(exp3, 0, 501, rng)), ConfigError);
  }
}

TEST_CASE("average_pmf output is a valid pmf on random class lists") {
  Rng rng(21);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(5));
    const auto classes = random_classes(rng, m, 1 + static_cast<int>(rng.next_below(4)));
    const Pmf avg = average_pmf(classes);
    double sum = 0.0;
    for (int x = 0; x < m; ++x) {
      CHECK(avg[x] > 0.0);
      sum += avg[x];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("model json round trip reports clamping") {
  const std::string text = R"({
    "m": 3,
    "h1": [{"pmf": [0.0, 0.3333333333333333, 0.6666666666666666], "weight": 1.0}],
    "h0": [{"pmf": [0.3333333333333333, 0.3333333333333333, 0.3333333333333334], "weight": 1.0}]
  })";
  const LoadedModel loaded = load_model_json(text);
  CHECK(loaded.clamped_entries == 1);
  CHECK(loaded.max_clamp_correction > 0.0);
  CHECK(loaded.model.alphabet_size() == 3);
  CHECK(loaded.model.h1_classes()[0].pmf[0] > 0.0);

  const LoadedModel reloaded = load_model_json(model_to_json(loaded.model));
  CHECK(reloaded.model.h1_classes()[0].pmf[1] ==
        doctest::Approx(loaded.model.h1_classes()[0].pmf[1]).epsilon(1e-15));
}
