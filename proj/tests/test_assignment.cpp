#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "test_util.hpp"
#include "udetect/assignment.hpp"
#include "udetect/errors.hpp"

using namespace udetect;
using udetect::testing::random_trellis;
using udetect::testing::random_type;

namespace {

bool is_valid_grouped_permutation(const AssignmentResult& r, const RowGroupedBenefit& rg) {
  if (static_cast<int>(r.object_of_person.size()) != rg.size()) return false;
  std::vector<char> seen(static_cast<std::size_t>(rg.size()), 0);
  for (int o : r.object_of_person) {
    if (o < 0 || o >= rg.size() || seen[static_cast<std::size_t>(o)]) return false;
    seen[static_cast<std::size_t>(o)] = 1;
  }
  // each group's persons absorb exactly multiplicity-many objects by layout
  double recomputed = 0.0;
  for (int p = 0; p < rg.size(); ++p)
    recomputed += rg.benefit(p, r.object_of_person[static_cast<std::size_t>(p)]);
  return std::abs(recomputed - r.total_benefit) < 1e-9;
}

Matrix worked_base() {
  return Matrix(3, 5,
                {std::log(1.0 / 10), std::log(1.0 / 12), std::log(1.0 / 6), std::log(1.0 / 4),
                 std::log(1.0 / 3), std::log(3.0 / 10), std::log(1.0 / 3), std::log(1.0 / 3),
                 std::log(1.0 / 3), std::log(1.0 / 3), std::log(3.0 / 5), std::log(7.0 / 12),
                 std::log(1.0 / 2), std::log(5.0 / 12), std::log(1.0 / 3)});
}

}  // namespace

TEST_CASE("hungarian on a dominant diagonal") {
  const Matrix base(2, 2, {2, 1, 1, 2});
  const RowGroupedBenefit rg(base, {1, 1});
  const AssignmentResult r = hungarian(rg);
  CHECK(r.object_of_person == std::vector<int>{0, 1});
  CHECK(r.total_benefit == 4.0);
}

TEST_CASE("hungarian matches brute force on the worked instance") {
  const Matrix base = worked_base();
  const RowGroupedBenefit rg(base, {2, 1, 2});
  const AssignmentResult exact = hungarian(rg);
  const AssignmentResult oracle = brute_force(rg);
  CHECK(exact.total_benefit == oracle.total_benefit);
  CHECK(is_valid_grouped_permutation(exact, rg));
  CHECK(is_valid_grouped_permutation(oracle, rg));
}

TEST_CASE("hungarian tie-break on a constant matrix is the identity") {
  const Matrix base(1, 4, {1.5, 1.5, 1.5, 1.5});
  const RowGroupedBenefit rg(base, {4});
  const AssignmentResult r = hungarian(rg);
  CHECK(r.object_of_person == std::vector<int>{0, 1, 2, 3});
  CHECK(r.total_benefit == doctest::Approx(6.0));
}

TEST_CASE("brute force handles degenerate multiplicities") {
  const Matrix base(2, 3, {5, 6, 7, 0, 0, 0});
  const RowGroupedBenefit rg(base, {3, 0});
  const AssignmentResult r = brute_force(rg);
  CHECK(r.total_benefit == 18.0);
  CHECK(r.iterations == 1);  // a single compatible path

  const Matrix two(2, 2, {3, 1, 2, 5});
  const RowGroupedBenefit rg2(two, {1, 1});
  CHECK(brute_force(rg2).total_benefit == 8.0);

  const Matrix big(1, 9, {1, 1, 1, 1, 1, 1, 1, 1, 1});
  const RowGroupedBenefit rg3(big, {9});
  CHECK_THROWS_AS(static_cast<void>(brute_force(rg3)), std::invalid_argument);
}

TEST_CASE("hungarian equals brute force on random instances") {
  Rng rng(31);
  for (int rep = 0; rep < 250; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(3));
    const int n = 2 + static_cast<int>(rng.next_below(7));
    const LogLikMatrix base = random_trellis(rng, m, n);
    const TypeVector t = random_type(rng, m, n);
    const RowGroupedBenefit rg(base, t.counts);
    CHECK(hungarian(rg).total_benefit == brute_force(rg).total_benefit);
  }
}

TEST_CASE("auction on a single pairing") {
  const Matrix base(1, 1, {2.5});
  const RowGroupedBenefit rg(base, {1});
  const AssignmentResult r = auction_sp(rg, AuctionConfig{});
  CHECK(r.object_of_person == std::vector<int>{0});
  CHECK(r.total_benefit == 2.5);
}

TEST_CASE("auction with small epsilon is exact on integer benefits") {
  Rng rng(37);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> values(36);
    for (double& v : values) v = static_cast<double>(rng.next_below(12));
    const Matrix base(6, 6, std::move(values));
    const RowGroupedBenefit rg(base, {1, 1, 1, 1, 1, 1});
    AuctionConfig cfg;
    cfg.epsilon_final = 0.9 / 6;  // < 1/n forces exact optimality on integers
    const AssignmentResult approx = auction_sp(rg, cfg);
    const AssignmentResult oracle = brute_force(rg);
    CHECK(approx.total_benefit == oracle.total_benefit);
    CHECK(is_valid_grouped_permutation(approx, rg));
  }
}

TEST_CASE("auction respects the n-epsilon optimality bound") {
  Rng rng(41);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(3));
    const int n = 2 + static_cast<int>(rng.next_below(7));
    const LogLikMatrix base = random_trellis(rng, m, n);
    const TypeVector t = random_type(rng, m, n);
    const RowGroupedBenefit rg(base, t.counts);
    AuctionConfig cfg;
    cfg.epsilon_final = default_epsilon_final(m);
    const AssignmentResult approx = auction_sp(rg, cfg);
    const AssignmentResult exact = hungarian(rg);
    CHECK(approx.total_benefit >= exact.total_benefit - n * cfg.epsilon_final - 1e-12);
    CHECK(approx.total_benefit <= exact.total_benefit + 1e-12);
    CHECK(approx.final_epsilon == cfg.epsilon_final);
    CHECK(is_valid_grouped_permutation(approx, rg));
  }
}

TEST_CASE("auction is deterministic for a given config") {
  Rng rng(47);
  const LogLikMatrix base = random_trellis(rng, 3, 30);
  const TypeVector t = random_type(rng, 3, 30);
  const RowGroupedBenefit rg(base, t.counts);
  AuctionConfig cfg;
  cfg.epsilon_final = default_epsilon_final(3);
  const AssignmentResult a = auction_sp(rg, cfg);
  const AssignmentResult b = auction_sp(rg, cfg);
  CHECK(a.object_of_person == b.object_of_person);
  CHECK(a.total_benefit == b.total_benefit);
  CHECK(a.iterations == b.iterations);
}

TEST_CASE("auction reports non-convergence through the bid cap") {
  Rng rng(43);
  const LogLikMatrix base = random_trellis(rng, 3, 12);
  const TypeVector t = random_type(rng, 3, 12);
  const RowGroupedBenefit rg(base, t.counts);
  AuctionConfig cfg;
  cfg.epsilon_final = 1e-9;
  cfg.max_bids = 3;
  CHECK_THROWS_AS(static_cast<void>(auction_sp(rg, cfg)), SolverError);
}

TEST_CASE("auction rejects bad configurations") {
  const Matrix base(1, 1, {0.0});
  const RowGroupedBenefit rg(base, {1});
  AuctionConfig bad;
  bad.epsilon_final = 0.0;
  CHECK_THROWS_AS(static_cast<void>(auction_sp(rg, bad)), std::invalid_argument);
  bad.epsilon_final = 1e-3;
  bad.scaling_factor = 1.0;
  CHECK_THROWS_AS(static_cast<void>(auction_sp(rg, bad)), std::invalid_argument);
}

TEST_CASE("to_path recovers the induced trellis path") {
  const Matrix base = worked_base();
  const RowGroupedBenefit rg(base, {2, 1, 2});
  const AssignmentResult r = hungarian(rg);
  const Path p = to_path(r, rg);
  CHECK(p.length() == 5);
  CHECK(path_value(base, p) == doctest::Approx(r.total_benefit).epsilon(1e-12));
  std::vector<int> counts(3, 0);
  for (int s : p.states) ++counts[static_cast<std::size_t>(s)];
  CHECK(counts == std::vector<int>{2, 1, 2});
}
