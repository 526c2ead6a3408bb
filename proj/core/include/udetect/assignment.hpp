#pragma once

#include <vector>

#include "udetect/trellis.hpp"

namespace udetect {

struct AssignmentResult {
  std::vector<int> object_of_person;  // permutation of {0..n-1}
  double total_benefit = 0.0;         // recomputed in column order
  long long iterations = 0;           // augmenting steps / bids / paths visited
  double final_epsilon = 0.0;         // auction only; 0 for exact solvers
};

struct AuctionConfig {
  double epsilon_final = 1e-3;
  double scaling_factor = 4.0;
  // 0 selects (max benefit - min benefit)/2 for the instance at hand.
  double epsilon_initial = 0.0;
  long long max_bids = 1'000'000;
};

// Stock final epsilon for log-likelihood trellises of alphabet size m.
inline double default_epsilon_final(int m) { return 1e-3 / m; }

// Exact maximum-benefit assignment in O(n^3); ties resolved toward the
// lowest person index, then the lowest object index.
AssignmentResult hungarian(const RowGroupedBenefit& rg);

// Epsilon-scaled auction with group-level bidding over similar persons
// (duplicated rows). The returned total benefit is within
// n * epsilon_final of the exact maximum.
AssignmentResult auction_sp(const RowGroupedBenefit& rg, const AuctionConfig& cfg);

// Exhaustive search over distinct compatible paths (multiset permutations);
// refuses n > 8. Test oracle.
AssignmentResult brute_force(const RowGroupedBenefit& rg);

// Trellis path induced by an assignment: column i takes the base row of the
// person that owns it.
Path to_path(const AssignmentResult& result, const RowGroupedBenefit& rg);

}  // namespace udetect
