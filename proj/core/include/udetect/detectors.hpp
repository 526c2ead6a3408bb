#pragma once

#include <optional>
#include <span>

#include "udetect/assignment.hpp"
#include "udetect/trellis.hpp"

namespace udetect {

// Decision statistic on the log-likelihood-ratio scale, plus the estimated
// label paths for detectors that produce them. Path-producing detectors
// satisfy statistic = path_value(u, path_h1) - path_value(v, path_h0).
struct DetectorOutput {
  double statistic = 0.0;
  std::optional<Path> path_h1;
  std::optional<Path> path_h0;
};

// Plug-in statistic sum_x t(x) log(p_bar(x)/q_bar(x)); O(1) in n given the
// type, no label estimate.
DetectorOutput ulr(const TypeVector& t, const Pmf& p_bar, const Pmf& q_bar);

// Optimal statistic for the labeled test: sum_i (u[x_i,i] - v[x_i,i]).
double labeled_llr(std::span<const int> x, const LogLikMatrix& u, const LogLikMatrix& v);

struct PathSearchResult {
  Path path;
  double value = 0.0;
};

// Greedy search: walks the sorted observations in nondecreasing symbol order,
// each taking the best unblocked column of its row; ties go to the lowest
// column.
PathSearchResult detector_a(const TypeVector& t, const LogLikMatrix& trellis);

// Starts from the unconstrained column-wise argmax path and applies the
// minimum-loss state changes needed to reach compatibility with t.
PathSearchResult detector_b(const TypeVector& t, const LogLikMatrix& trellis);

enum class GlrtSolver { Hungarian, AuctionSp, DetectorA, DetectorB };

// Runs the chosen compatible-path search independently on the u and v
// trellises and returns U - V along with both label estimates.
DetectorOutput glrt(const TypeVector& t, const LogLikMatrix& u, const LogLikMatrix& v,
                    GlrtSolver solver, const AuctionConfig* auction_cfg = nullptr);

}  // namespace udetect
