#include "udetect/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace udetect {

DetectorOutput ulr(const TypeVector& t, const Pmf& p_bar, const Pmf& q_bar) {
  if (t.n == 0) throw std::invalid_argument("ulr: empty observation block");
  if (t.alphabet_size() != p_bar.size() || p_bar.size() != q_bar.size())
    throw std::invalid_argument("ulr: alphabet size mismatch");
  double stat = 0.0;
  for (int x = 0; x < t.alphabet_size(); ++x) {
    const int c = t.counts[static_cast<std::size_t>(x)];
    if (c > 0) stat += (static_cast<double>(c) / t.n) * std::log(p_bar[x] / q_bar[x]);
  }
  return DetectorOutput{stat, std::nullopt, std::nullopt};
}

double labeled_llr(std::span<const int> x, const LogLikMatrix& u, const LogLikMatrix& v) {
  if (u.alphabet_size() != v.alphabet_size() || u.columns() != v.columns())
    throw std::invalid_argument("labeled_llr: trellis shape mismatch");
  if (static_cast<int>(x.size()) != u.columns())
    throw std::invalid_argument("labeled_llr: observation length disagrees with trellis");
  double stat = 0.0;
  for (int i = 0; i < u.columns(); ++i) stat += u.at(x[static_cast<std::size_t>(i)], i) -
                                                v.at(x[static_cast<std::size_t>(i)], i);
  return stat;
}

PathSearchResult detector_a(const TypeVector& t, const LogLikMatrix& trellis) {
  const int m = trellis.alphabet_size();
  const int n = trellis.columns();
  if (t.alphabet_size() != m || t.n != n)
    throw std::invalid_argument("detector_a: type disagrees with trellis");

  PathSearchResult out;
  out.path.states.assign(static_cast<std::size_t>(n), 0);
  std::vector<char> blocked(static_cast<std::size_t>(n), 0);
  for (int k = 0; k < m; ++k) {
    const double* row = trellis.row(k);
    for (int c = 0; c < t.counts[static_cast<std::size_t>(k)]; ++c) {
      int best_i = -1;
      double best = -std::numeric_limits<double>::infinity();
      for (int i = 0; i < n; ++i) {
        if (blocked[static_cast<std::size_t>(i)]) continue;
        if (row[i] > best) {
          best = row[i];
          best_i = i;
        }
      }
      blocked[static_cast<std::size_t>(best_i)] = 1;
      out.path.states[static_cast<std::size_t>(best_i)] = k;
    }
  }
  out.value = path_value(trellis, out.path);
  return out;
}

PathSearchResult detector_b(const TypeVector& t, const LogLikMatrix& trellis) {
  const int m = trellis.alphabet_size();
  const int n = trellis.columns();
  if (t.alphabet_size() != m || t.n != n)
    throw std::invalid_argument("detector_b: type disagrees with trellis");

  // unconstrained column-wise argmax, ties to the lowest row
  std::vector<int> path(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    int arg = 0;
    double best = trellis.at(0, i);
    for (int k = 1; k < m; ++k) {
      if (trellis.at(k, i) > best) {
        best = trellis.at(k, i);
        arg = k;
      }
    }
    path[static_cast<std::size_t>(i)] = arg;
  }

  // required state changes: sorted-path multiset vs sorted observations
  std::vector<int> sp = path;
  std::sort(sp.begin(), sp.end());
  const std::vector<int> sx = t.sorted_symbols();
  std::vector<std::pair<int, int>> changes;  // (from, to)
  for (int i = 0; i < n; ++i) {
    if (sp[static_cast<std::size_t>(i)] != sx[static_cast<std::size_t>(i)])
      changes.emplace_back(sp[static_cast<std::size_t>(i)], sx[static_cast<std::size_t>(i)]);
  }

  // each change lands on the unblocked step losing the least, lowest column
  // on ties; modified steps are blocked. Candidates are exactly the initial
  // steps of the from-state that have not been modified yet, kept in
  // ascending column order so ties still resolve to the lowest column. The
  // change list is sorted, so equal (from, to) changes are consecutive; a run
  // of r of them takes the r smallest (loss, column) candidates, which is the
  // same set the one-at-a-time rule selects.
  std::vector<std::vector<int>> candidates(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i)
    candidates[static_cast<std::size_t>(path[static_cast<std::size_t>(i)])].push_back(i);
  std::vector<std::pair<double, int>> losses;
  for (std::size_t c = 0; c < changes.size();) {
    const auto [from, to] = changes[c];
    std::size_t run = c + 1;
    while (run < changes.size() && changes[run] == changes[c]) ++run;
    const int r = static_cast<int>(run - c);
    c = run;

    auto& cand = candidates[static_cast<std::size_t>(from)];
    const double* row_from = trellis.row(from);
    const double* row_to = trellis.row(to);
    if (r == 1) {
      std::size_t best_pos = 0;
      double best_loss = std::numeric_limits<double>::infinity();
      for (std::size_t pos = 0; pos < cand.size(); ++pos) {
        const double loss = row_from[cand[pos]] - row_to[cand[pos]];
        if (loss < best_loss) {
          best_loss = loss;
          best_pos = pos;
        }
      }
      path[static_cast<std::size_t>(cand[best_pos])] = to;
      cand.erase(cand.begin() + static_cast<std::ptrdiff_t>(best_pos));
      continue;
    }

    losses.clear();
    losses.reserve(cand.size());
    for (int i : cand) losses.emplace_back(row_from[i] - row_to[i], i);
    std::nth_element(losses.begin(), losses.begin() + (r - 1), losses.end());
    const std::pair<double, int> pivot = losses[static_cast<std::size_t>(r - 1)];
    std::size_t keep = 0;
    int taken = 0;
    for (std::size_t pos = 0; pos < cand.size(); ++pos) {
      const int i = cand[pos];
      const std::pair<double, int> key{row_from[i] - row_to[i], i};
      if (taken < r && key <= pivot) {
        path[static_cast<std::size_t>(i)] = to;
        ++taken;
      } else {
        cand[keep++] = i;
      }
    }
    cand.resize(keep);
  }

  PathSearchResult out;
  out.path.states = std::move(path);
  out.value = path_value(trellis, out.path);
  return out;
}

namespace {

PathSearchResult solve_trellis(const TypeVector& t, const LogLikMatrix& trellis,
                               GlrtSolver solver, const AuctionConfig* auction_cfg) {
  switch (solver) {
    case GlrtSolver::DetectorA:
      return detector_a(t, trellis);
    case GlrtSolver::DetectorB:
      return detector_b(t, trellis);
    case GlrtSolver::Hungarian: {
      RowGroupedBenefit rg(trellis, t.counts);
      AssignmentResult res = hungarian(rg);
      return PathSearchResult{to_path(res, rg), res.total_benefit};
    }
    case GlrtSolver::AuctionSp: {
      RowGroupedBenefit rg(trellis, t.counts);
      AuctionConfig cfg;
      if (auction_cfg) {
        cfg = *auction_cfg;
      } else {
        cfg.epsilon_final = default_epsilon_final(trellis.alphabet_size());
      }
      AssignmentResult res = auction_sp(rg, cfg);
      return PathSearchResult{to_path(res, rg), res.total_benefit};
    }
  }
  throw std::invalid_argument("glrt: unknown solver");
}

}  // namespace

DetectorOutput glrt(const TypeVector& t, const LogLikMatrix& u, const LogLikMatrix& v,
                    GlrtSolver solver, const AuctionConfig* auction_cfg) {
  if (u.alphabet_size() != v.alphabet_size() || u.columns() != v.columns())
    throw std::invalid_argument("glrt: trellis shape mismatch");
  // the two searches are independent; the label orderings under the two
  // hypotheses generally differ
  PathSearchResult h1 = solve_trellis(t, u, solver, auction_cfg);
  PathSearchResult h0 = solve_trellis(t, v, solver, auction_cfg);
  DetectorOutput out;
  out.statistic = h1.value - h0.value;
  out.path_h1 = std::move(h1.path);
  out.path_h0 = std::move(h0.path);
  return out;
}

}  // namespace udetect
