#include "udetect/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "udetect/errors.hpp"

namespace udetect {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Canonical value: benefits summed in ascending object order, so equal-value
// optima produce bit-identical totals across solvers.
double column_order_value(const RowGroupedBenefit& rg, const std::vector<int>& person_of_object) {
  double sum = 0.0;
  for (int j = 0; j < rg.size(); ++j)
    sum += rg.benefit(person_of_object[static_cast<std::size_t>(j)], j);
  return sum;
}

std::vector<int> invert(const std::vector<int>& object_of_person) {
  std::vector<int> person_of_object(object_of_person.size());
  for (std::size_t p = 0; p < object_of_person.size(); ++p)
    person_of_object[static_cast<std::size_t>(object_of_person[p])] = static_cast<int>(p);
  return person_of_object;
}

// Persons of each group absorb their owned objects in ascending column order.
std::vector<int> persons_from_group_owners(const RowGroupedBenefit& rg,
                                           const std::vector<int>& owner_group) {
  std::vector<int> next_person(static_cast<std::size_t>(rg.group_count()));
  for (int g = 0; g < rg.group_count(); ++g)
    next_person[static_cast<std::size_t>(g)] = rg.group_begin(g);
  std::vector<int> object_of_person(static_cast<std::size_t>(rg.size()));
  for (int j = 0; j < rg.size(); ++j) {
    const int g = owner_group[static_cast<std::size_t>(j)];
    object_of_person[static_cast<std::size_t>(next_person[static_cast<std::size_t>(g)]++)] = j;
  }
  return object_of_person;
}

}  // namespace

AssignmentResult hungarian(const RowGroupedBenefit& rg) {
  const int n = rg.size();
  AssignmentResult result;
  if (n == 0) return result;

  // Shortest-augmenting-path form with potentials, on costs = -benefit.
  // 1-based arrays; p[j] = person matched to object j, 0 = free.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  long long steps = 0;

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      ++steps;
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = -rg.benefit(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] -
                           v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> person_of_object(static_cast<std::size_t>(n));
  result.object_of_person.resize(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    person_of_object[static_cast<std::size_t>(j - 1)] = p[static_cast<std::size_t>(j)] - 1;
    result.object_of_person[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] = j - 1;
  }
  result.total_benefit = column_order_value(rg, person_of_object);
  result.iterations = steps;
  return result;
}

namespace {

struct GroupBidContext {
  const RowGroupedBenefit* rg;
  std::vector<double>* prices;
  std::vector<int>* owner_group;    // -1 when unowned
  std::vector<int>* group_deficit;  // unassigned slots per group
  long long bids = 0;
  long long max_bids = 0;
};

// value, with lower object index winning ties
inline bool better(double va, int ja, double vb, int jb) {
  return va > vb || (va == vb && ja < jb);
}

void acquire(GroupBidContext& ctx, int g, int j, double new_price, double eps) {
  auto& owner = *ctx.owner_group;
  auto& deficit = *ctx.group_deficit;
  const int prev = owner[static_cast<std::size_t>(j)];
  if (prev != g) {
    if (prev >= 0) ++deficit[static_cast<std::size_t>(prev)];
    owner[static_cast<std::size_t>(j)] = g;
    --deficit[static_cast<std::size_t>(g)];
  }
  (*ctx.prices)[static_cast<std::size_t>(j)] = new_price;
  if (++ctx.bids > ctx.max_bids)
    throw SolverError("auction_sp: bid cap exceeded (epsilon = " + std::to_string(eps) + ")",
                      ctx.bids, eps);
}

// One batched bid: the k unassigned persons of group g take the k best
// objects at once, pricing each at the level where the (k+1)-st best object
// becomes equally attractive, plus eps.
void bid_group(GroupBidContext& ctx, int g, int k, double eps) {
  const RowGroupedBenefit& rg = *ctx.rg;
  const int n = rg.size();
  const double* row = rg.base().row(g);
  const std::vector<double>& price = *ctx.prices;

  if (k >= n) {
    // single-group instance: every object goes to g, no competition
    for (int j = 0; j < n; ++j) acquire(ctx, g, j, price[static_cast<std::size_t>(j)], eps);
    return;
  }

  if (k == 1) {
    int j_best = 0;
    double v_best = -kInf, v_second = -kInf;
    for (int j = 0; j < n; ++j) {
      const double val = row[j] - price[static_cast<std::size_t>(j)];
      if (better(val, j, v_best, j_best)) {
        v_second = v_best;
        v_best = val;
        j_best = j;
      } else if (val > v_second) {
        v_second = val;
      }
    }
    acquire(ctx, g, j_best, row[j_best] - v_second + eps, eps);
    return;
  }

  std::vector<std::pair<double, int>> vals(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    vals[static_cast<std::size_t>(j)] = {row[j] - price[static_cast<std::size_t>(j)], j};
  auto rank = [](const std::pair<double, int>& a, const std::pair<double, int>& b) {
    return better(a.first, a.second, b.first, b.second);
  };
  std::nth_element(vals.begin(), vals.begin() + k, vals.end(), rank);
  const double v_next = std::min_element(vals.begin() + k, vals.end(), rank)->first;
  std::sort(vals.begin(), vals.begin() + k, rank);
  for (int r = 0; r < k; ++r) {
    const int j = vals[static_cast<std::size_t>(r)].second;
    acquire(ctx, g, j, row[j] - v_next + eps, eps);
  }
}

}  // namespace

AssignmentResult auction_sp(const RowGroupedBenefit& rg, const AuctionConfig& cfg) {
  if (!(cfg.epsilon_final > 0.0)) throw std::invalid_argument("auction_sp: epsilon_final <= 0");
  if (!(cfg.scaling_factor > 1.0)) throw std::invalid_argument("auction_sp: scaling_factor <= 1");
  if (cfg.epsilon_initial != 0.0 && cfg.epsilon_initial < cfg.epsilon_final)
    throw std::invalid_argument("auction_sp: epsilon_initial < epsilon_final");

  const int n = rg.size();
  AssignmentResult result;
  result.final_epsilon = cfg.epsilon_final;
  if (n == 0) return result;

  double bmin = kInf, bmax = -kInf;
  for (int g = 0; g < rg.group_count(); ++g) {
    if (rg.multiplicities()[static_cast<std::size_t>(g)] == 0) continue;
    const double* row = rg.base().row(g);
    for (int j = 0; j < n; ++j) {
      bmin = std::min(bmin, row[j]);
      bmax = std::max(bmax, row[j]);
    }
  }
  double eps = cfg.epsilon_initial > 0.0 ? cfg.epsilon_initial
                                         : std::max((bmax - bmin) / 2.0, cfg.epsilon_final);
  eps = std::max(eps, cfg.epsilon_final);

  std::vector<double> prices(static_cast<std::size_t>(n), 0.0);
  std::vector<int> owner_group(static_cast<std::size_t>(n), -1);
  std::vector<int> group_deficit;
  GroupBidContext ctx{&rg, &prices, &owner_group, &group_deficit, 0, cfg.max_bids};

  for (;;) {
    // one scaling phase: assignments restart, prices carry over
    std::fill(owner_group.begin(), owner_group.end(), -1);
    group_deficit = rg.multiplicities();
    int total_deficit = n;
    while (total_deficit > 0) {
      for (int g = 0; g < rg.group_count(); ++g) {
        const int k = group_deficit[static_cast<std::size_t>(g)];
        if (k > 0) bid_group(ctx, g, k, eps);
      }
      total_deficit = std::accumulate(group_deficit.begin(), group_deficit.end(), 0);
    }
    if (eps <= cfg.epsilon_final) break;
    eps = std::max(eps / cfg.scaling_factor, cfg.epsilon_final);
  }

  result.object_of_person = persons_from_group_owners(rg, owner_group);
  result.total_benefit = column_order_value(rg, invert(result.object_of_person));
  result.iterations = ctx.bids;
  return result;
}

AssignmentResult brute_force(const RowGroupedBenefit& rg) {
  const int n = rg.size();
  if (n > 8) throw std::invalid_argument("brute_force: refusing instance with n > 8");
  AssignmentResult result;
  if (n == 0) return result;

  std::vector<int> states;
  states.reserve(static_cast<std::size_t>(n));
  for (int g = 0; g < rg.group_count(); ++g)
    states.insert(states.end(),
                  static_cast<std::size_t>(rg.multiplicities()[static_cast<std::size_t>(g)]), g);

  std::vector<int> best_states;
  double best = -kInf;
  long long visited = 0;
  do {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += rg.base().at(states[static_cast<std::size_t>(j)], j);
    ++visited;
    if (sum > best) {
      best = sum;
      best_states = states;
    }
  } while (std::next_permutation(states.begin(), states.end()));

  std::vector<int> owner_group = best_states;
  result.object_of_person = persons_from_group_owners(rg, owner_group);
  result.total_benefit = column_order_value(rg, invert(result.object_of_person));
  result.iterations = visited;
  return result;
}

Path to_path(const AssignmentResult& result, const RowGroupedBenefit& rg) {
  Path path;
  path.states.resize(result.object_of_person.size());
  for (std::size_t p = 0; p < result.object_of_person.size(); ++p)
    path.states[static_cast<std::size_t>(result.object_of_person[p])] =
        rg.row_of(static_cast<int>(p));
  return path;
}

}  // namespace udetect
