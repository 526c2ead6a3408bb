#include "udetect/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace udetect {

Pmf::Pmf(std::vector<double> probs) : p_(std::move(probs)) {
  if (p_.empty()) throw std::invalid_argument("Pmf: empty probability vector");
  for (std::size_t i = 0; i < p_.size(); ++i) {
    if (!std::isfinite(p_[i]) || p_[i] < 0.0)
      throw std::invalid_argument("Pmf: entry " + std::to_string(i + 1) +
                                  " is negative or not finite");
  }
  double sum = std::accumulate(p_.begin(), p_.end(), 0.0);
  if (sum <= 0.0) throw std::invalid_argument("Pmf: probabilities sum to zero");

  std::vector<double> before = p_;
  for (double& v : p_) v = std::max(v, kFloor);
  sum = std::accumulate(p_.begin(), p_.end(), 0.0);
  for (double& v : p_) v /= sum;
  for (std::size_t i = 0; i < p_.size(); ++i)
    correction_ = std::max(correction_, std::abs(p_[i] - before[i]));
}

Pmf Pmf::uniform(int m) {
  if (m <= 0) throw std::invalid_argument("Pmf: alphabet size must be positive");
  return Pmf(std::vector<double>(static_cast<std::size_t>(m), 1.0 / m));
}

std::vector<double> TypeVector::frequencies() const {
  std::vector<double> f(counts.size(), 0.0);
  if (n == 0) return f;
  for (std::size_t k = 0; k < counts.size(); ++k) f[k] = static_cast<double>(counts[k]) / n;
  return f;
}

std::vector<int> TypeVector::sorted_symbols() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < alphabet_size(); ++k)
    for (int c = 0; c < counts[static_cast<std::size_t>(k)]; ++c) out.push_back(k);
  return out;
}

TypeVector type_vector(std::span<const int> x, int m) {
  if (m <= 0) throw std::invalid_argument("type_vector: alphabet size must be positive");
  TypeVector t;
  t.counts.assign(static_cast<std::size_t>(m), 0);
  t.n = static_cast<int>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < 0 || x[i] >= m)
      throw std::invalid_argument("type_vector: symbol out of alphabet at index " +
                                  std::to_string(i + 1));
    ++t.counts[static_cast<std::size_t>(x[i])];
  }
  return t;
}

Pmf average_pmf(std::span<const DistributionClass> classes) {
  if (classes.empty()) throw std::invalid_argument("average_pmf: empty class list");
  const int m = classes.front().pmf.size();
  std::vector<double> avg(static_cast<std::size_t>(m), 0.0);
  for (const auto& c : classes) {
    if (c.pmf.size() != m)
      throw std::invalid_argument("average_pmf: classes disagree on alphabet size");
    for (int x = 0; x < m; ++x) avg[static_cast<std::size_t>(x)] += c.weight * c.pmf[x];
  }
  return Pmf(std::move(avg));
}

double kl_divergence(const Pmf& a, const Pmf& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("kl_divergence: alphabet size mismatch");
  double d = 0.0;
  for (int x = 0; x < a.size(); ++x) {
    if (a[x] > 0.0) d += a[x] * std::log(a[x] / b[x]);
  }
  return std::max(d, 0.0);
}

}  // namespace udetect
