#pragma once

#include <span>
#include <vector>

namespace udetect {

// Strictly positive probability vector over the alphabet {1,...,m}.
// Entries below kFloor are clamped and the vector renormalized, so logs of
// entries are always finite.
class Pmf {
 public:
  static constexpr double kFloor = 1e-12;

  explicit Pmf(std::vector<double> probs);

  int size() const { return static_cast<int>(p_.size()); }
  double operator[](int x) const { return p_[static_cast<std::size_t>(x)]; }
  const std::vector<double>& probs() const { return p_; }

  // Largest absolute per-entry change applied by clamping/renormalization.
  double clamp_correction() const { return correction_; }

  static Pmf uniform(int m);

 private:
  std::vector<double> p_;
  double correction_ = 0.0;
};

// One PMF in force on an asymptotic fraction `weight` of the observation
// indices; hypotheses are finite weighted lists of these.
struct DistributionClass {
  Pmf pmf;
  double weight;  // in (0, 1]
};

// Empirical counts of an observation block; counts sum to n.
struct TypeVector {
  std::vector<int> counts;
  int n = 0;

  int alphabet_size() const { return static_cast<int>(counts.size()); }
  std::vector<double> frequencies() const;
  // Nondecreasing vector of 0-based symbols, counts[k] copies of each k.
  std::vector<int> sorted_symbols() const;
};

// Counts 0-based symbols; throws std::invalid_argument naming the offending
// index on an out-of-alphabet entry.
TypeVector type_vector(std::span<const int> x, int m);

// Weighted arithmetic average of class PMFs, renormalized.
Pmf average_pmf(std::span<const DistributionClass> classes);

// KL divergence sum_x a(x) log(a(x)/b(x)) in nats, with 0 log 0 = 0.
double kl_divergence(const Pmf& a, const Pmf& b);

}  // namespace udetect
