#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "udetect/pmf.hpp"
#include "udetect/rng.hpp"

namespace udetect {

// Pair of per-index PMF sequences, represented by finite weighted classes:
// class c is in force on round(weight_c * n) consecutive indices, in
// declaration order.
class HypothesisModel {
 public:
  HypothesisModel(int m, std::vector<DistributionClass> h1_classes,
                  std::vector<DistributionClass> h0_classes);

  int alphabet_size() const { return m_; }
  const std::vector<DistributionClass>& classes(int hypothesis) const;
  const std::vector<DistributionClass>& h1_classes() const { return h1_; }
  const std::vector<DistributionClass>& h0_classes() const { return h0_; }

  Pmf p_bar() const;  // average under H1
  Pmf q_bar() const;  // average under H0

 private:
  int m_;
  std::vector<DistributionClass> h1_;
  std::vector<DistributionClass> h0_;
};

// Per-class index block sizes for a concrete sample size n. Throws
// ConfigError unless every weight*n is integral and the blocks sum to n.
std::vector<int> expand_counts(std::span<const DistributionClass> classes, int n);

// Weighted sum of per-class divergences; pairing[c] names the to-class paired
// with from-class c. Paired classes must carry equal weights.
double divergence_rate(std::span<const DistributionClass> from,
                       std::span<const DistributionClass> to,
                       std::span<const std::size_t> pairing);
// Identity pairing.
double divergence_rate(std::span<const DistributionClass> from,
                       std::span<const DistributionClass> to);

// One block of the common refinement of two class lists: on a `weight`
// fraction of indices, H1 uses `p` and H0 uses `q`. Lets operations that need
// per-index pairs (divergence rates, labeled exponents) accept models whose
// hypotheses declare different class partitions.
struct PairedClass {
  double weight;
  Pmf p;
  Pmf q;
};

std::vector<PairedClass> refine_classes(std::span<const DistributionClass> h1,
                                        std::span<const DistributionClass> h0);

// Precomputed per-class CDFs for repeated draws from one hypothesis.
class Sampler {
 public:
  Sampler(const HypothesisModel& model, int hypothesis, int n);

  int n() const { return n_; }
  // Fills x (0-based symbols, length n) and the matching type vector.
  void sample_into(Rng& rng, std::vector<int>& x, TypeVector& t) const;

 private:
  int m_;
  int n_;
  std::vector<int> class_of_index_;
  std::vector<std::vector<double>> cdf_;  // per class
};

// Draws one labeled block and its type. The type is the unlabeled view: it is
// what survives an unknown permutation of the block.
std::pair<std::vector<int>, TypeVector> sample(const HypothesisModel& model, int hypothesis,
                                               int n, Rng& rng);

// Model files: {"m": ..., "h0": [{"pmf": [...], "weight": ...}, ...], "h1": [...]}.
struct LoadedModel {
  HypothesisModel model;
  double max_clamp_correction;  // largest per-entry change applied by the PMF floor
  int clamped_entries;          // number of PMFs that needed correction
};

LoadedModel load_model_json(const std::string& text);
LoadedModel load_model_file(const std::string& path);
std::string model_to_json(const HypothesisModel& model);

}  // namespace udetect
