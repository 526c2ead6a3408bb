#include "udetect/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "udetect/errors.hpp"

namespace udetect {

namespace {

void check_classes(int m, const std::vector<DistributionClass>& classes, const char* which) {
  if (classes.empty())
    throw std::invalid_argument(std::string("HypothesisModel: ") + which + " has no classes");
  double wsum = 0.0;
  for (const auto& c : classes) {
    if (c.pmf.size() != m)
      throw std::invalid_argument(std::string("HypothesisModel: ") + which +
                                  " class alphabet size mismatch");
    if (!(c.weight > 0.0) || c.weight > 1.0)
      throw std::invalid_argument(std::string("HypothesisModel: ") + which +
                                  " class weight outside (0,1]");
    wsum += c.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument(std::string("HypothesisModel: ") + which +
                                " class weights do not sum to 1");
}

}  // namespace

HypothesisModel::HypothesisModel(int m, std::vector<DistributionClass> h1_classes,
                                 std::vector<DistributionClass> h0_classes)
    : m_(m), h1_(std::move(h1_classes)), h0_(std::move(h0_classes)) {
  if (m_ <= 0) throw std::invalid_argument("HypothesisModel: alphabet size must be positive");
  check_classes(m_, h1_, "H1");
  check_classes(m_, h0_, "H0");
}

const std::vector<DistributionClass>& HypothesisModel::classes(int hypothesis) const {
  if (hypothesis != 0 && hypothesis != 1)
    throw std::invalid_argument("HypothesisModel: hypothesis must be 0 or 1");
  return hypothesis == 1 ? h1_ : h0_;
}

Pmf HypothesisModel::p_bar() const { return average_pmf(h1_); }
Pmf HypothesisModel::q_bar() const { return average_pmf(h0_); }

std::vector<int> expand_counts(std::span<const DistributionClass> classes, int n) {
  if (n < 0) throw ConfigError("expand_counts: negative sample size");
  std::vector<int> counts;
  counts.reserve(classes.size());
  int total = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const double exact = classes[c].weight * n;
    const double rounded = std::round(exact);
    if (std::abs(exact - rounded) > 1e-6)
      throw ConfigError("expand_counts: class " + std::to_string(c + 1) + " weight times n = " +
                        std::to_string(exact) + " is not integral");
    counts.push_back(static_cast<int>(rounded));
    total += counts.back();
  }
  if (total != n)
    throw ConfigError("expand_counts: class sizes sum to " + std::to_string(total) +
                      ", expected n = " + std::to_string(n));
  return counts;
}

double divergence_rate(std::span<const DistributionClass> from,
                       std::span<const DistributionClass> to,
                       std::span<const std::size_t> pairing) {
  if (pairing.size() != from.size())
    throw std::invalid_argument("divergence_rate: pairing size mismatch");
  double d = 0.0;
  for (std::size_t c = 0; c < from.size(); ++c) {
    if (pairing[c] >= to.size())
      throw std::invalid_argument("divergence_rate: pairing index out of range");
    const auto& t = to[pairing[c]];
    if (std::abs(from[c].weight - t.weight) > 1e-12)
      throw std::invalid_argument("divergence_rate: paired classes carry different weights");
    d += from[c].weight * kl_divergence(from[c].pmf, t.pmf);
  }
  return d;
}

double divergence_rate(std::span<const DistributionClass> from,
                       std::span<const DistributionClass> to) {
  std::vector<std::size_t> identity(from.size());
  for (std::size_t c = 0; c < identity.size(); ++c) identity[c] = c;
  return divergence_rate(from, to, identity);
}

std::vector<PairedClass> refine_classes(std::span<const DistributionClass> h1,
                                        std::span<const DistributionClass> h0) {
  // Classes occupy consecutive index blocks, so the two weight partitions of
  // [0,1) refine into interval overlaps.
  std::vector<PairedClass> out;
  std::size_t i = 0, j = 0;
  double used1 = 0.0, used0 = 0.0;
  while (i < h1.size() && j < h0.size()) {
    const double rem1 = h1[i].weight - used1;
    const double rem0 = h0[j].weight - used0;
    const double w = std::min(rem1, rem0);
    if (w > 1e-15) out.push_back({w, h1[i].pmf, h0[j].pmf});
    used1 += w;
    used0 += w;
    if (h1[i].weight - used1 <= 1e-15) {
      ++i;
      used1 = 0.0;
    }
    if (h0[j].weight - used0 <= 1e-15) {
      ++j;
      used0 = 0.0;
    }
  }
  return out;
}

Sampler::Sampler(const HypothesisModel& model, int hypothesis, int n)
    : m_(model.alphabet_size()), n_(n) {
  const auto& classes = model.classes(hypothesis);
  const auto counts = expand_counts(classes, n);
  class_of_index_.reserve(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < classes.size(); ++c)
    class_of_index_.insert(class_of_index_.end(), static_cast<std::size_t>(counts[c]),
                           static_cast<int>(c));
  cdf_.reserve(classes.size());
  for (const auto& cls : classes) {
    std::vector<double> cdf(static_cast<std::size_t>(m_));
    double acc = 0.0;
    for (int x = 0; x < m_; ++x) {
      acc += cls.pmf[x];
      cdf[static_cast<std::size_t>(x)] = acc;
    }
    cdf.back() = 1.0;  // guard against accumulated rounding
    cdf_.push_back(std::move(cdf));
  }
}

void Sampler::sample_into(Rng& rng, std::vector<int>& x, TypeVector& t) const {
  x.resize(static_cast<std::size_t>(n_));
  t.counts.assign(static_cast<std::size_t>(m_), 0);
  t.n = n_;
  for (int i = 0; i < n_; ++i) {
    const auto& cdf = cdf_[static_cast<std::size_t>(class_of_index_[static_cast<std::size_t>(i)])];
    const double u = rng.next_double();
    int sym = m_ - 1;
    for (int k = 0; k < m_; ++k) {
      if (u < cdf[static_cast<std::size_t>(k)]) {
        sym = k;
        break;
      }
    }
    x[static_cast<std::size_t>(i)] = sym;
    ++t.counts[static_cast<std::size_t>(sym)];
  }
}

std::pair<std::vector<int>, TypeVector> sample(const HypothesisModel& model, int hypothesis,
                                               int n, Rng& rng) {
  Sampler sampler(model, hypothesis, n);
  std::vector<int> x;
  TypeVector t;
  sampler.sample_into(rng, x, t);
  return {std::move(x), std::move(t)};
}

namespace {

std::vector<DistributionClass> classes_from_json(const nlohmann::json& arr, int m,
                                                 double& max_correction, int& clamped) {
  std::vector<DistributionClass> out;
  for (const auto& entry : arr) {
    std::vector<double> probs = entry.at("pmf").get<std::vector<double>>();
    if (static_cast<int>(probs.size()) != m)
      throw std::invalid_argument("model file: pmf length disagrees with m");
    Pmf pmf(std::move(probs));
    if (pmf.clamp_correction() > 0.0) {
      max_correction = std::max(max_correction, pmf.clamp_correction());
      ++clamped;
    }
    out.push_back({std::move(pmf), entry.at("weight").get<double>()});
  }
  return out;
}

}  // namespace

LoadedModel load_model_json(const std::string& text) {
  try {
    nlohmann::json j = nlohmann::json::parse(text);
    const int m = j.at("m").get<int>();
    double max_correction = 0.0;
    int clamped = 0;
    auto h1 = classes_from_json(j.at("h1"), m, max_correction, clamped);
    auto h0 = classes_from_json(j.at("h0"), m, max_correction, clamped);
    return {HypothesisModel(m, std::move(h1), std::move(h0)), max_correction, clamped};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("model file: ") + e.what());
  }
}

LoadedModel load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_model_json(buf.str());
}

std::string model_to_json(const HypothesisModel& model) {
  nlohmann::json j;
  j["m"] = model.alphabet_size();
  for (const char* key : {"h1", "h0"}) {
    nlohmann::json arr = nlohmann::json::array();
    const auto& classes = key == std::string("h1") ? model.h1_classes() : model.h0_classes();
    for (const auto& c : classes) arr.push_back({{"pmf", c.pmf.probs()}, {"weight", c.weight}});
    j[key] = arr;
  }
  return j.dump(2);
}

}  // namespace udetect
