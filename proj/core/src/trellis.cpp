#include "udetect/trellis.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace udetect {

Matrix::Matrix(int m, int n, std::vector<double> row_major)
    : m_(m), n_(n), v_(std::move(row_major)) {
  if (m_ <= 0 || n_ < 0) throw std::invalid_argument("Matrix: bad dimensions");
  if (v_.size() != static_cast<std::size_t>(m_) * static_cast<std::size_t>(n_))
    throw std::invalid_argument("Matrix: value count disagrees with dimensions");
  for (double x : v_)
    if (!std::isfinite(x)) throw std::invalid_argument("Matrix: non-finite entry");
}

LogLikMatrix::LogLikMatrix(int m, int n, std::vector<double> row_major_logs)
    : Matrix(m, n, std::move(row_major_logs)) {
  for (int i = 0; i < n_; ++i) {
    double colsum = 0.0;
    for (int k = 0; k < m_; ++k) colsum += std::exp(at(k, i));
    if (std::abs(colsum - 1.0) > 1e-9)
      throw std::invalid_argument("LogLikMatrix: column " + std::to_string(i + 1) +
                                  " is not the log of a PMF");
  }
}

LogLikMatrix LogLikMatrix::from_pmf_columns(const std::vector<Pmf>& columns) {
  if (columns.empty()) throw std::invalid_argument("LogLikMatrix: no columns");
  const int m = columns.front().size();
  const int n = static_cast<int>(columns.size());
  std::vector<double> v(static_cast<std::size_t>(m) * n);
  for (int i = 0; i < n; ++i) {
    if (columns[static_cast<std::size_t>(i)].size() != m)
      throw std::invalid_argument("LogLikMatrix: column alphabet size mismatch");
    for (int k = 0; k < m; ++k)
      v[static_cast<std::size_t>(k) * n + i] = std::log(columns[static_cast<std::size_t>(i)][k]);
  }
  return LogLikMatrix(m, n, std::move(v));
}

LogLikMatrix build_loglik(const HypothesisModel& model, int hypothesis, int n) {
  const auto& classes = model.classes(hypothesis);
  const auto counts = expand_counts(classes, n);
  std::vector<Pmf> cols;
  cols.reserve(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < classes.size(); ++c)
    for (int r = 0; r < counts[c]; ++r) cols.push_back(classes[c].pmf);
  return LogLikMatrix::from_pmf_columns(cols);
}

double path_value(const Matrix& matrix, const Path& path) {
  if (path.length() != matrix.columns())
    throw std::invalid_argument("path_value: path length disagrees with trellis");
  double sum = 0.0;
  for (int i = 0; i < path.length(); ++i)
    sum += matrix.at(path.states[static_cast<std::size_t>(i)], i);
  return sum;
}

bool compatible(const Path& path, const TypeVector& t) {
  if (path.length() != t.n) return false;
  std::vector<int> counts(t.counts.size(), 0);
  for (int s : path.states) {
    if (s < 0 || s >= t.alphabet_size()) return false;
    ++counts[static_cast<std::size_t>(s)];
  }
  return counts == t.counts;
}

RowGroupedBenefit::RowGroupedBenefit(const Matrix& base, std::vector<int> multiplicities)
    : base_(&base), multiplicities_(std::move(multiplicities)) {
  if (static_cast<int>(multiplicities_.size()) != base.rows())
    throw std::invalid_argument("RowGroupedBenefit: one multiplicity per base row required");
  n_ = 0;
  group_begin_.reserve(multiplicities_.size() + 1);
  for (std::size_t k = 0; k < multiplicities_.size(); ++k) {
    if (multiplicities_[k] < 0)
      throw std::invalid_argument("RowGroupedBenefit: negative multiplicity");
    group_begin_.push_back(n_);
    n_ += multiplicities_[k];
  }
  group_begin_.push_back(n_);
  if (n_ != base.columns())
    throw std::invalid_argument("RowGroupedBenefit: multiplicities must sum to the column count");
  row_of_person_.reserve(static_cast<std::size_t>(n_));
  for (std::size_t k = 0; k < multiplicities_.size(); ++k)
    row_of_person_.insert(row_of_person_.end(), static_cast<std::size_t>(multiplicities_[k]),
                          static_cast<int>(k));
}

void write_trellis_csv(std::ostream& out, const Matrix& matrix) {
  char buf[64];
  for (int k = 0; k < matrix.rows(); ++k) {
    for (int i = 0; i < matrix.columns(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", matrix.at(k, i));
      out << (i ? "," : "") << buf;
    }
    out << '\n';
  }
}

}  // namespace udetect
