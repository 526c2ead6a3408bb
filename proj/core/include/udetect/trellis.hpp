#pragma once

#include <iosfwd>
#include <vector>

#include "udetect/model.hpp"
#include "udetect/pmf.hpp"

namespace udetect {

// Dense row-major matrix of finite reals; the benefit/log-likelihood carrier.
class Matrix {
 public:
  Matrix(int m, int n, std::vector<double> row_major);

  double at(int k, int i) const { return v_[static_cast<std::size_t>(k) * n_ + i]; }
  int rows() const { return m_; }
  int columns() const { return n_; }
  const double* row(int k) const { return v_.data() + static_cast<std::size_t>(k) * n_; }

 protected:
  int m_;
  int n_;
  std::vector<double> v_;
};

// m-by-n matrix of marginal log-likelihoods: entry (k, i) = log r_i(k) for
// the hypothesis the matrix was built under. Every column is the log of a
// valid PMF.
class LogLikMatrix : public Matrix {
 public:
  LogLikMatrix(int m, int n, std::vector<double> row_major_logs);
  static LogLikMatrix from_pmf_columns(const std::vector<Pmf>& columns);

  int alphabet_size() const { return m_; }
};

// Marginal log-likelihood trellis of the model's hypothesis-h sequence,
// column i = log PMF of the class owning index i.
LogLikMatrix build_loglik(const HypothesisModel& model, int hypothesis, int n);

// One state per trellis column, 0-based symbols.
struct Path {
  std::vector<int> states;

  int length() const { return static_cast<int>(states.size()); }
};

// Sum of the trellis entries the path crosses.
double path_value(const Matrix& matrix, const Path& path);

// True iff the path's per-symbol counts equal t.
bool compatible(const Path& path, const TypeVector& t);

// View of the n-by-n augmented trellis in which row k of the base matrix is
// duplicated counts[k] times. Stored implicitly; duplicated rows are the
// "similar persons" of the assignment reduction.
class RowGroupedBenefit {
 public:
  RowGroupedBenefit(const Matrix& base, std::vector<int> multiplicities);

  double benefit(int person, int object) const {
    return base_->at(row_of_person_[static_cast<std::size_t>(person)], object);
  }
  int size() const { return n_; }
  int row_of(int person) const { return row_of_person_[static_cast<std::size_t>(person)]; }
  int group_count() const { return base_->rows(); }
  // First person index of group k (prefix sums of the multiplicities).
  int group_begin(int k) const { return group_begin_[static_cast<std::size_t>(k)]; }
  const std::vector<int>& multiplicities() const { return multiplicities_; }
  const Matrix& base() const { return *base_; }

 private:
  const Matrix* base_;  // must outlive the view
  std::vector<int> multiplicities_;
  std::vector<int> group_begin_;
  std::vector<int> row_of_person_;
  int n_;
};

// Debug dump: m rows, n comma-separated columns, 17 significant digits.
void write_trellis_csv(std::ostream& out, const Matrix& matrix);

}  // namespace udetect
