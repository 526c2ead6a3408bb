#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <vector>

#include "udetect/model.hpp"
#include "udetect/pmf.hpp"

namespace udetect {

// Tilt vector with the reference coordinate pinned to zero. The reference
// symbol is always the last one, so lambda coordinates are reproducible.
struct LambdaVector {
  Eigen::VectorXd free;  // coordinates of symbols 0..m-2

  LambdaVector() = default;
  explicit LambdaVector(int m) : free(Eigen::VectorXd::Zero(m - 1)) {}
  explicit LambdaVector(Eigen::VectorXd free_coords) : free(std::move(free_coords)) {}

  int alphabet_size() const { return static_cast<int>(free.size()) + 1; }
  double at(int x) const { return x == free.size() ? 0.0 : free[x]; }
};

// Log moment generating function of one marginal: log sum_x r(x) e^{lambda(x)}.
double phi(const LambdaVector& lam, const Pmf& r);
// Gradient as a full strictly positive PMF (the exponentially tilted r).
Pmf grad_phi(const LambdaVector& lam, const Pmf& r);
// (m-1)x(m-1) Hessian on the free coordinates; symmetric positive definite.
Eigen::MatrixXd hess_phi(const LambdaVector& lam, const Pmf& r);

// Weighted class averages of phi and its derivatives.
double psi(const LambdaVector& lam, std::span<const DistributionClass> classes);
Pmf grad_psi(const LambdaVector& lam, std::span<const DistributionClass> classes);
Eigen::MatrixXd hess_psi(const LambdaVector& lam, std::span<const DistributionClass> classes);

struct LegendreResult {
  double value = 0.0;
  LambdaVector maximizer{};
  int iterations = 0;
};

// Legendre transform sup_lambda { <lambda, omega'> - psi(lambda) } by damped
// Newton ascent; throws SolverError if the gradient norm does not reach 1e-10
// within 200 iterations. For a single class this equals KL(omega || r).
LegendreResult legendre_transform(const Pmf& omega, std::span<const DistributionClass> classes,
                                  const LambdaVector* warm_start = nullptr);
double legendre_psi(const Pmf& omega, std::span<const DistributionClass> classes);

// Unlabeled error exponent: min of Psi_H1 over { Psi_H0 <= alpha }, solved by
// bisection on the KKT multiplier with Newton inner solves in omega space.
// Returns 0 for alpha >= Psi_H0(p_bar).
double omega_unlabeled(double alpha, std::span<const DistributionClass> p_classes,
                       std::span<const DistributionClass> q_classes);
double omega_unlabeled(double alpha, const HypothesisModel& model);

// Labeled error exponent over the product of per-class simplices; the inner
// minimizers are geometric mixtures of the paired PMFs, so only a scalar
// bisection remains. Returns 0 for alpha >= weighted KL(p||q).
double omega_labeled(double alpha, std::span<const PairedClass> pairs);
double omega_labeled(double alpha, const HypothesisModel& model);

// Sampled exponent curve with its endpoint metadata: the value at the origin
// and the zero-crossing alpha_star beyond which the exponent vanishes.
struct ExponentCurve {
  std::vector<double> alphas;
  std::vector<double> omegas;
  double omega_at_zero = 0.0;
  double alpha_star = 0.0;
};

// Geometric grid from alpha_star/1000 to 1.2*alpha_star, 200 points.
std::vector<double> default_alpha_grid(double alpha_star);

// Pointwise curves; both enforce monotonicity and convexity of the samples.
ExponentCurve exponent_curve(std::span<const DistributionClass> p_classes,
                             std::span<const DistributionClass> q_classes,
                             std::span<const double> alpha_grid = {});
ExponentCurve exponent_curve(const HypothesisModel& model,
                             std::span<const double> alpha_grid = {});
ExponentCurve exponent_curve_labeled(const HypothesisModel& model,
                                     std::span<const double> alpha_grid = {});

// CSV export: alpha, omega_unlabeled, omega_labeled, omega_iid_bound with 12
// significant digits. Curves must share the alpha grid.
void write_curves_csv(std::ostream& out, const ExponentCurve& unlabeled,
                      const ExponentCurve& labeled, const ExponentCurve& iid_bound);

}  // namespace udetect
