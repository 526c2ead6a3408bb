#include "udetect/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

#include "udetect/errors.hpp"

namespace udetect {

namespace {

// Tilted weights r(x) e^{lambda(x) - max lambda}, shared by phi and its
// derivatives; returns the shift and the unnormalized weights.
void tilted_weights(const LambdaVector& lam, const Pmf& r, std::vector<double>& w,
                    double& shift, double& total) {
  const int m = r.size();
  shift = 0.0;
  for (int x = 0; x < m; ++x) shift = std::max(shift, lam.at(x));
  w.resize(static_cast<std::size_t>(m));
  total = 0.0;
  for (int x = 0; x < m; ++x) {
    w[static_cast<std::size_t>(x)] = r[x] * std::exp(lam.at(x) - shift);
    total += w[static_cast<std::size_t>(x)];
  }
}

Eigen::VectorXd grad_phi_reduced(const LambdaVector& lam, const Pmf& r) {
  std::vector<double> w;
  double shift, total;
  tilted_weights(lam, r, w, shift, total);
  const int m = r.size();
  Eigen::VectorXd g(m - 1);
  for (int x = 0; x < m - 1; ++x) g[x] = w[static_cast<std::size_t>(x)] / total;
  return g;
}

Eigen::VectorXd grad_psi_reduced(const LambdaVector& lam,
                                 std::span<const DistributionClass> classes) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(classes.front().pmf.size() - 1);
  for (const auto& c : classes) g += c.weight * grad_phi_reduced(lam, c.pmf);
  return g;
}

Pmf extend_to_pmf(const Eigen::VectorXd& reduced) {
  std::vector<double> p(static_cast<std::size_t>(reduced.size()) + 1);
  double sum = 0.0;
  for (int x = 0; x < reduced.size(); ++x) {
    p[static_cast<std::size_t>(x)] = reduced[x];
    sum += reduced[x];
  }
  p.back() = 1.0 - sum;
  return Pmf(std::move(p));
}

Eigen::VectorXd reduce(const Pmf& omega) {
  Eigen::VectorXd v(omega.size() - 1);
  for (int x = 0; x < omega.size() - 1; ++x) v[x] = omega[x];
  return v;
}

}  // namespace

double phi(const LambdaVector& lam, const Pmf& r) {
  if (lam.alphabet_size() != r.size()) throw std::invalid_argument("phi: dimension mismatch");
  std::vector<double> w;
  double shift, total;
  tilted_weights(lam, r, w, shift, total);
  return shift + std::log(total);
}

Pmf grad_phi(const LambdaVector& lam, const Pmf& r) {
  if (lam.alphabet_size() != r.size())
    throw std::invalid_argument("grad_phi: dimension mismatch");
  std::vector<double> w;
  double shift, total;
  tilted_weights(lam, r, w, shift, total);
  for (double& v : w) v /= total;
  return Pmf(std::move(w));
}

Eigen::MatrixXd hess_phi(const LambdaVector& lam, const Pmf& r) {
  if (lam.alphabet_size() != r.size())
    throw std::invalid_argument("hess_phi: dimension mismatch");
  // diag(omega') - omega' omega'^T on the free coordinates
  const Eigen::VectorXd g = grad_phi_reduced(lam, r);
  Eigen::MatrixXd h = -g * g.transpose();
  h.diagonal() += g;
  return h;
}

double psi(const LambdaVector& lam, std::span<const DistributionClass> classes) {
  if (classes.empty()) throw std::invalid_argument("psi: empty class list");
  double s = 0.0;
  for (const auto& c : classes) s += c.weight * phi(lam, c.pmf);
  return s;
}

Pmf grad_psi(const LambdaVector& lam, std::span<const DistributionClass> classes) {
  if (classes.empty()) throw std::invalid_argument("grad_psi: empty class list");
  return extend_to_pmf(grad_psi_reduced(lam, classes));
}

Eigen::MatrixXd hess_psi(const LambdaVector& lam, std::span<const DistributionClass> classes) {
  if (classes.empty()) throw std::invalid_argument("hess_psi: empty class list");
  Eigen::MatrixXd h =
      Eigen::MatrixXd::Zero(classes.front().pmf.size() - 1, classes.front().pmf.size() - 1);
  for (const auto& c : classes) h += c.weight * hess_phi(lam, c.pmf);
  return h;
}

LegendreResult legendre_transform(const Pmf& omega, std::span<const DistributionClass> classes,
                                  const LambdaVector* warm_start) {
  if (classes.empty()) throw std::invalid_argument("legendre_transform: empty class list");
  const int m = omega.size();
  if (classes.front().pmf.size() != m)
    throw std::invalid_argument("legendre_transform: dimension mismatch");

  const Eigen::VectorXd w = reduce(omega);
  LambdaVector lam = warm_start ? *warm_start : LambdaVector(m);
  double obj = w.dot(lam.free) - psi(lam, classes);

  constexpr int kMaxIter = 200;
  constexpr double kTol = 1e-10;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd g = w - grad_psi_reduced(lam, classes);
    if (g.lpNorm<Eigen::Infinity>() < kTol)
      return {obj, std::move(lam), iter};

    const Eigen::MatrixXd h = hess_psi(lam, classes);
    const Eigen::VectorXd d = h.ldlt().solve(g);
    const double slope = g.dot(d);  // > 0: ascent direction for the concave objective

    double step = 1.0;
    LambdaVector cand(m);
    double cand_obj = obj;
    bool accepted = false;
    while (step > 1e-14) {
      cand.free = lam.free + step * d;
      cand_obj = w.dot(cand.free) - psi(cand, classes);
      if (cand_obj > obj && cand_obj >= obj + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // objective improvements are below fp resolution this close to the
      // optimum; take the full Newton step if it still shrinks the gradient
      cand.free = lam.free + d;
      const double g_cand = (w - grad_psi_reduced(cand, classes)).lpNorm<Eigen::Infinity>();
      if (g_cand >= g.lpNorm<Eigen::Infinity>()) break;
      cand_obj = w.dot(cand.free) - psi(cand, classes);
      accepted = true;
    }
    lam.free.swap(cand.free);
    obj = cand_obj;
  }

  const double residual =
      (w - grad_psi_reduced(lam, classes)).lpNorm<Eigen::Infinity>();
  if (residual < kTol) return {obj, std::move(lam), kMaxIter};
  throw SolverError("legendre_transform: Newton did not converge", kMaxIter, residual);
}

double legendre_psi(const Pmf& omega, std::span<const DistributionClass> classes) {
  return legendre_transform(omega, classes).value;
}

namespace {

constexpr double kOmegaFloor = 1e-9;  // feasible search stays in the clamped interior

// Projects a reduced omega proposal back to the clamped interior by shrinking
// the step toward the current (feasible) iterate.
bool feasible(const Eigen::VectorXd& reduced) {
  double sum = 0.0;
  for (int x = 0; x < reduced.size(); ++x) {
    if (reduced[x] < kOmegaFloor) return false;
    sum += reduced[x];
  }
  return 1.0 - sum >= kOmegaFloor;
}

struct ScalarizedSolution {
  Pmf omega;
  double psi1;  // Psi_H1(omega)
  double psi0;  // Psi_H0(omega)
};

// Minimizes Psi_H1 + mu * Psi_H0 over the clamped simplex interior. All
// derivative information comes through the gradient bijection: the Legendre
// maximizer lambda_h(omega) is the gradient of Psi_h, and the inverse Hessian
// of psi_h at that point is the Hessian of Psi_h.
ScalarizedSolution minimize_scalarized(double mu, std::span<const DistributionClass> p_classes,
                                       std::span<const DistributionClass> q_classes,
                                       Pmf omega_init) {
  const int m = omega_init.size();
  Eigen::VectorXd om = reduce(omega_init);
  LambdaVector warm1(m), warm0(m);

  auto evaluate = [&](const Eigen::VectorXd& reduced, LegendreResult& l1, LegendreResult& l0) {
    const Pmf omega = extend_to_pmf(reduced);
    l1 = legendre_transform(omega, p_classes, &warm1);
    l0 = legendre_transform(omega, q_classes, &warm0);
    warm1 = l1.maximizer;
    warm0 = l0.maximizer;
    return omega;
  };

  LegendreResult l1, l0;
  Pmf omega = evaluate(om, l1, l0);
  double value = l1.value + mu * l0.value;

  constexpr int kMaxIter = 100;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd g = l1.maximizer.free + mu * l0.maximizer.free;
    if (g.lpNorm<Eigen::Infinity>() <= 1e-9 * (1.0 + mu))
      return {std::move(omega), l1.value, l0.value};

    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(m - 1, m - 1);
    const Eigen::MatrixXd hinv1 = hess_psi(l1.maximizer, p_classes).ldlt().solve(eye);
    const Eigen::MatrixXd hinv0 = hess_psi(l0.maximizer, q_classes).ldlt().solve(eye);
    const Eigen::MatrixXd h = hinv1 + mu * hinv0;
    const Eigen::VectorXd d = -h.ldlt().solve(g);
    const double slope = g.dot(d);  // < 0

    double step = 1.0;
    bool accepted = false;
    LegendreResult c1, c0;
    while (step > 1e-14) {
      const Eigen::VectorXd cand = om + step * d;
      if (feasible(cand)) {
        Pmf cand_omega = evaluate(cand, c1, c0);
        const double cand_value = c1.value + mu * c0.value;
        if (cand_value < value && cand_value <= value + 1e-4 * step * slope) {
          om = cand;
          omega = std::move(cand_omega);
          l1 = c1;
          l0 = c0;
          value = cand_value;
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      // value improvements are below fp resolution; take the full step when
      // it is feasible and still shrinks the gradient
      const Eigen::VectorXd cand = om + d;
      if (!feasible(cand)) return {std::move(omega), l1.value, l0.value};
      Pmf cand_omega = evaluate(cand, c1, c0);
      const Eigen::VectorXd g_cand = c1.maximizer.free + mu * c0.maximizer.free;
      if (g_cand.lpNorm<Eigen::Infinity>() >= g.lpNorm<Eigen::Infinity>())
        return {std::move(omega), l1.value, l0.value};
      om = cand;
      omega = std::move(cand_omega);
      l1 = c1;
      l0 = c0;
      value = c1.value + mu * c0.value;
    }
  }
  throw SolverError("omega_unlabeled: inner minimization did not converge", kMaxIter,
                    (l1.maximizer.free + mu * l0.maximizer.free).lpNorm<Eigen::Infinity>());
}

}  // namespace

double omega_unlabeled(double alpha, std::span<const DistributionClass> p_classes,
                       std::span<const DistributionClass> q_classes) {
  if (!(alpha > 0.0)) throw std::invalid_argument("omega_unlabeled: alpha must be positive");
  const Pmf p_bar = average_pmf(p_classes);
  const double alpha_star = legendre_psi(p_bar, q_classes);
  if (alpha >= alpha_star) return 0.0;

  // Bisection on the multiplier. The constraint residual Psi_H0 - alpha is
  // nonincreasing in mu; the dual value Psi_H1 + mu * residual is reported,
  // which is accurate to second order in the final residual.
  Pmf omega = p_bar;
  auto eval = [&](double mu) {
    ScalarizedSolution s = minimize_scalarized(mu, p_classes, q_classes, omega);
    omega = s.omega;
    return s;
  };

  double mu_lo = 0.0;
  double mu_hi = 1.0;
  ScalarizedSolution sol = eval(mu_hi);
  int doublings = 0;
  while (sol.psi0 > alpha) {
    mu_lo = mu_hi;
    mu_hi *= 2.0;
    if (++doublings > 80)
      throw SolverError("omega_unlabeled: multiplier bracket not found", doublings,
                        sol.psi0 - alpha);
    sol = eval(mu_hi);
  }

  double mu = mu_hi;
  double residual = sol.psi0 - alpha;
  for (int iter = 0; iter < 300 && std::abs(residual) >= 1e-8 && mu_hi - mu_lo >= 1e-10;
       ++iter) {
    mu = 0.5 * (mu_lo + mu_hi);
    sol = eval(mu);
    residual = sol.psi0 - alpha;
    (residual > 0.0 ? mu_lo : mu_hi) = mu;
  }
  return std::max(sol.psi1 + mu * residual, 0.0);
}

double omega_unlabeled(double alpha, const HypothesisModel& model) {
  return omega_unlabeled(alpha, model.h1_classes(), model.h0_classes());
}

namespace {

// Geometric mixture p^{1-s} q^s, the per-class minimizer of
// D(. || p) + mu D(. || q) with s = mu / (1 + mu).
Pmf geometric_mixture(const Pmf& p, const Pmf& q, double s) {
  std::vector<double> v(static_cast<std::size_t>(p.size()));
  for (int x = 0; x < p.size(); ++x)
    v[static_cast<std::size_t>(x)] =
        std::exp((1.0 - s) * std::log(p[x]) + s * std::log(q[x]));
  return Pmf(std::move(v));
}

}  // namespace

double omega_labeled(double alpha, std::span<const PairedClass> pairs) {
  if (!(alpha > 0.0)) throw std::invalid_argument("omega_labeled: alpha must be positive");
  if (pairs.empty()) throw std::invalid_argument("omega_labeled: empty class list");

  double d_pq = 0.0;
  for (const auto& c : pairs) d_pq += c.weight * kl_divergence(c.p, c.q);
  if (alpha >= d_pq) return 0.0;

  auto constraint = [&](double s, double& value_p) {
    double to_q = 0.0;
    value_p = 0.0;
    for (const auto& c : pairs) {
      const Pmf w = geometric_mixture(c.p, c.q, s);
      to_q += c.weight * kl_divergence(w, c.q);
      value_p += c.weight * kl_divergence(w, c.p);
    }
    return to_q - alpha;
  };

  double lo = 0.0, hi = 1.0;  // residual positive at lo, negative at hi
  double s = 0.5, value_p = 0.0, residual = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    s = 0.5 * (lo + hi);
    residual = constraint(s, value_p);
    if (std::abs(residual) < 1e-12 || hi - lo < 1e-15) break;
    (residual > 0.0 ? lo : hi) = s;
  }
  const double mu = s / (1.0 - s);
  return std::max(value_p + mu * residual, 0.0);
}

double omega_labeled(double alpha, const HypothesisModel& model) {
  const auto pairs = refine_classes(model.h1_classes(), model.h0_classes());
  return omega_labeled(alpha, pairs);
}

std::vector<double> default_alpha_grid(double alpha_star) {
  constexpr int kPoints = 200;
  const double lo = alpha_star / 1000.0;
  const double hi = 1.2 * alpha_star;
  const double ratio = std::pow(hi / lo, 1.0 / (kPoints - 1));
  std::vector<double> grid(kPoints);
  double a = lo;
  for (int i = 0; i < kPoints; ++i, a *= ratio) grid[static_cast<std::size_t>(i)] = a;
  grid.back() = hi;
  return grid;
}

namespace {

void validate_curve(const ExponentCurve& curve) {
  for (std::size_t i = 0; i + 1 < curve.omegas.size(); ++i) {
    if (curve.omegas[i + 1] > curve.omegas[i] + 1e-10)
      throw SolverError("exponent_curve: samples are not nonincreasing at index " +
                        std::to_string(i));
  }
  for (std::size_t i = 0; i < curve.omegas.size(); ++i) {
    if (curve.alphas[i] >= curve.alpha_star && curve.omegas[i] > 1e-10)
      throw SolverError("exponent_curve: nonzero sample beyond alpha_star at index " +
                        std::to_string(i));
  }
  // convexity as nondecreasing divided differences (the grid may be geometric)
  double prev_slope = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < curve.omegas.size(); ++i) {
    const double slope =
        (curve.omegas[i + 1] - curve.omegas[i]) / (curve.alphas[i + 1] - curve.alphas[i]);
    if (slope < prev_slope - 1e-8)
      throw SolverError("exponent_curve: convexity violated at index " + std::to_string(i));
    prev_slope = slope;
  }
}

template <typename PointFn>
ExponentCurve build_curve(double omega_at_zero, double alpha_star,
                          std::span<const double> alpha_grid, PointFn&& point) {
  ExponentCurve curve;
  curve.omega_at_zero = omega_at_zero;
  curve.alpha_star = alpha_star;
  if (alpha_grid.empty()) {
    curve.alphas = default_alpha_grid(alpha_star);
  } else {
    curve.alphas.assign(alpha_grid.begin(), alpha_grid.end());
  }
  curve.omegas.reserve(curve.alphas.size());
  for (double a : curve.alphas) {
    if (!(a > 0.0)) throw std::invalid_argument("exponent_curve: grid values must be positive");
    curve.omegas.push_back(point(a));
  }
  validate_curve(curve);
  return curve;
}

}  // namespace

ExponentCurve exponent_curve(std::span<const DistributionClass> p_classes,
                             std::span<const DistributionClass> q_classes,
                             std::span<const double> alpha_grid) {
  const double omega0 = legendre_psi(average_pmf(q_classes), p_classes);
  const double alpha_star = legendre_psi(average_pmf(p_classes), q_classes);
  return build_curve(omega0, alpha_star, alpha_grid,
                     [&](double a) { return omega_unlabeled(a, p_classes, q_classes); });
}

ExponentCurve exponent_curve(const HypothesisModel& model, std::span<const double> alpha_grid) {
  return exponent_curve(model.h1_classes(), model.h0_classes(), alpha_grid);
}

ExponentCurve exponent_curve_labeled(const HypothesisModel& model,
                                     std::span<const double> alpha_grid) {
  const auto pairs = refine_classes(model.h1_classes(), model.h0_classes());
  double omega0 = 0.0, alpha_star = 0.0;
  for (const auto& c : pairs) {
    omega0 += c.weight * kl_divergence(c.q, c.p);
    alpha_star += c.weight * kl_divergence(c.p, c.q);
  }
  return build_curve(omega0, alpha_star, alpha_grid,
                     [&](double a) { return omega_labeled(a, pairs); });
}

void write_curves_csv(std::ostream& out, const ExponentCurve& unlabeled,
                      const ExponentCurve& labeled, const ExponentCurve& iid_bound) {
  if (unlabeled.alphas != labeled.alphas || unlabeled.alphas != iid_bound.alphas)
    throw std::invalid_argument("write_curves_csv: curves sampled on different grids");
  out << "alpha,omega_unlabeled,omega_labeled,omega_iid_bound\n";
  char buf[256];
  for (std::size_t i = 0; i < unlabeled.alphas.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g\n", unlabeled.alphas[i],
                  unlabeled.omegas[i], labeled.omegas[i], iid_bound.omegas[i]);
    out << buf;
  }
}

}  // namespace udetect
