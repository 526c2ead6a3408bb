#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "test_util.hpp"
#include "udetect/exponents.hpp"

using namespace udetect;
using udetect::testing::random_classes;
using udetect::testing::random_pmf;

namespace {

LambdaVector random_lambda(Rng& rng, int m, double scale = 2.0) {
  Eigen::VectorXd free(m - 1);
  for (int i = 0; i < m - 1; ++i) free[i] = scale * (2.0 * rng.next_double() - 1.0);
  return LambdaVector(std::move(free));
}

// Central finite differences of a scalar function of the free coordinates.
template <typename Fn>
Eigen::VectorXd fd_gradient(const LambdaVector& lam, Fn&& fn, double step = 1e-5) {
  const int d = static_cast<int>(lam.free.size());
  Eigen::VectorXd g(d);
  for (int i = 0; i < d; ++i) {
    LambdaVector hi = lam, lo = lam;
    hi.free[i] += step;
    lo.free[i] -= step;
    g[i] = (fn(hi) - fn(lo)) / (2.0 * step);
  }
  return g;
}

// 1-D golden-section maximization for the scalar-lambda Legendre oracle.
template <typename Fn>
double golden_max(Fn&& fn, double lo, double hi, double tol = 1e-11) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = fn(c), fd = fn(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return fn(0.5 * (a + b));
}

std::vector<DistributionClass> single(const Pmf& p) { return {{p, 1.0}}; }

}  // namespace

TEST_CASE("phi at the origin") {
  Rng rng(71);
  for (int rep = 0; rep < 20; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(5));
    const Pmf r = random_pmf(rng, m);
    const LambdaVector zero(m);
    CHECK(phi(zero, r) == doctest::Approx(0.0));
    const Pmf g = grad_phi(zero, r);
    for (int x = 0; x < m; ++x) CHECK(g[x] == doctest::Approx(r[x]).epsilon(1e-12));
  }
}

TEST_CASE("phi gradient and hessian match finite differences") {
  Rng rng(73);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(4));
    const Pmf r = random_pmf(rng, m);
    const LambdaVector lam = random_lambda(rng, m);

    const Eigen::VectorXd fd = fd_gradient(lam, [&](const LambdaVector& l) { return phi(l, r); });
    const Pmf g = grad_phi(lam, r);
    for (int i = 0; i < m - 1; ++i)
      CHECK(g[i] == doctest::Approx(fd[i]).epsilon(1e-6));

    const Eigen::MatrixXd h = hess_phi(lam, r);
    for (int i = 0; i < m - 1; ++i) {
      const Eigen::VectorXd fd_row = fd_gradient(lam, [&](const LambdaVector& l) {
        const Pmf gl = grad_phi(l, r);
        return gl[i];
      });
      for (int j = 0; j < m - 1; ++j)
        CHECK(h(i, j) == doctest::Approx(fd_row[j]).epsilon(1e-5));
    }
  }
}

TEST_CASE("phi hessian is symmetric positive definite") {
  Rng rng(79);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(5));
    const Eigen::MatrixXd h = hess_phi(random_lambda(rng, m), random_pmf(rng, m));
    CHECK((h - h.transpose()).norm() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("psi averages phi over the classes") {
  Rng rng(83);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(4));
    const auto classes = random_classes(rng, m, 1 + static_cast<int>(rng.next_below(3)));
    const LambdaVector zero(m);
    CHECK(psi(zero, classes) == doctest::Approx(0.0));
    const Pmf g0 = grad_psi(zero, classes);
    const Pmf rbar = average_pmf(classes);
    for (int x = 0; x < m; ++x) CHECK(g0[x] == doctest::Approx(rbar[x]).epsilon(1e-12));

    const LambdaVector lam = random_lambda(rng, m);
    if (classes.size() == 1) CHECK(psi(lam, classes) == doctest::Approx(phi(lam, classes[0].pmf)));
    const Eigen::VectorXd fd =
        fd_gradient(lam, [&](const LambdaVector& l) { return psi(l, classes); });
    const Pmf g = grad_psi(lam, classes);
    for (int i = 0; i < m - 1; ++i) CHECK(g[i] == doctest::Approx(fd[i]).epsilon(1e-6));
  }
}

TEST_CASE("legendre transform vanishes only at the averaged pmf") {
  Rng rng(89);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(4));
    const auto classes = random_classes(rng, m, 2);
    const Pmf rbar = average_pmf(classes);
    CHECK(legendre_psi(rbar, classes) == doctest::Approx(0.0).epsilon(1e-12));

    const Pmf omega = random_pmf(rng, m);
    const double v = legendre_psi(omega, classes);
    CHECK(v >= -1e-12);
    double linf = 0.0;
    for (int x = 0; x < m; ++x) linf = std::max(linf, std::abs(omega[x] - rbar[x]));
    if (linf > 1e-3) CHECK(v > 0.0);
  }
}

TEST_CASE("single-class legendre transform is the KL divergence") {
  Rng rng(97);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(5));
    const Pmf rbar = random_pmf(rng, m);
    const Pmf omega = random_pmf(rng, m);
    const auto classes = single(rbar);

    const LegendreResult res = legendre_transform(omega, classes);
    CHECK(res.value == doctest::Approx(kl_divergence(omega, rbar)).epsilon(1e-9));

    // the maximizer has the closed form log(omega(x) rbar(m-1) / (rbar(x) omega(m-1)))
    for (int x = 0; x < m - 1; ++x) {
      const double expected = std::log(omega[x] * rbar[m - 1] / (rbar[x] * omega[m - 1]));
      CHECK(res.maximizer.free[x] == doctest::Approx(expected).epsilon(1e-7));
    }

    // duality round trip: grad psi at the maximizer recovers omega
    const Pmf back = grad_psi(res.maximizer, classes);
    for (int x = 0; x < m; ++x) CHECK(back[x] == doctest::Approx(omega[x]).epsilon(1e-8));
  }
}

TEST_CASE("two-class binary legendre transform matches golden-section search") {
  Rng rng(101);
  for (int rep = 0; rep < 100; ++rep) {
    const auto classes = random_classes(rng, 2, 2);
    const Pmf omega = random_pmf(rng, 2);
    const double newton = legendre_psi(omega, classes);
    const double oracle = golden_max(
        [&](double l) {
          LambdaVector lam(2);
          lam.free[0] = l;
          return l * omega[0] - psi(lam, classes);
        },
        -80.0, 80.0);
    CHECK(newton == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("legendre transform is strictly convex in omega") {
  Rng rng(103);
  for (int rep = 0; rep < 50; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(3));
    const auto classes = random_classes(rng, m, 2);
    const Pmf a = random_pmf(rng, m);
    const Pmf b = random_pmf(rng, m);
    std::vector<double> mid(static_cast<std::size_t>(m));
    double linf = 0.0;
    for (int x = 0; x < m; ++x) {
      mid[static_cast<std::size_t>(x)] = 0.5 * (a[x] + b[x]);
      linf = std::max(linf, std::abs(a[x] - b[x]));
    }
    const double lhs = legendre_psi(Pmf(std::move(mid)), classes);
    const double rhs = 0.5 * legendre_psi(a, classes) + 0.5 * legendre_psi(b, classes);
    CHECK(lhs <= rhs + 1e-12);
    if (linf > 1e-3) CHECK(lhs < rhs);
  }
}

namespace {

// Independent oracle for the iid binary exponent: feasibility scan over a
// scalar-omega grid plus bisection onto the constraint boundary.
double iid_binary_exponent_oracle(double alpha, const Pmf& p_bar, const Pmf& q_bar) {
  auto d_to = [](double w, const Pmf& r) {
    return w * std::log(w / r[0]) + (1.0 - w) * std::log((1.0 - w) / r[1]);
  };
  double best = std::numeric_limits<double>::infinity();
  const double step = 1e-3;
  double prev_w = step;
  bool prev_feasible = d_to(prev_w, q_bar) <= alpha;
  if (prev_feasible) best = std::min(best, d_to(prev_w, p_bar));
  for (double w = 2 * step; w < 1.0; w += step) {
    const bool feasible = d_to(w, q_bar) <= alpha;
    if (feasible) best = std::min(best, d_to(w, p_bar));
    if (feasible != prev_feasible) {
      // refine the boundary crossing and include its objective value
      double lo = prev_w, hi = w;
      for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((d_to(mid, q_bar) <= alpha) == prev_feasible)
          lo = mid;
        else
          hi = mid;
      }
      best = std::min(best, d_to(0.5 * (lo + hi), p_bar));
    }
    prev_feasible = feasible;
    prev_w = w;
  }
  return best;
}

}  // namespace

TEST_CASE("iid unlabeled exponent matches the grid oracle") {
  const Pmf p_bar({0.2, 0.8});
  const Pmf q_bar({0.5, 0.5});
  const auto p_classes = single(p_bar);
  const auto q_classes = single(q_bar);

  const double alpha_star = kl_divergence(p_bar, q_bar);
  CHECK(omega_unlabeled(alpha_star * 1.000001, p_classes, q_classes) == 0.0);
  CHECK(omega_unlabeled(alpha_star * 2, p_classes, q_classes) == 0.0);

  for (double frac : {0.15, 0.4, 0.7, 0.95}) {
    const double alpha = frac * alpha_star;
    const double got = omega_unlabeled(alpha, p_classes, q_classes);
    const double oracle = iid_binary_exponent_oracle(alpha, p_bar, q_bar);
    CHECK(got == doctest::Approx(oracle).epsilon(1e-4));
  }
}

TEST_CASE("two-class binary exponent matches an omega-scan oracle") {
  // independent route: scan the scalar omega, evaluating both Legendre
  // transforms by golden section, and refine the constraint boundary
  Rng rng(131);
  for (int rep = 0; rep < 5; ++rep) {
    const auto p = random_classes(rng, 2, 2);
    const auto q = random_classes(rng, 2, 2);

    auto legendre_1d = [&](double w, std::span<const DistributionClass> classes) {
      const Pmf omega({w, 1.0 - w});
      return golden_max(
          [&](double l) {
            LambdaVector lam(2);
            lam.free[0] = l;
            return l * omega[0] - psi(lam, classes);
          },
          -80.0, 80.0);
    };
    const double alpha_star = legendre_psi(average_pmf(p), q);

    for (double frac : {0.25, 0.6}) {
      const double alpha = frac * alpha_star;
      double best = std::numeric_limits<double>::infinity();
      const double step = 2e-3;
      bool prev_feasible = legendre_1d(step, q) <= alpha;
      if (prev_feasible) best = legendre_1d(step, p);
      for (double w = 2 * step; w < 1.0; w += step) {
        const bool feasible = legendre_1d(w, q) <= alpha;
        if (feasible) best = std::min(best, legendre_1d(w, p));
        if (feasible != prev_feasible) {
          double lo = w - step, hi = w;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((legendre_1d(mid, q) <= alpha) == prev_feasible)
              lo = mid;
            else
              hi = mid;
          }
          best = std::min(best, legendre_1d(0.5 * (lo + hi), p));
          prev_feasible = feasible;
        }
      }
      CHECK(omega_unlabeled(alpha, p, q) == doctest::Approx(best).epsilon(1e-5));
    }
  }
}

TEST_CASE("labeled exponent endpoints") {
  Rng rng(107);
  for (int rep = 0; rep < 20; ++rep) {
    const HypothesisModel model(2, random_classes(rng, 2, 2), random_classes(rng, 2, 2));
    const auto pairs = refine_classes(model.h1_classes(), model.h0_classes());
    double d_pq = 0.0, d_qp = 0.0;
    for (const auto& c : pairs) {
      d_pq += c.weight * kl_divergence(c.p, c.q);
      d_qp += c.weight * kl_divergence(c.q, c.p);
    }
    CHECK(omega_labeled(d_pq, model) == 0.0);
    CHECK(omega_labeled(d_pq * 1.5, model) == 0.0);
    const double near_zero = omega_labeled(1e-9 * d_pq, model);
    CHECK(near_zero <= d_qp + 1e-12);
    CHECK(near_zero >= d_qp - 0.01);
  }
}

TEST_CASE("iid models have equal labeled and unlabeled exponents") {
  Rng rng(109);
  for (int rep = 0; rep < 10; ++rep) {
    const int m = 2 + static_cast<int>(rng.next_below(3));
    const HypothesisModel model(m, {{random_pmf(rng, m), 1.0}}, {{random_pmf(rng, m), 1.0}});
    const double alpha_star = legendre_psi(model.p_bar(), model.h0_classes());
    for (double frac : {0.1, 0.3, 0.6, 0.9}) {
      const double alpha = frac * alpha_star;
      CHECK(omega_unlabeled(alpha, model) ==
            doctest::Approx(omega_labeled(alpha, model)).epsilon(1e-6));
    }
  }
}

namespace {

HypothesisModel half_and_half(double p1, double p2, double q1, double q2) {
  return HypothesisModel(2, {{Pmf({p1, 1 - p1}), 0.5}, {Pmf({p2, 1 - p2}), 0.5}},
                         {{Pmf({q1, 1 - q1}), 0.5}, {Pmf({q2, 1 - q2}), 0.5}});
}

}  // namespace

TEST_CASE("label-free family: unlabeled curve equals the labeled curve") {
  // p1 + q2 = p2 + q1 = 1 makes the labeled likelihood ratio a type function
  Rng rng(113);
  for (int rep = 0; rep < 5; ++rep) {
    const double p1 = 0.15 + 0.7 * rng.next_double();
    const double p2 = 0.15 + 0.7 * rng.next_double();
    const HypothesisModel model = half_and_half(p1, p2, 1 - p2, 1 - p1);
    const ExponentCurve lab = exponent_curve_labeled(model);
    const ExponentCurve unlab = exponent_curve(model, lab.alphas);
    for (std::size_t i = 0; i < lab.alphas.size(); ++i)
      CHECK(unlab.omegas[i] == doctest::Approx(lab.omegas[i]).epsilon(1e-6));
  }
}

TEST_CASE("exponent curve endpoints and the four bounds") {
  Rng rng(127);
  for (int rep = 0; rep < 10; ++rep) {
    const HypothesisModel model(2, random_classes(rng, 2, 2), random_classes(rng, 2, 2));
    const auto& p = model.h1_classes();
    const auto& q = model.h0_classes();
    const auto pbar = single(model.p_bar());
    const auto qbar = single(model.q_bar());

    const ExponentCurve curve = exponent_curve(model);
    CHECK(curve.omega_at_zero ==
          doctest::Approx(legendre_psi(model.q_bar(), p)).epsilon(1e-12));
    CHECK(curve.alpha_star == doctest::Approx(legendre_psi(model.p_bar(), q)).epsilon(1e-12));
    for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
      CHECK(curve.omegas[i] <= curve.omega_at_zero + 1e-9);
      if (curve.alphas[i] >= curve.alpha_star) CHECK(curve.omegas[i] == 0.0);
    }

    for (double frac : {0.2, 0.5, 0.8}) {
      const double alpha = frac * curve.alpha_star;
      const double full = omega_unlabeled(alpha, p, q);
      const double lab = omega_labeled(alpha, model);
      const double bound_pq = omega_unlabeled(alpha, pbar, qbar);
      const double bound_p = omega_unlabeled(alpha, pbar, q);
      const double bound_q = omega_unlabeled(alpha, p, qbar);
      CHECK(full <= lab + 1e-8);
      CHECK(full >= bound_p - 1e-8);
      CHECK(full >= bound_q - 1e-8);
      CHECK(full >= bound_pq - 1e-8);
    }
  }
}

TEST_CASE("default grid covers the zero tail") {
  const auto grid = default_alpha_grid(0.5);
  CHECK(grid.size() == 200);
  CHECK(grid.front() == doctest::Approx(0.0005));
  CHECK(grid.back() == doctest::Approx(0.6));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
}
