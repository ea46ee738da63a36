#include "lgcp/kernel.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace lgcp;

TEST_CASE("kernel at zero distance gives the squared output scale") {
  HyperParams params(2.0, 1.0);
  const Eigen::VectorXd s = test::point1(0.7);
  CHECK(kernel_eval(s, s, params) == doctest::Approx(4.0));
}

TEST_CASE("kernel at one length scale of separation") {
  HyperParams params(1.0, 0.35);
  CHECK(kernel_eval(test::point1(0.0), test::point1(0.35), params) ==
        doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("kernel rejects dimension mismatch") {
  HyperParams params(1.0, Eigen::VectorXd::Ones(2));
  CHECK_THROWS_AS(kernel_eval(test::point1(0.0), test::point1(1.0), params), InvalidArgumentError);
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  CHECK_THROWS_AS(gram(x, x, params), InvalidArgumentError);
}

TEST_CASE("kernel symmetry and bounds on random pairs") {
  auto gen = test::rng(11);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  HyperParams params(1.7, Eigen::VectorXd::Constant(3, 0.9));
  for (int rep = 0; rep < 200; ++rep) {
    Eigen::VectorXd a(3), b(3);
    for (int j = 0; j < 3; ++j) {
      a[j] = u(gen);
      b[j] = u(gen);
    }
    const double kab = kernel_eval(a, b, params);
    CHECK(kab == kernel_eval(b, a, params));
    CHECK(kab > 0.0);
    CHECK(kab <= params.output_scale * params.output_scale);
  }
}

TEST_CASE("kernel decays monotonically with distance") {
  HyperParams params(1.3, 2.0);
  double prev = kernel_eval(test::point1(0.0), test::point1(0.0), params);
  for (double r = 0.5; r < 10.0; r += 0.5) {
    const double cur = kernel_eval(test::point1(0.0), test::point1(r), params);
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("3-point gram matrix is positive semi-definite") {
  Eigen::MatrixXd x(3, 1);
  x << 0.0, 0.5, 1.0;
  const Eigen::MatrixXd g = gram(x, x, HyperParams(1.0, 0.7));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
}

TEST_CASE("single-point gram is [h^2]") {
  Eigen::MatrixXd x(1, 1);
  x << 0.3;
  const Eigen::MatrixXd g = gram(x, x, HyperParams(2.5, 1.0));
  REQUIRE(g.rows() == 1);
  CHECK(g(0, 0) == doctest::Approx(6.25));
}

TEST_CASE("gram of two lists transposes exactly") {
  auto gen = test::rng(7);
  Domain domain(Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 3.0));
  const Eigen::MatrixXd x = test::random_points(domain, 4, gen);
  const Eigen::MatrixXd y = test::random_points(domain, 3, gen);
  HyperParams params(1.0, Eigen::VectorXd::Constant(2, 0.8));
  CHECK(gram(x, y, params) == gram(y, x, params).transpose());
}

TEST_CASE("gram PSD up to tolerance for random distinct points") {
  auto gen = test::rng(21);
  Domain domain(0.0, 10.0);
  HyperParams params(1.0, 0.5);
  const Eigen::MatrixXd x = test::random_points(domain, 30, gen);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram(x, x, params));
  CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("jittered cholesky factorizes 50 random points") {
  auto gen = test::rng(3);
  Domain domain(0.0, 5.0);
  HyperParams params(1.4, 0.6);
  const Eigen::MatrixXd x = test::random_points(domain, 50, gen);
  const auto chol = jittered_cholesky(gram(x, x, params), params.output_scale * params.output_scale);
  CHECK(chol.jitter >= 1e-8 * params.output_scale * params.output_scale);
  CHECK(chol.lower.diagonal().minCoeff() > 0.0);
}

TEST_CASE("jittered cholesky escalates and eventually reports conditioning failure") {
  // Indefinite matrix: eigenvalues 3 and -1; no jitter within the ladder fixes it.
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(jittered_cholesky(bad, 1.0), ConditioningError);

  // Exactly duplicated points survive through jitter.
  Eigen::MatrixXd dup(2, 1);
  dup << 1.0, 1.0;
  HyperParams params(1.0, 1.0);
  const auto chol = jittered_cholesky(gram(dup, dup, params), 1.0);
  CHECK(chol.lower.allFinite());
}

TEST_CASE("hyperparameter draws stay strictly inside the support") {
  auto gen = test::rng(5);
  HyperPrior prior(10.0, Eigen::VectorXd::Constant(2, 25.0));
  for (int rep = 0; rep < 2000; ++rep) {
    const HyperParams p = sample_hyper(prior, gen);
    CHECK(p.output_scale > 0.0);
    CHECK(p.output_scale < 10.0);
    for (int j = 0; j < 2; ++j) {
      CHECK(p.input_scales[j] > 0.0);
      CHECK(p.input_scales[j] < 25.0);
    }
  }
}

TEST_CASE("median of scaled-sigmoid draws sits at half the bound") {
  auto gen = test::rng(99);
  HyperPrior prior(8.0, 30.0);
  const int n = 100000;
  std::vector<double> h(n), l(n);
  for (int i = 0; i < n; ++i) {
    const HyperParams p = sample_hyper(prior, gen);
    h[i] = p.output_scale;
    l[i] = p.input_scales[0];
  }
  std::nth_element(h.begin(), h.begin() + n / 2, h.end());
  std::nth_element(l.begin(), l.begin() + n / 2, l.end());
  CHECK(h[n / 2] == doctest::Approx(4.0).epsilon(0.02));
  CHECK(l[n / 2] == doctest::Approx(15.0).epsilon(0.02));
}

TEST_CASE("hyperprior log density at the midpoint") {
  const double h_max = 6.0, l_max = 20.0;
  HyperPrior prior(h_max, l_max);
  HyperParams mid(h_max / 2.0, l_max / 2.0);
  const double log_phi0 = -0.5 * std::log(2.0 * M_PI);
  const double expected =
      (log_phi0 - std::log(h_max / 4.0)) + (log_phi0 - std::log(l_max / 4.0));
  CHECK(log_hyper_prior_density(mid, prior) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("hyperprior density vanishes at the bounds") {
  HyperPrior prior(6.0, 20.0);
  CHECK(log_hyper_prior_density(HyperParams(6.0, 10.0), prior) ==
        -std::numeric_limits<double>::infinity());
  CHECK(log_hyper_prior_density(HyperParams(3.0, 20.0), prior) ==
        -std::numeric_limits<double>::infinity());
  // Approaching the bound from inside the density also dives.
  CHECK(log_hyper_prior_density(HyperParams(6.0 - 1e-13, 10.0), prior) < -20.0);
}

TEST_CASE("hyperprior density integrates to one per component") {
  const double theta_max = 7.0;
  HyperPrior prior(theta_max, theta_max);

  // One-component density extracted by holding the other coordinate fixed.
  const double fixed = theta_max / 2.0;
  const double log_fixed_component =
      -0.5 * std::log(2.0 * M_PI) - std::log(theta_max / 4.0);

  const int cells = 10000;
  double integral = 0.0;
  for (int i = 0; i <= cells; ++i) {
    const double theta = theta_max * static_cast<double>(i) / cells;
    double value = 0.0;
    if (i > 0 && i < cells)
      value = std::exp(log_hyper_prior_density(HyperParams(theta, fixed), prior) -
                       log_fixed_component);
    integral += (i == 0 || i == cells ? 0.5 : 1.0) * value;
  }
  integral *= theta_max / cells;
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}
