#include "lgcp/conditional_gp.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <chrono>

using namespace lgcp;

namespace {

InducingSet make_inducing(std::initializer_list<double> xs) {
  Eigen::MatrixXd locs(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) locs(i++, 0) = x;
  return InducingSet{locs};
}

}  // namespace

TEST_CASE("conditional mean with no inducing points is the prior constant") {
  GPValues values(Eigen::VectorXd(0), 1.5);
  Eigen::MatrixXd query(3, 1);
  query << 0.0, 2.0, 4.0;
  const Eigen::VectorXd m =
      conditional_mean(query, InducingSet{}, values, HyperParams(1.0, 1.0));
  for (Eigen::Index i = 0; i < 3; ++i) CHECK(m[i] == doctest::Approx(1.5));
}

TEST_CASE("conditional mean interpolates the conditioned value") {
  InducingSet inducing = make_inducing({2.0});
  GPValues values(Eigen::VectorXd::Constant(1, 0.8), 0.1);
  Eigen::MatrixXd query(1, 1);
  query << 2.0;
  const Eigen::VectorXd m = conditional_mean(query, inducing, values, HyperParams(1.0, 1.0));
  CHECK(m[0] == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("conditional mean matches an explicit 2x2 solve") {
  InducingSet inducing = make_inducing({0.0, 1.0});
  HyperParams params(1.0, 1.0);
  Eigen::VectorXd g(2);
  g << 0.3, -0.2;
  GPValues values(g, 0.0);
  Eigen::MatrixXd query(1, 1);
  query << 0.5;

  // Direct dense solve, including the base jitter the implementation adds.
  Eigen::MatrixXd kuu = gram(inducing.locations, inducing.locations, params);
  kuu.diagonal().array() += 1e-8;
  const Eigen::VectorXd expected =
      gram(query, inducing.locations, params) * kuu.ldlt().solve(g);

  const Eigen::VectorXd m = conditional_mean(query, inducing, values, params);
  CHECK(m[0] == doctest::Approx(expected[0]).epsilon(1e-9));
}

TEST_CASE("conditional variance without conditioning is h^2") {
  Eigen::MatrixXd query(2, 1);
  query << 0.0, 3.0;
  const Eigen::VectorXd v = conditional_cov_diag(query, InducingSet{}, HyperParams(1.5, 1.0));
  CHECK(v[0] == doctest::Approx(2.25));
  CHECK(v[1] == doctest::Approx(2.25));
}

TEST_CASE("conditional variance vanishes at an inducing point") {
  InducingSet inducing = make_inducing({1.0, 4.0});
  HyperParams params(2.0, 1.5);
  Eigen::MatrixXd query(1, 1);
  query << 4.0;
  const Eigen::VectorXd v = conditional_cov_diag(query, inducing, params);
  CHECK(v[0] >= 0.0);
  CHECK(v[0] <= 1e-6 * 4.0);
}

TEST_CASE("conditioning never increases the variance above h^2") {
  auto gen = test::rng(42);
  Domain domain(0.0, 10.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::uniform_int_distribution<int> ksize(1, 6);
    HyperParams params(0.5 + 2.0 * (rep % 5), 0.3 + 0.2 * (rep % 7));
    InducingSet inducing{test::random_points(domain, ksize(gen), gen)};
    const Eigen::MatrixXd query = test::random_points(domain, 8, gen);
    const Eigen::VectorXd v = conditional_cov_diag(query, inducing, params);
    const double h2 = params.output_scale * params.output_scale;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      CHECK(v[i] >= 0.0);
      CHECK(v[i] <= h2 + 1e-12);
    }
  }
}

TEST_CASE("adding an inducing point never increases conditional variance") {
  auto gen = test::rng(17);
  Domain domain(0.0, 8.0);
  HyperParams params(1.2, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    const Eigen::MatrixXd base = test::random_points(domain, 3, gen);
    Eigen::MatrixXd larger(4, 1);
    larger.topRows(3) = base;
    larger.row(3) = test::random_points(domain, 1, gen);
    const Eigen::MatrixXd query = test::random_points(domain, 10, gen);
    const Eigen::VectorXd before = test::dense_conditional_cov(query, base, params).diagonal();
    const Eigen::VectorXd after = test::dense_conditional_cov(query, larger, params).diagonal();
    for (Eigen::Index i = 0; i < query.rows(); ++i) CHECK(after[i] <= before[i] + 1e-8);
  }
}

TEST_CASE("full conditional covariance is consistent and PSD") {
  auto gen = test::rng(23);
  Domain domain(0.0, 6.0);
  HyperParams params(1.0, 0.9);

  SUBCASE("no conditioning returns the prior gram") {
    const Eigen::MatrixXd query = test::random_points(domain, 4, gen);
    CHECK(conditional_cov_full(query, InducingSet{}, params) == gram(query, query, params));
  }

  SUBCASE("1x1 covariance equals the diagonal") {
    InducingSet inducing{test::random_points(domain, 2, gen)};
    Eigen::MatrixXd query(1, 1);
    query << 3.3;
    const double full = conditional_cov_full(query, inducing, params)(0, 0);
    const double diag = conditional_cov_diag(query, inducing, params)[0];
    CHECK(full == doctest::Approx(diag).epsilon(1e-10));
  }

  SUBCASE("minimum eigenvalue stays above -1e-8") {
    InducingSet inducing{test::random_points(domain, 2, gen)};
    const Eigen::MatrixXd query = test::random_points(domain, 5, gen);
    const Eigen::MatrixXd cov = conditional_cov_full(query, inducing, params);
    CHECK(cov == cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("trace reduction of a point conditioned on itself is h^2") {
  Eigen::MatrixXd s(1, 1);
  s << 2.0;
  const double tr = trace_reduction(s, InducingSet{s}, HyperParams(1.7, 1.0));
  CHECK(tr == doctest::Approx(1.7 * 1.7).epsilon(1e-6));
}

TEST_CASE("trace reduction matches the dense conditional covariance") {
  auto gen = test::rng(31);
  Domain domain(0.0, 5.0);
  for (int rep = 0; rep < 25; ++rep) {
    HyperParams params(0.8 + 0.1 * rep, 0.7);
    const Eigen::MatrixXd data = test::random_points(domain, 6 + rep, gen);
    const InducingSet inducing{test::random_points(domain, 2 + rep % 3, gen)};
    const double n = static_cast<double>(data.rows());
    const double dense_trace =
        n * params.output_scale * params.output_scale -
        test::dense_conditional_cov(data, inducing.locations, params).trace();
    const double fast = trace_reduction(data, inducing, params);
    CHECK(fast == doctest::Approx(dense_trace).epsilon(1e-8));
  }
}

TEST_CASE("trace reduction scales linearly in the number of data points") {
  auto gen = test::rng(77);
  Domain domain(0.0, 100.0);
  HyperParams params(1.0, 5.0);
  const InducingSet inducing{test::random_points(domain, 5, gen)};
  const Eigen::MatrixXd small = test::random_points(domain, 10000, gen);
  const Eigen::MatrixXd large = test::random_points(domain, 20000, gen);

  auto time_of = [&](const Eigen::MatrixXd& data) {
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      volatile double sink = trace_reduction(data, inducing, params);
      (void)sink;
      const auto t1 = std::chrono::steady_clock::now();
      best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    }
    return best;
  };
  const double ratio = time_of(large) / time_of(small);
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.6);
}

TEST_CASE("inducing set validation rejects duplicates and stray points") {
  Domain domain(0.0, 1.0);
  Eigen::MatrixXd dup(2, 1);
  dup << 0.5, 0.5;
  CHECK_THROWS_AS(InducingSet{dup}.validate(domain), InvalidArgumentError);
  Eigen::MatrixXd outside(1, 1);
  outside << 2.0;
  CHECK_THROWS_AS(InducingSet{outside}.validate(domain), InvalidArgumentError);
}
