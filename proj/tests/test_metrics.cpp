#include "lgcp/metrics.hpp"

#include "test_helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace lgcp;

namespace {

Eigen::MatrixXd uniform_grid(double lo, double hi, Eigen::Index m) {
  Eigen::MatrixXd g(m, 1);
  for (Eigen::Index i = 0; i < m; ++i)
    g(i, 0) = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(m - 1);
  return g;
}

IntensityEstimate estimate_from(const IntensitySpec& truth, Eigen::Index m,
                                double offset = 0.0, double factor = 1.0) {
  IntensityEstimate est;
  est.locations = uniform_grid(truth.domain.lower[0], truth.domain.upper[0], m);
  est.intensity_mean.resize(m);
  for (Eigen::Index i = 0; i < m; ++i)
    est.intensity_mean[i] = factor * truth.eval(est.locations.row(i).transpose()) + offset;
  est.log_mean = est.intensity_mean.array().max(1e-300).log();
  est.log_var = Eigen::VectorXd::Zero(m);
  return est;
}

EventDataset events_at(std::initializer_list<double> xs, const Domain& domain) {
  EventDataset d;
  d.domain = domain;
  d.points.resize(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs) d.points(i++, 0) = x;
  return d;
}

}  // namespace

TEST_CASE("exact estimate has zero error") {
  const IntensitySpec truth = IntensitySpec::synthetic_bimodal();
  const auto [mae, rmse] = normalized_errors(estimate_from(truth, 200), truth);
  CHECK(mae == doctest::Approx(0.0));
  CHECK(rmse == doctest::Approx(0.0));
}

TEST_CASE("a constant offset of one mean-truth normalizes to one") {
  const IntensitySpec truth = IntensitySpec::synthetic_bimodal();
  // mean of the truth over the evaluation grid
  const IntensityEstimate exact = estimate_from(truth, 400);
  double mean_truth = 0.0;
  for (Eigen::Index i = 0; i < exact.size(); ++i)
    mean_truth += truth.eval(exact.locations.row(i).transpose());
  mean_truth /= static_cast<double>(exact.size());

  const auto [mae, rmse] = normalized_errors(estimate_from(truth, 400, mean_truth), truth);
  CHECK(mae == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rmse == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("doubling the intensity gives MAE one and the second-moment RMSE") {
  const IntensitySpec truth = IntensitySpec::synthetic_bimodal();
  const Eigen::Index m = 400;
  const auto [mae, rmse] = normalized_errors(estimate_from(truth, m, 0.0, 2.0), truth);
  CHECK(mae == doctest::Approx(1.0).epsilon(1e-12));

  const Eigen::MatrixXd grid = uniform_grid(0.0, 50.0, m);
  double mean = 0.0, meansq = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double v = truth.eval(grid.row(i).transpose());
    mean += v;
    meansq += v * v;
  }
  mean /= static_cast<double>(m);
  meansq /= static_cast<double>(m);
  CHECK(rmse == doctest::Approx(std::sqrt(meansq) / mean).epsilon(1e-12));
}

TEST_CASE("MAE never exceeds RMSE") {
  auto gen = test::rng(3);
  const IntensitySpec truth = IntensitySpec::synthetic_bimodal();
  std::normal_distribution<double> noise(0.0, 0.4);
  for (int rep = 0; rep < 20; ++rep) {
    IntensityEstimate est = estimate_from(truth, 150);
    for (Eigen::Index i = 0; i < est.size(); ++i)
      est.intensity_mean[i] = std::max(0.0, est.intensity_mean[i] + noise(gen));
    const auto [mae, rmse] = normalized_errors(est, truth);
    CHECK(mae <= rmse + 1e-12);
  }
}

TEST_CASE("log predictive of simple plug-in intensities") {
  const Domain unit(0.0, 1.0);
  const IntensitySpec one = IntensitySpec::constant_rate(1.0, unit);

  SUBCASE("unit intensity with one event") {
    const auto [mean, sd] =
        log_predictive(estimate_from(one, 600), {events_at({0.4}, unit)}, unit);
    CHECK(mean == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(sd == 0.0);
  }
  SUBCASE("intensity two with an empty draw") {
    const IntensitySpec two = IntensitySpec::constant_rate(2.0, unit);
    const auto [mean, sd] = log_predictive(estimate_from(two, 600), {events_at({}, unit)}, unit);
    CHECK(mean == doctest::Approx(-2.0).epsilon(1e-9));
    CHECK(sd == 0.0);
  }
}

TEST_CASE("log predictive ignores event order and stabilizes under refinement") {
  const IntensitySpec truth = IntensitySpec::synthetic_bimodal();
  const Domain& domain = truth.domain;
  const EventDataset fwd = events_at({5.0, 12.0, 25.0, 33.0, 44.0}, domain);
  const EventDataset rev = events_at({44.0, 33.0, 25.0, 12.0, 5.0}, domain);

  const auto [m1, s1] = log_predictive(estimate_from(truth, 600), {fwd}, domain);
  const auto [m2, s2] = log_predictive(estimate_from(truth, 600), {rev}, domain);
  CHECK(m1 == doctest::Approx(m2).epsilon(1e-14));

  const auto [m3, s3] = log_predictive(estimate_from(truth, 1200), {fwd}, domain);
  CHECK(std::abs(m1 - m3) < 0.1);
}

TEST_CASE("per-draw log predictive collapses to plug-in for identical draws") {
  const Domain unit(0.0, 1.0);
  const Eigen::MatrixXd grid = uniform_grid(0.0, 1.0, 600);
  Eigen::MatrixXd per_draw = Eigen::MatrixXd::Constant(32, 600, 1.5);
  const EventDataset draw = events_at({0.2, 0.9}, unit);
  const auto [mean, sd] = log_predictive_per_draw(per_draw, grid, {draw}, unit);
  const double expected = -1.5 + 2.0 * std::log(1.5);
  CHECK(mean == doctest::Approx(expected).epsilon(1e-9));
  CHECK(sd == 0.0);
}

TEST_CASE("metric input validation") {
  const IntensitySpec truth = IntensitySpec::synthetic_bimodal();

  SUBCASE("too few grid points") {
    CHECK_THROWS_AS(normalized_errors(estimate_from(truth, 20), truth), InvalidArgumentError);
  }
  SUBCASE("grid not covering the domain") {
    IntensityEstimate est = estimate_from(truth, 100);
    est.locations.array() *= 0.5;  // spans [0, 25] only
    CHECK_THROWS_AS(normalized_errors(est, truth), DataError);
  }
  SUBCASE("zero-mean truth") {
    const IntensitySpec zero = IntensitySpec::constant_rate(0.0, Domain(0.0, 1.0));
    CHECK_THROWS_AS(normalized_errors(estimate_from(zero, 100), zero), InvalidArgumentError);
  }
  SUBCASE("event outside the domain") {
    const Domain unit(0.0, 1.0);
    const IntensitySpec one = IntensitySpec::constant_rate(1.0, unit);
    EventDataset bad;
    bad.domain = Domain(0.0, 2.0);
    bad.points.resize(1, 1);
    bad.points << 1.5;
    CHECK_THROWS_AS(log_predictive(estimate_from(one, 600), {bad}, unit), InvalidArgumentError);
  }
  SUBCASE("coarse grid rejected for log predictive") {
    const Domain unit(0.0, 1.0);
    const IntensitySpec one = IntensitySpec::constant_rate(1.0, unit);
    CHECK_THROWS_AS(log_predictive(estimate_from(one, 100), {events_at({0.5}, unit)}, unit),
                    InvalidArgumentError);
  }
}

TEST_CASE("2-D product grids integrate and interpolate") {
  Eigen::VectorXd lo(2), hi(2);
  lo << 0.0, 0.0;
  hi << 1.0, 2.0;
  const Domain rect(lo, hi);
  const Eigen::Index nx = 30, ny = 30;
  IntensityEstimate est;
  est.locations.resize(nx * ny, 2);
  est.intensity_mean.resize(nx * ny);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < ny; ++j, ++row) {
      est.locations(row, 0) = static_cast<double>(i) / (nx - 1);
      est.locations(row, 1) = 2.0 * static_cast<double>(j) / (ny - 1);
      est.intensity_mean[row] = 3.0;
    }
  }
  est.log_mean = est.intensity_mean.array().log();
  est.log_var = Eigen::VectorXd::Zero(nx * ny);

  EventDataset draw;
  draw.domain = rect;
  draw.points.resize(1, 2);
  draw.points << 0.3, 1.1;
  const auto [mean, sd] = log_predictive(est, {draw}, rect);
  CHECK(mean == doctest::Approx(-6.0 + std::log(3.0)).epsilon(1e-9));
}
