#include "lgcp/inducing.hpp"

#include "lgcp/simulate.hpp"
#include "test_helpers.hpp"

#include <doctest.h>

#include <chrono>
#include <cmath>

using namespace lgcp;

namespace {

std::vector<HyperParams> fixed_thetas(std::initializer_list<std::pair<double, double>> hl) {
  std::vector<HyperParams> out;
  for (auto [h, l] : hl) out.emplace_back(h, l);
  return out;
}

SelectionConfig synthetic_config(double alpha) {
  SelectionConfig config;
  config.alpha = alpha;
  config.num_theta_samples = 20;
  config.prior = HyperPrior(10.0, 25.0);
  return config;
}

}  // namespace

TEST_CASE("utility of the empty set is zero") {
  Eigen::MatrixXd data(3, 1);
  data << 0.0, 1.0, 2.0;
  CHECK(utility(Eigen::MatrixXd(0, 1), data, fixed_thetas({{1.0, 1.0}})) == 0.0);
}

TEST_CASE("conditioning on the data itself recovers the unconditional variance") {
  auto gen = test::rng(4);
  const Eigen::MatrixXd data = test::random_points(Domain(0.0, 30.0), 12, gen);
  HyperPrior prior(10.0, 25.0);
  std::vector<HyperParams> thetas;
  for (int i = 0; i < 5; ++i) thetas.push_back(sample_hyper(prior, gen));

  double w_inf = 0.0;
  for (const auto& t : thetas) w_inf += data.rows() * t.output_scale * t.output_scale;
  w_inf /= static_cast<double>(thetas.size());

  CHECK(utility(data, data, thetas) == doctest::Approx(w_inf).epsilon(1e-5));
}

TEST_CASE("single candidate on a single datum reduces to the averaged amplitude") {
  Eigen::MatrixXd data(1, 1);
  data << 3.0;
  const auto thetas = fixed_thetas({{1.5, 2.0}, {0.5, 7.0}});
  const double expected = 0.5 * (1.5 * 1.5 + 0.5 * 0.5);
  CHECK(utility(data, data, thetas) == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("utility is monotone under set inclusion") {
  auto gen = test::rng(8);
  Domain domain(0.0, 10.0);
  HyperPrior prior(3.0, 4.0);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<HyperParams> thetas{sample_hyper(prior, gen), sample_hyper(prior, gen)};
    const Eigen::MatrixXd data = test::random_points(domain, 10 + rep % 20, gen);
    const Eigen::MatrixXd base = test::random_points(domain, 1 + rep % 4, gen);
    Eigen::MatrixXd larger(base.rows() + 1, 1);
    larger.topRows(base.rows()) = base;
    larger.row(base.rows()) = test::random_points(domain, 1, gen);
    CHECK(utility(larger, data, thetas) >= utility(base, data, thetas) - 1e-9);
  }
}

TEST_CASE("argmax lands on a lone datum") {
  auto gen = test::rng(15);
  Eigen::MatrixXd data(1, 1);
  data << 12.0;
  const auto thetas = fixed_thetas({{1.0, 2.0}});
  MaximizerSettings settings;
  const Eigen::VectorXd s = argmax_next_point(InducingSet{}, data, thetas, Domain(0.0, 50.0),
                                              settings, gen);
  CHECK(std::abs(s[0] - 12.0) <= 1e-3 * 2.0);
}

TEST_CASE("argmax moves to the uncovered cluster and beats a lattice scan") {
  auto gen = test::rng(16);
  // Two tight clusters far apart; cluster A already has an inducing point.
  Eigen::MatrixXd data(10, 1);
  for (int i = 0; i < 5; ++i) data(i, 0) = 5.0 + 0.1 * i;
  for (int i = 0; i < 5; ++i) data(5 + i, 0) = 45.0 + 0.1 * i;
  Eigen::MatrixXd current(1, 1);
  current << 5.2;
  const auto thetas = fixed_thetas({{1.0, 1.5}, {2.0, 2.5}});

  MaximizerSettings settings;
  const Eigen::VectorXd s = argmax_next_point(InducingSet{current}, data, thetas,
                                              Domain(0.0, 50.0), settings, gen);
  CHECK(s[0] > 40.0);
  CHECK(s[0] < 50.0);

  // Exhaustive scan of the from-scratch utility over a 200-point lattice.
  double best_lattice = -1.0;
  for (int i = 0; i < 200; ++i) {
    Eigen::MatrixXd cand(2, 1);
    cand << 5.2, 50.0 * (i + 0.5) / 200.0;
    best_lattice = std::max(best_lattice, utility(cand, data, thetas));
  }
  Eigen::MatrixXd chosen(2, 1);
  chosen << 5.2, s[0];
  CHECK(utility(chosen, data, thetas) >= best_lattice - 1e-6);
}

TEST_CASE("argmax returns at least the best data seed") {
  auto gen = test::rng(77);
  Domain domain(0.0, 20.0);
  const Eigen::MatrixXd data = test::random_points(domain, 40, gen);
  const auto thetas = fixed_thetas({{1.0, 3.0}});
  Eigen::MatrixXd current(1, 1);
  current << 10.0;

  MaximizerSettings settings;
  const Eigen::VectorXd s =
      argmax_next_point(InducingSet{current}, data, thetas, domain, settings, gen);

  Eigen::MatrixXd chosen(2, 1);
  chosen << 10.0, s[0];
  double best_datum = -1.0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    Eigen::MatrixXd cand(2, 1);
    cand << 10.0, data(i, 0);
    best_datum = std::max(best_datum, utility(cand, data, thetas));
  }
  CHECK(utility(chosen, data, thetas) >= best_datum * (1.0 - 1e-9));
}

TEST_CASE("greedy selection reaches 95% utility within a handful of points") {
  auto gen = test::rng(2);
  const EventDataset draw = simulate(IntensitySpec::synthetic_bimodal(), gen);
  REQUIRE(draw.size() > 10);

  auto sel_rng = test::rng(31);
  const SelectionTrace trace =
      select_inducing_points(draw.points, draw.domain, synthetic_config(1e-3), sel_rng);

  Eigen::Index k95 = -1;
  for (Eigen::Index k = 0; k < trace.size(); ++k) {
    if (trace.utilities[k] >= 0.95 * trace.w_inf) {
      k95 = k + 1;
      break;
    }
  }
  REQUIRE(k95 > 0);
  CHECK(k95 >= 3);
  CHECK(k95 <= 8);
}

TEST_CASE("selection trace obeys the proposition bounds on a 5-point set") {
  Eigen::MatrixXd data(5, 1);
  data << 2.0, 11.0, 19.0, 33.0, 47.0;
  // Gains below ~1e-9 of the utility sit at the jitter floor, so 1e-8 is as
  // close to alpha -> 0 as floating point supports.
  SelectionConfig config = synthetic_config(1e-8);
  config.max_points = 40;
  auto gen = test::rng(9);
  const SelectionTrace trace = select_inducing_points(data, Domain(0.0, 50.0), config, gen);

  double prev = 0.0;
  for (Eigen::Index k = 0; k < trace.size(); ++k) {
    const double u = trace.utilities[k];
    CHECK(u > 0.0);
    CHECK(u >= prev - 1e-9 * trace.w_inf);              // nondecreasing
    CHECK(u <= trace.w_inf * (1.0 + 1e-9));             // bounded by w_inf
    const double rate_bound = 1.0 - std::pow(1.0 - 1.0 / 5.0, static_cast<double>(k + 1));
    CHECK(u / trace.w_inf >= rate_bound - 1e-9);        // linear rate
    prev = u;
  }
  CHECK(trace.utilities.back() / trace.w_inf >= 1.0 - 1e-6);
  CHECK(trace.size() <= 25);
}

TEST_CASE("selection is deterministic given the seed") {
  auto gen = test::rng(3);
  const Eigen::MatrixXd data = test::random_points(Domain(0.0, 50.0), 25, gen);
  SelectionConfig config = synthetic_config(0.01);

  auto r1 = test::rng(55), r2 = test::rng(55);
  const SelectionTrace a = select_inducing_points(data, Domain(0.0, 50.0), config, r1);
  const SelectionTrace b = select_inducing_points(data, Domain(0.0, 50.0), config, r2);
  REQUIRE(a.size() == b.size());
  CHECK(a.points == b.points);
  CHECK(a.w_inf == b.w_inf);
  for (size_t i = 0; i < a.utilities.size(); ++i) CHECK(a.utilities[i] == b.utilities[i]);
}

TEST_CASE("the iteration cap raises a selection error") {
  Eigen::MatrixXd data(6, 1);
  data << 1.0, 9.0, 18.0, 27.0, 36.0, 45.0;
  SelectionConfig config = synthetic_config(1e-15);
  config.max_points = 2;
  auto gen = test::rng(60);
  CHECK_THROWS_AS(select_inducing_points(data, Domain(0.0, 50.0), config, gen), SelectionError);
}

TEST_CASE("the stopping step's point is pruned from the recommendation") {
  Eigen::MatrixXd data(1, 1);
  data << 30.0;
  SelectionConfig config = synthetic_config(0.01);
  auto gen = test::rng(12);
  const SelectionTrace trace = select_inducing_points(data, Domain(0.0, 50.0), config, gen);
  CHECK(trace.size() >= 1);
  CHECK(trace.recommended_size() == 1);
  // A single inducing point near the lone datum.
  CHECK(std::abs(trace.recommended_points()(0, 0) - 30.0) < 0.5);
}

TEST_CASE("utility evaluation time grows linearly in n") {
  auto gen = test::rng(91);
  Domain domain(0.0, 100.0);
  const Eigen::MatrixXd small = test::random_points(domain, 10000, gen);
  const Eigen::MatrixXd large = test::random_points(domain, 20000, gen);
  const Eigen::MatrixXd candidate = test::random_points(domain, 5, gen);
  const auto thetas = fixed_thetas({{1.0, 5.0}, {2.0, 10.0}, {0.5, 2.0}});

  auto time_of = [&](const Eigen::MatrixXd& data) {
    double best = std::numeric_limits<double>::infinity();
    for (int rep = 0; rep < 5; ++rep) {
      const auto t0 = std::chrono::steady_clock::now();
      volatile double sink = utility(candidate, data, thetas);
      (void)sink;
      best = std::min(best,
                      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return best;
  };
  const double ratio = time_of(large) / time_of(small);
  CHECK(ratio >= 1.6);
  CHECK(ratio <= 2.6);
}
