#ifndef LGCP_INDUCING_HPP
#define LGCP_INDUCING_HPP

#include "lgcp/conditional_gp.hpp"
#include "lgcp/kernel.hpp"
#include "lgcp/types.hpp"

#include <random>
#include <vector>

namespace lgcp {

struct MaximizerSettings {
  int restarts = 8;        // 4 data-seeded + 4 uniform starts
  int max_iterations = 400;
  int seed_candidates = 512;  // data points ranked for seeding
};

struct SelectionConfig {
  double alpha = 1e-3;        // relative-gain stopping threshold
  int num_theta_samples = 20; // N
  HyperPrior prior;
  MaximizerSettings maximizer;
  int max_points = 256;          // iteration cap
  Eigen::Index subsample_limit = 20000;

  void validate() const {
    if (!(alpha > 0.0) || !(alpha < 1.0))
      throw InvalidArgumentError("selection threshold alpha must lie in (0, 1)");
    if (num_theta_samples < 1) throw InvalidArgumentError("need at least one hyperparameter sample");
    if (max_points < 1) throw InvalidArgumentError("iteration cap must be positive");
    prior.validate();
  }
};

/// Everything the greedy pass produced, in selection order.
struct SelectionTrace {
  Eigen::MatrixXd points;          // k x d
  std::vector<double> utilities;   // u_1 .. u_k
  double w_inf = 0.0;              // average total unconditional variance
  std::vector<HyperParams> theta_samples;
  double alpha = 0.0;              // threshold the run used

  Eigen::Index size() const { return points.rows(); }

  /// Points to actually use: the stopping step's point contributed less than
  /// alpha of the utility, so it is dropped from the recommendation (never
  /// below one point).
  Eigen::Index recommended_size() const;
  Eigen::MatrixXd recommended_points() const { return points.topRows(recommended_size()); }
};

/// Monte Carlo utility: average over hyperparameter samples of the total
/// predictive-variance reduction at the data points. Empty candidate set is 0.
double utility(const Eigen::MatrixXd& candidate_set, const Eigen::MatrixXd& data,
               const std::vector<HyperParams>& theta_samples);

/// Point of the domain maximizing the utility of current + {s}. Multi-start
/// Nelder-Mead seeded at high-gain data points and uniform draws; the best
/// data seed is always among the candidates, so the result never falls below
/// it.
Eigen::VectorXd argmax_next_point(const InducingSet& current, const Eigen::MatrixXd& data,
                                  const std::vector<HyperParams>& theta_samples,
                                  const Domain& domain, const MaximizerSettings& settings,
                                  std::mt19937_64& rng);

/// Greedy selection: add the utility-maximizing point until the relative gain
/// drops below alpha.
SelectionTrace select_inducing_points(const Eigen::MatrixXd& data, const Domain& domain,
                                      const SelectionConfig& config, std::mt19937_64& rng);

}  // namespace lgcp

#endif
