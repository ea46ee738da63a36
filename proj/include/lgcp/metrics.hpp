#ifndef LGCP_METRICS_HPP
#define LGCP_METRICS_HPP

#include "lgcp/predict.hpp"
#include "lgcp/simulate.hpp"
#include "lgcp/types.hpp"

#include <limits>
#include <vector>

namespace lgcp {

/// Accuracy and diagnostic summary of one experiment run. Fields that were
/// not computed stay NaN.
struct EvalReport {
  double mae = std::numeric_limits<double>::quiet_NaN();
  double rmse = std::numeric_limits<double>::quiet_NaN();
  double lp_mean = std::numeric_limits<double>::quiet_NaN();
  double lp_sd = std::numeric_limits<double>::quiet_NaN();
  double lp_per_draw_mean = std::numeric_limits<double>::quiet_NaN();
  double lp_per_draw_sd = std::numeric_limits<double>::quiet_NaN();
  double ess_per_1000 = std::numeric_limits<double>::quiet_NaN();
  double wall_seconds = std::numeric_limits<double>::quiet_NaN();
};

/// MAE and RMSE of the estimated intensity against the true one, both
/// expressed as a proportion of the average true intensity over the
/// estimate's grid (at least 50 points covering the domain).
std::pair<double, double> normalized_errors(const IntensityEstimate& estimate,
                                            const IntensitySpec& truth);

/// Mean and standard deviation over held-out draws of the Poisson
/// log-likelihood -int lambda_hat + sum_i log lambda_hat(s_i), with the
/// plug-in posterior mean intensity integrated by the trapezoidal rule on the
/// estimate's grid and interpolated linearly at the events.
std::pair<double, double> log_predictive(const IntensityEstimate& estimate,
                                         const std::vector<EventDataset>& heldout,
                                         const Domain& domain);

/// Alternative that averages the per-draw predictive probabilities inside the
/// log: LP_j = log mean_t exp(log L(lambda_t | draw j)).
std::pair<double, double> log_predictive_per_draw(const Eigen::MatrixXd& per_draw_intensity,
                                                  const Eigen::MatrixXd& grid,
                                                  const std::vector<EventDataset>& heldout,
                                                  const Domain& domain);

}  // namespace lgcp

#endif
