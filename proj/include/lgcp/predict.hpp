#ifndef LGCP_PREDICT_HPP
#define LGCP_PREDICT_HPP

#include "lgcp/sampler.hpp"

namespace lgcp {

/// Posterior summaries of the log-intensity and intensity at a point list.
struct IntensityEstimate {
  Eigen::MatrixXd locations;      // M x d
  Eigen::VectorXd log_mean;       // E[log lambda | D]
  Eigen::VectorXd log_var;        // Var[log lambda | D]
  Eigen::VectorXd intensity_mean; // E[lambda | D]

  Eigen::Index size() const { return locations.rows(); }
  int dim() const { return static_cast<int>(locations.cols()); }
};

/// Summaries at the observed points from the streaming per-draw quantities:
/// mean of M[i] + Sigma_DD[i,i], total variance = mean of Sigma_DD[i,i] plus
/// the between-draw variance, and the averaged conditional intensity mean.
IntensityEstimate predictive_at_data(const PosteriorSamples& samples, const EventDataset& data);

/// Summaries on an arbitrary grid by re-walking the stored (G, theta) draws
/// through the conditional moments. At non-data locations the conditional law
/// is the untilted Gaussian N(m(s), gamma(s,s)): the exponential tilt applies
/// only at observed points. When per_draw_intensity is non-null it receives
/// the T x M matrix of per-draw conditional intensity means.
IntensityEstimate predictive_on_grid(const PosteriorSamples& samples, const Eigen::MatrixXd& grid,
                                     Eigen::MatrixXd* per_draw_intensity = nullptr);

}  // namespace lgcp

#endif
