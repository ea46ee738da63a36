#include "lgcp/predict.hpp"

#include <cmath>

namespace lgcp {

IntensityEstimate predictive_at_data(const PosteriorSamples& samples, const EventDataset& data) {
  if (samples.draw_count() == 0) throw InvalidArgumentError("no posterior draws available");
  if (data.size() != samples.n_data)
    throw InvalidArgumentError("dataset size does not match the fitted summaries");

  IntensityEstimate est;
  est.locations = data.points;
  est.log_mean = samples.data_mean_tilted;
  est.intensity_mean = samples.data_mean_intensity;
  const double t = static_cast<double>(samples.draw_count());
  est.log_var = samples.data_mean_var;
  if (t > 1.0) est.log_var += samples.data_m2_tilted / (t - 1.0);
  return est;
}

IntensityEstimate predictive_on_grid(const PosteriorSamples& samples, const Eigen::MatrixXd& grid,
                                     Eigen::MatrixXd* per_draw_intensity) {
  if (samples.draw_count() == 0) throw InvalidArgumentError("no posterior draws available");
  if (grid.rows() == 0) throw InvalidArgumentError("prediction grid is empty");
  if (grid.cols() != samples.domain.dim())
    throw InvalidArgumentError("grid dimension does not match the model domain");
  for (Eigen::Index i = 0; i < grid.rows(); ++i)
    if (!samples.domain.contains(grid.row(i).transpose()))
      throw InvalidArgumentError("grid point " + std::to_string(i) + " lies outside the domain");

  const Eigen::Index m = grid.rows();
  const Eigen::Index t_total = samples.draw_count();
  const int d = samples.domain.dim();
  if (per_draw_intensity) per_draw_intensity->resize(t_total, m);

  Eigen::VectorXd mean_m = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd m2_m = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd mean_var = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd mean_intensity = Eigen::VectorXd::Zero(m);

  // Consecutive draws share theta whenever the Metropolis step rejected, so
  // reuse the factorization until theta changes.
  std::unique_ptr<ConditionalGP> gp;
  Eigen::RowVectorXd last_theta;
  GPValues values;
  values.m_star = samples.m_star;

  for (Eigen::Index t = 0; t < t_total; ++t) {
    const Eigen::RowVectorXd theta_row = samples.theta_draws.row(t);
    if (!gp || theta_row != last_theta) {
      HyperParams params(theta_row[0], theta_row.tail(d).transpose());
      gp = std::make_unique<ConditionalGP>(samples.inducing, params);
      last_theta = theta_row;
    }
    values.log_lambda = samples.g_draws.row(t).transpose();
    const Eigen::VectorXd cond_mean = gp->mean(grid, values);
    const Eigen::VectorXd cond_var = gp->cov_diag(grid);

    const double count = static_cast<double>(t + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double delta = cond_mean[i] - mean_m[i];
      mean_m[i] += delta / count;
      m2_m[i] += delta * (cond_mean[i] - mean_m[i]);
      mean_var[i] += (cond_var[i] - mean_var[i]) / count;
      const double intensity = std::exp(cond_mean[i] + 0.5 * cond_var[i]);
      mean_intensity[i] += (intensity - mean_intensity[i]) / count;
      if (per_draw_intensity) (*per_draw_intensity)(t, i) = intensity;
    }
  }

  IntensityEstimate est;
  est.locations = grid;
  est.log_mean = mean_m;
  est.log_var = mean_var;
  if (t_total > 1) est.log_var += m2_m / static_cast<double>(t_total - 1);
  est.intensity_mean = mean_intensity;
  return est;
}

}  // namespace lgcp
