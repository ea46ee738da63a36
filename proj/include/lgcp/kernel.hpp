#ifndef LGCP_KERNEL_HPP
#define LGCP_KERNEL_HPP

#include "lgcp/types.hpp"

#include <random>

namespace lgcp {

/// Hyperparameters of the squared-exponential kernel: one output scale h
/// (amplitude of the log-intensity) and one input scale l_j per dimension.
struct HyperParams {
  double output_scale = 1.0;
  Eigen::VectorXd input_scales;

  HyperParams() = default;
  HyperParams(double h, Eigen::VectorXd l) : output_scale(h), input_scales(std::move(l)) { validate(); }
  HyperParams(double h, double l) : output_scale(h), input_scales(Eigen::VectorXd::Constant(1, l)) {
    validate();
  }

  int dim() const { return static_cast<int>(input_scales.size()); }

  void validate() const {
    if (!(output_scale > 0.0) || !std::isfinite(output_scale))
      throw InvalidArgumentError("output scale must be positive and finite");
    if (input_scales.size() == 0) throw InvalidArgumentError("at least one input scale required");
    for (Eigen::Index j = 0; j < input_scales.size(); ++j)
      if (!(input_scales[j] > 0.0) || !std::isfinite(input_scales[j]))
        throw InvalidArgumentError("input scales must be positive and finite");
  }
};

/// Scaled-sigmoid Gaussian hyperprior: theta_i = theta_imax * sigmoid(x_i),
/// x_i i.i.d. standard normal. Bounds restrict the support to (0, theta_max).
struct HyperPrior {
  double max_output_scale = 10.0;
  Eigen::VectorXd max_input_scales;

  HyperPrior() = default;
  HyperPrior(double h_max, Eigen::VectorXd l_max)
      : max_output_scale(h_max), max_input_scales(std::move(l_max)) {
    validate();
  }
  HyperPrior(double h_max, double l_max)
      : max_output_scale(h_max), max_input_scales(Eigen::VectorXd::Constant(1, l_max)) {
    validate();
  }

  int dim() const { return static_cast<int>(max_input_scales.size()); }

  void validate() const {
    if (!(max_output_scale > 0.0) || !std::isfinite(max_output_scale))
      throw InvalidArgumentError("maximum output scale must be positive and finite");
    if (max_input_scales.size() == 0)
      throw InvalidArgumentError("at least one maximum input scale required");
    for (Eigen::Index j = 0; j < max_input_scales.size(); ++j)
      if (!(max_input_scales[j] > 0.0) || !std::isfinite(max_input_scales[j]))
        throw InvalidArgumentError("maximum input scales must be positive and finite");
  }
};

/// Squared-exponential covariance h^2 exp(-sum_j (a_j-b_j)^2 / (2 l_j^2)).
double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const HyperParams& params);

/// |X| x |Y| covariance matrix between two point lists (rows are points).
Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const HyperParams& params);

/// Draw hyperparameters through the scaled-sigmoid transform of a standard normal.
HyperParams sample_hyper(const HyperPrior& prior, std::mt19937_64& rng);

/// Log prior density in theta space, including the sigmoid change-of-variables
/// term. Returns -infinity on or outside the support bounds.
double log_hyper_prior_density(const HyperParams& params, const HyperPrior& prior);

/// Lower Cholesky factor of a symmetric PSD matrix after adding jitter to the
/// diagonal. The ladder starts at 1e-8*h^2 and escalates tenfold up to
/// 1e-4*h^2 before giving up with a ConditioningError.
struct JitteredCholesky {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
};
JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& m, double h2);

}  // namespace lgcp

#endif
