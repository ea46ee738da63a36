#ifndef LGCP_CONDITIONAL_GP_HPP
#define LGCP_CONDITIONAL_GP_HPP

#include "lgcp/kernel.hpp"
#include "lgcp/types.hpp"

namespace lgcp {

/// Anchor locations of the finite-dimensional prior.
struct InducingSet {
  Eigen::MatrixXd locations;  // k x d

  InducingSet() = default;
  explicit InducingSet(Eigen::MatrixXd locs) : locations(std::move(locs)) {}

  Eigen::Index size() const { return locations.rows(); }
  int dim() const { return static_cast<int>(locations.cols()); }

  void validate(const Domain& domain) const {
    for (Eigen::Index i = 0; i < locations.rows(); ++i) {
      if (!domain.contains(locations.row(i).transpose()))
        throw InvalidArgumentError("inducing point " + std::to_string(i) + " lies outside the domain");
      for (Eigen::Index j = 0; j < i; ++j)
        if ((locations.row(i) - locations.row(j)).norm() == 0.0)
          throw InvalidArgumentError("inducing set contains exact duplicates");
    }
  }
};

/// Log-intensities at the inducing points, plus the constant prior mean.
/// In pipeline use m_star is log(n / mu(S)); tests may set it freely.
struct GPValues {
  Eigen::VectorXd log_lambda;  // length k
  double m_star = 0.0;

  GPValues() = default;
  GPValues(Eigen::VectorXd values, double mean) : log_lambda(std::move(values)), m_star(mean) {}

  static double mean_for_dataset(Eigen::Index n, double domain_volume) {
    if (n <= 0 || !(domain_volume > 0.0))
      throw InvalidArgumentError("prior mean needs n > 0 and positive domain volume");
    return std::log(static_cast<double>(n) / domain_volume);
  }

  Eigen::VectorXd centered() const { return log_lambda.array() - m_star; }
};

/// Gaussian process conditioned on its values at the inducing points. Holds
/// the single cached Cholesky factorization of Sigma*_{D'D'} that all solves
/// go through; build a new instance when the hyperparameters change.
class ConditionalGP {
 public:
  ConditionalGP(InducingSet inducing, HyperParams params);

  const InducingSet& inducing() const { return inducing_; }
  const HyperParams& params() const { return params_; }
  Eigen::Index size() const { return inducing_.size(); }
  double jitter() const { return jitter_; }
  const Eigen::MatrixXd& chol_lower() const { return chol_lower_; }
  double half_log_det() const;  // sum of log diag(L)

  /// Conditional mean m(s) = m* + Sigma*_{sD'} Sigma*^-1_{D'D'} (values - m*).
  Eigen::VectorXd mean(const Eigen::MatrixXd& query, const GPValues& values) const;

  /// Diagonal of the conditional covariance, clamped into [0, h^2].
  Eigen::VectorXd cov_diag(const Eigen::MatrixXd& query) const;

  /// Full conditional covariance matrix of the query points.
  Eigen::MatrixXd cov_full(const Eigen::MatrixXd& query) const;

  /// Tr(Sigma*_{DD'} Sigma*^-1_{D'D'} Sigma*^T_{DD'}) in O(n k^2) without any
  /// n x n intermediate.
  double trace_reduction(const Eigen::MatrixXd& data) const;

  /// L^-1 Sigma*_{D'Q}: whitened cross-covariance, k x |Q|.
  Eigen::MatrixXd whiten_cross(const Eigen::MatrixXd& query) const;

  /// L^-1 v for a k-vector.
  Eigen::VectorXd whiten(const Eigen::VectorXd& v) const;

  /// L v for a k-vector.
  Eigen::VectorXd unwhiten(const Eigen::VectorXd& eta) const;

 private:
  InducingSet inducing_;
  HyperParams params_;
  Eigen::MatrixXd chol_lower_;  // k x k, empty when k == 0
  double jitter_ = 0.0;
};

// Free-function forms of the conditional moments.
Eigen::VectorXd conditional_mean(const Eigen::MatrixXd& query, const InducingSet& inducing,
                                 const GPValues& values, const HyperParams& params);
Eigen::VectorXd conditional_cov_diag(const Eigen::MatrixXd& query, const InducingSet& inducing,
                                     const HyperParams& params);
Eigen::MatrixXd conditional_cov_full(const Eigen::MatrixXd& query, const InducingSet& inducing,
                                     const HyperParams& params);
double trace_reduction(const Eigen::MatrixXd& data, const InducingSet& inducing,
                       const HyperParams& params);

}  // namespace lgcp

#endif
