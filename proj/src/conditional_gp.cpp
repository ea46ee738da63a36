#include "lgcp/conditional_gp.hpp"

#include <cmath>

namespace lgcp {

namespace {

// Negative conditional variances beyond this (relative to h^2) indicate a
// broken factorization rather than roundoff.
constexpr double kNegVarianceTolerance = 1e-8;

}  // namespace

ConditionalGP::ConditionalGP(InducingSet inducing, HyperParams params)
    : inducing_(std::move(inducing)), params_(std::move(params)) {
  params_.validate();
  if (inducing_.size() > 0) {
    if (inducing_.dim() != params_.dim())
      throw InvalidArgumentError("inducing point dimension does not match kernel dimension");
    const double h2 = params_.output_scale * params_.output_scale;
    auto chol = jittered_cholesky(gram(inducing_.locations, inducing_.locations, params_), h2);
    chol_lower_ = std::move(chol.lower);
    jitter_ = chol.jitter;
  }
}

double ConditionalGP::half_log_det() const {
  if (size() == 0) return 0.0;
  return chol_lower_.diagonal().array().log().sum();
}

Eigen::VectorXd ConditionalGP::mean(const Eigen::MatrixXd& query, const GPValues& values) const {
  if (query.rows() == 0) throw InvalidArgumentError("query must be nonempty");
  if (size() == 0) return Eigen::VectorXd::Constant(query.rows(), values.m_star);
  if (values.log_lambda.size() != size())
    throw InvalidArgumentError("GP values length does not match inducing set size");

  // alpha = Sigma*^-1 (G - m*); one pair of triangular solves.
  Eigen::VectorXd alpha = values.centered();
  chol_lower_.triangularView<Eigen::Lower>().solveInPlace(alpha);
  chol_lower_.transpose().triangularView<Eigen::Upper>().solveInPlace(alpha);
  return (gram(query, inducing_.locations, params_) * alpha).array() + values.m_star;
}

Eigen::MatrixXd ConditionalGP::whiten_cross(const Eigen::MatrixXd& query) const {
  Eigen::MatrixXd cross = gram(inducing_.locations, query, params_);  // k x m
  chol_lower_.triangularView<Eigen::Lower>().solveInPlace(cross);
  return cross;
}

Eigen::VectorXd ConditionalGP::whiten(const Eigen::VectorXd& v) const {
  Eigen::VectorXd out = v;
  chol_lower_.triangularView<Eigen::Lower>().solveInPlace(out);
  return out;
}

Eigen::VectorXd ConditionalGP::unwhiten(const Eigen::VectorXd& eta) const {
  return chol_lower_.triangularView<Eigen::Lower>() * eta;
}

Eigen::VectorXd ConditionalGP::cov_diag(const Eigen::MatrixXd& query) const {
  if (query.rows() == 0) throw InvalidArgumentError("query must be nonempty");
  const double h2 = params_.output_scale * params_.output_scale;
  if (size() == 0) return Eigen::VectorXd::Constant(query.rows(), h2);

  Eigen::VectorXd reduction = whiten_cross(query).colwise().squaredNorm();
  Eigen::VectorXd diag = Eigen::VectorXd::Constant(query.rows(), h2) - reduction;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (diag[i] < -kNegVarianceTolerance * h2)
      throw ConditioningError("conditional variance " + std::to_string(diag[i]) +
                              " is negative beyond roundoff at query " + std::to_string(i));
    if (diag[i] < 0.0) diag[i] = 0.0;
  }
  return diag;
}

Eigen::MatrixXd ConditionalGP::cov_full(const Eigen::MatrixXd& query) const {
  if (query.rows() == 0) throw InvalidArgumentError("query must be nonempty");
  Eigen::MatrixXd prior = gram(query, query, params_);
  if (size() == 0) return prior;
  Eigen::MatrixXd white = whiten_cross(query);  // k x m
  Eigen::MatrixXd cov = prior - white.transpose() * white;
  cov = 0.5 * (cov + cov.transpose()).eval();
  return cov;
}

double ConditionalGP::trace_reduction(const Eigen::MatrixXd& data) const {
  if (size() == 0) throw InvalidArgumentError("trace reduction requires at least one inducing point");
  if (data.rows() == 0) return 0.0;
  // Frobenius norm of the whitened cross-covariance, in n-blocks to keep the
  // working set at O(k * block).
  constexpr Eigen::Index kBlock = 8192;
  double total = 0.0;
  for (Eigen::Index start = 0; start < data.rows(); start += kBlock) {
    const Eigen::Index len = std::min(kBlock, data.rows() - start);
    total += whiten_cross(data.middleRows(start, len)).squaredNorm();
  }
  return total;
}

Eigen::VectorXd conditional_mean(const Eigen::MatrixXd& query, const InducingSet& inducing,
                                 const GPValues& values, const HyperParams& params) {
  return ConditionalGP(inducing, params).mean(query, values);
}

Eigen::VectorXd conditional_cov_diag(const Eigen::MatrixXd& query, const InducingSet& inducing,
                                     const HyperParams& params) {
  return ConditionalGP(inducing, params).cov_diag(query);
}

Eigen::MatrixXd conditional_cov_full(const Eigen::MatrixXd& query, const InducingSet& inducing,
                                     const HyperParams& params) {
  return ConditionalGP(inducing, params).cov_full(query);
}

double trace_reduction(const Eigen::MatrixXd& data, const InducingSet& inducing,
                       const HyperParams& params) {
  return ConditionalGP(inducing, params).trace_reduction(data);
}

}  // namespace lgcp
