#include "lgcp/posterior.hpp"

#include <cmath>
#include <limits>

namespace lgcp {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;
constexpr double kExpOverflow = 700.0;
constexpr double kSigmaFloor = 1e-12;
constexpr double kNegVarianceTolerance = 1e-8;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();



}  // namespace

struct PosteriorContext::ThetaCache {
  HyperParams params;
  double h2 = 0.0;
  Eigen::MatrixXd chol_lower;      // k x k
  double half_log_det = 0.0;       // sum log diag(L)
  Eigen::MatrixXd white_data;      // k x n
  Eigen::VectorXd white_data_sum;  // k, = white_data * 1_n
  Eigen::VectorXd cond_diag;       // n, clamped at 0
  double trace_cond = 0.0;         // sum of cond_diag
  Eigen::MatrixXd white_nodes;     // k x Q
  Eigen::VectorXd node_diag;       // Q
  Eigen::MatrixXd node_cov_expm1;  // Q x Q, expm1 of the conditional covariance
};

PosteriorContext::~PosteriorContext() = default;
PosteriorContext::PosteriorContext(PosteriorContext&&) noexcept = default;
PosteriorContext& PosteriorContext::operator=(PosteriorContext&&) noexcept = default;

PosteriorContext::PosteriorContext(EventDataset data, InducingSet inducing, HyperPrior prior,
                                   int quad_order)
    : data_(std::move(data)), inducing_(std::move(inducing)), prior_(std::move(prior)) {
  data_.validate();
  inducing_.validate(data_.domain);
  if (inducing_.size() == 0)
    throw InvalidArgumentError("posterior requires at least one inducing point");
  rule_ = gauss_legendre_rule(quad_order, data_.domain);
  default_m_star_ = data_.size() > 0
                        ? GPValues::mean_for_dataset(data_.size(), data_.domain.volume())
                        : std::numeric_limits<double>::quiet_NaN();
}

std::unique_ptr<PosteriorContext::ThetaCache> PosteriorContext::build_cache(
    const HyperParams& params) const {
  auto cache = std::make_unique<ThetaCache>();
  cache->params = params;
  cache->h2 = params.output_scale * params.output_scale;

  ConditionalGP gp(inducing_, params);
  cache->chol_lower = gp.chol_lower();
  cache->half_log_det = gp.half_log_det();

  const Eigen::Index n = data_.size();
  if (n > 0) {
    cache->white_data = gp.whiten_cross(data_.points);
    cache->white_data_sum = cache->white_data.rowwise().sum();
    cache->cond_diag.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = cache->h2 - cache->white_data.col(i).squaredNorm();
      if (v < -kNegVarianceTolerance * cache->h2)
        throw ConditioningError("conditional variance at data point " + std::to_string(i) +
                                " is negative beyond roundoff");
      cache->cond_diag[i] = std::max(v, 0.0);
    }
    cache->trace_cond = cache->cond_diag.sum();
  } else {
    cache->white_data.resize(inducing_.size(), 0);
    cache->white_data_sum = Eigen::VectorXd::Zero(inducing_.size());
    cache->cond_diag.resize(0);
    cache->trace_cond = 0.0;
  }

  cache->white_nodes = gp.whiten_cross(rule_.nodes);
  const Eigen::Index q = rule_.size();
  cache->node_diag.resize(q);
  for (Eigen::Index i = 0; i < q; ++i)
    cache->node_diag[i] = std::max(cache->h2 - cache->white_nodes.col(i).squaredNorm(), 0.0);

  Eigen::MatrixXd node_cov = gram(rule_.nodes, rule_.nodes, params);
  node_cov -= cache->white_nodes.transpose() * cache->white_nodes;
  node_cov = 0.5 * (node_cov + node_cov.transpose()).eval();
  node_cov.diagonal() = cache->node_diag;
  cache->node_cov_expm1 = node_cov.array().expm1();
  return cache;
}

const PosteriorContext::ThetaCache& PosteriorContext::current() const {
  if (!current_) throw InternalError("posterior context has no hyperparameters set");
  return *current_;
}

void PosteriorContext::set_params(const HyperParams& params) {
  current_ = build_cache(params);
}

const HyperParams& PosteriorContext::params() const { return current().params; }

void PosteriorContext::stage_params(const HyperParams& params) { staged_ = build_cache(params); }

void PosteriorContext::commit_staged() {
  if (!staged_) throw InternalError("no staged hyperparameters to commit");
  current_ = std::move(staged_);
}

void PosteriorContext::drop_staged() { staged_.reset(); }

double PosteriorContext::likelihood_impl(const GPValues& values, const ThetaCache& cache,
                                         bool* overflow) const {
  if (overflow) *overflow = false;
  if (values.log_lambda.size() != inducing_.size())
    throw InvalidArgumentError("GP values length does not match inducing set size");

  Eigen::VectorXd z = values.centered();
  cache.chol_lower.triangularView<Eigen::Lower>().solveInPlace(z);

  const double n = static_cast<double>(data_.size());
  const double sum_means = n * values.m_star + cache.white_data_sum.dot(z);
  const double mgf = sum_means + 0.5 * cache.trace_cond;

  // Gamma moments of the integral at this G.
  const Eigen::Index q = rule_.size();
  Eigen::VectorXd phi(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double mean_i = values.m_star + cache.white_nodes.col(i).dot(z);
    const double arg = mean_i + 0.5 * cache.node_diag[i];
    if (arg > kExpOverflow) {
      if (overflow) *overflow = true;
      return kNegInf;
    }
    phi[i] = rule_.weights[i] * std::exp(arg);
  }
  const double mu = phi.sum();
  if (!std::isfinite(mu) || !(mu > 0.0)) {
    if (overflow) *overflow = true;
    return kNegInf;
  }
  return mgf - mu;
}

double PosteriorContext::log_likelihood_term(const GPValues& values) const {
  return likelihood_impl(values, current(), nullptr);
}

double PosteriorContext::staged_log_likelihood_term(const GPValues& values) const {
  if (!staged_) throw InternalError("no staged hyperparameters");
  return likelihood_impl(values, *staged_, nullptr);
}

double PosteriorContext::mgf_log_term(const GPValues& values) const {
  const ThetaCache& cache = current();
  Eigen::VectorXd z = values.centered();
  cache.chol_lower.triangularView<Eigen::Lower>().solveInPlace(z);
  const double n = static_cast<double>(data_.size());
  return n * values.m_star + cache.white_data_sum.dot(z) + 0.5 * cache.trace_cond;
}

double PosteriorContext::exposure_log_term(const GPValues& values) const {
  return gamma_moments_at_nodes(values).mu;
}

GammaMoments PosteriorContext::gamma_moments_at_nodes(const GPValues& values) const {
  const ThetaCache& cache = current();
  Eigen::VectorXd z = values.centered();
  cache.chol_lower.triangularView<Eigen::Lower>().solveInPlace(z);

  const Eigen::Index q = rule_.size();
  Eigen::VectorXd phi(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double arg = values.m_star + cache.white_nodes.col(i).dot(z) + 0.5 * cache.node_diag[i];
    if (arg > kExpOverflow)
      throw RangeError("integrand exponent overflows at node " + std::to_string(i), i);
    phi[i] = rule_.weights[i] * std::exp(arg);
  }
  GammaMoments out;
  out.mu = phi.sum();
  if (!(out.mu > 0.0)) throw InternalError("intensity integral mean is nonpositive");
  out.sigma2 = std::max(phi.dot(cache.node_cov_expm1 * phi), kSigmaFloor * out.mu * out.mu);
  out.alpha = out.mu * out.mu / out.sigma2;
  out.beta = out.sigma2 / out.mu;
  return out;
}

double PosteriorContext::log_prior_values(const GPValues& values) const {
  const ThetaCache& cache = current();
  Eigen::VectorXd z = values.centered();
  cache.chol_lower.triangularView<Eigen::Lower>().solveInPlace(z);
  const double k = static_cast<double>(inducing_.size());
  return -0.5 * k * kLog2Pi - cache.half_log_det - 0.5 * z.squaredNorm();
}

double PosteriorContext::log_posterior(const GPValues& values) const {
  const double hyper = log_hyper_prior_density(current().params, prior_);
  if (hyper == kNegInf) return kNegInf;
  return hyper + log_prior_values(values) + log_likelihood_term(values);
}

Eigen::VectorXd PosteriorContext::data_means(const GPValues& values) const {
  const ThetaCache& cache = current();
  Eigen::VectorXd z = values.centered();
  cache.chol_lower.triangularView<Eigen::Lower>().solveInPlace(z);
  return (cache.white_data.transpose() * z).array() + values.m_star;
}

const Eigen::VectorXd& PosteriorContext::data_cond_diag() const { return current().cond_diag; }

double PosteriorContext::data_trace() const { return current().trace_cond; }

Eigen::VectorXd PosteriorContext::sum_mean_gradient() const {
  const ThetaCache& cache = current();
  Eigen::VectorXd g = cache.white_data_sum;
  cache.chol_lower.transpose().triangularView<Eigen::Upper>().solveInPlace(g);
  return g;
}

Eigen::VectorXd PosteriorContext::draw_prior_noise(std::mt19937_64& rng) const {
  const ThetaCache& cache = current();
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd xi(inducing_.size());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
  return cache.chol_lower.triangularView<Eigen::Lower>() * xi;
}

Eigen::VectorXd PosteriorContext::whiten_centered(const Eigen::VectorXd& centered) const {
  Eigen::VectorXd z = centered;
  current().chol_lower.triangularView<Eigen::Lower>().solveInPlace(z);
  return z;
}

Eigen::VectorXd PosteriorContext::unwhiten(const Eigen::VectorXd& eta) const {
  return current().chol_lower.triangularView<Eigen::Lower>() * eta;
}

Eigen::VectorXd PosteriorContext::staged_transform_from_current(
    const Eigen::VectorXd& centered) const {
  if (!staged_) throw InternalError("no staged hyperparameters");
  Eigen::VectorXd z = centered;
  current().chol_lower.triangularView<Eigen::Lower>().solveInPlace(z);
  return staged_->chol_lower.triangularView<Eigen::Lower>() * z;
}

}  // namespace lgcp
