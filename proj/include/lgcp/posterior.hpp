#ifndef LGCP_POSTERIOR_HPP
#define LGCP_POSTERIOR_HPP

#include "lgcp/conditional_gp.hpp"
#include "lgcp/kernel.hpp"
#include "lgcp/quadrature.hpp"
#include "lgcp/types.hpp"

#include <memory>
#include <random>

namespace lgcp {

/// Posterior over (log-intensities at inducing points, theta): hyperprior x
/// Gaussian prior on G x the collapsed data term
///   1_n' M + Tr(Sigma_DD)/2 - mu_I.
///
/// The data-point log-intensities are integrated out analytically through
/// the Gaussian moment generating function; the intensity integral enters
/// through its conditional mean mu_I. Marginalizing it against the
/// moment-matched Gamma instead ((1 + beta_I)^-alpha_I) discounts the
/// exposure once sigma_I is no longer small against mu_I, which lets the
/// fit trade conditional variance for unpaid intensity and overweights every
/// estimate; mu_I is the limit of that factor as the match tightens and
/// keeps the exposure honest. The moments themselves stay available from
/// gamma_moments_at_nodes().
///
/// Everything that depends only on theta (factorization of Sigma*_{D'D'},
/// whitened cross-covariances to data and quadrature nodes, conditional
/// diagonals) is cached per hyperparameter setting; mu_I is recomputed on
/// every G change because it depends on the conditional mean. A context
/// belongs to one chain; it is not safe for concurrent use.
class PosteriorContext {
 public:
  PosteriorContext(EventDataset data, InducingSet inducing, HyperPrior prior, int quad_order);
  ~PosteriorContext();
  PosteriorContext(PosteriorContext&&) noexcept;
  PosteriorContext& operator=(PosteriorContext&&) noexcept;

  const EventDataset& data() const { return data_; }
  const InducingSet& inducing() const { return inducing_; }
  const HyperPrior& prior() const { return prior_; }
  const QuadratureRule& rule() const { return rule_; }
  Eigen::Index num_data() const { return data_.size(); }
  Eigen::Index num_inducing() const { return inducing_.size(); }

  /// log(n / mu(S)); NaN when the dataset is empty.
  double default_m_star() const { return default_m_star_; }

  /// Rebuild the theta caches. Throws ConditioningError when Sigma*_{D'D'} is
  /// not factorizable under the new parameters, leaving the old caches intact.
  void set_params(const HyperParams& params);
  bool has_params() const { return current_ != nullptr; }
  const HyperParams& params() const;

  // Two-phase update used by the Metropolis step: stage a candidate theta,
  // evaluate under it, then commit or drop. The current caches stay valid
  // until commit_staged().
  void stage_params(const HyperParams& params);
  bool has_staged() const { return staged_ != nullptr; }
  void commit_staged();
  void drop_staged();

  /// Collapsed data term at the current (or staged) hyperparameters. Returns
  /// -infinity instead of throwing when an exponent overflows, so samplers
  /// can treat it as certain rejection.
  double log_likelihood_term(const GPValues& values) const;
  double staged_log_likelihood_term(const GPValues& values) const;

  /// The two pieces of the data term, for tests that ablate one of them:
  /// mgf_log_term = 1_n' M + Tr(Sigma_DD)/2, exposure_log_term = mu_I (the
  /// subtracted piece).
  double mgf_log_term(const GPValues& values) const;
  double exposure_log_term(const GPValues& values) const;

  /// Gamma moments of the intensity integral at the current parameters.
  GammaMoments gamma_moments_at_nodes(const GPValues& values) const;

  /// log N(G | m* 1, Sigma*_{D'D'}).
  double log_prior_values(const GPValues& values) const;

  /// Unnormalized log posterior; -infinity outside the hyperprior support.
  double log_posterior(const GPValues& values) const;

  /// Conditional means M at the data points, O(nk).
  Eigen::VectorXd data_means(const GPValues& values) const;

  /// diag(Sigma_DD) at the data points under the current parameters.
  const Eigen::VectorXd& data_cond_diag() const;

  /// Tr(Sigma_DD) under the current parameters.
  double data_trace() const;

  /// Gradient of 1_n' M with respect to G (it is linear in G).
  Eigen::VectorXd sum_mean_gradient() const;

  /// Draw from N(0, Sigma*_{D'D'}).
  Eigen::VectorXd draw_prior_noise(std::mt19937_64& rng) const;

  /// eta = L^-1 c and c = L eta under the current factorization.
  Eigen::VectorXd whiten_centered(const Eigen::VectorXd& centered) const;
  Eigen::VectorXd unwhiten(const Eigen::VectorXd& eta) const;

  /// L_staged (L_current^-1 c): carries a centered G into the staged
  /// parameterization with the whitened coordinates held fixed.
  Eigen::VectorXd staged_transform_from_current(const Eigen::VectorXd& centered) const;

 private:
  struct ThetaCache;

  std::unique_ptr<ThetaCache> build_cache(const HyperParams& params) const;
  const ThetaCache& current() const;
  double likelihood_impl(const GPValues& values, const ThetaCache& cache, bool* overflow) const;

  EventDataset data_;
  InducingSet inducing_;
  HyperPrior prior_;
  QuadratureRule rule_;
  double default_m_star_;
  std::unique_ptr<ThetaCache> current_;
  std::unique_ptr<ThetaCache> staged_;
};

}  // namespace lgcp

#endif
