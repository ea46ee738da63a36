#ifndef LGCP_SAMPLER_HPP
#define LGCP_SAMPLER_HPP

#include "lgcp/posterior.hpp"

#include <functional>
#include <random>

namespace lgcp {

struct SamplerConfig {
  int burn_in = 1000;
  int n_samples = 5000;
  int thinning = 1;
  int quad_order = 20;
  int chains = 1;
  uint64_t seed = 0;

  void validate() const {
    if (burn_in < 0) throw InvalidArgumentError("burn_in must be nonnegative");
    if (n_samples < 1) throw InvalidArgumentError("n_samples must be at least 1");
    if (thinning < 1) throw InvalidArgumentError("thinning must be at least 1");
    if (chains < 1) throw InvalidArgumentError("chains must be at least 1");
  }
};

/// Current position of one chain. The cached log-likelihood always matches
/// (values, params) under the owning context.
struct ChainState {
  GPValues values;
  HyperParams params;
  double log_like = 0.0;
  long long iteration = 0;
};

/// Test seam: replaces the context's collapsed data term when set.
using LikelihoodOverride = std::function<double(const GPValues&, const HyperParams&)>;

enum class MhOutcome { Accepted, Rejected, ConditioningRejected };

/// Metropolis-Hastings update of the hyperparameters with the prior as
/// proposal. The whitened coordinates of G are held fixed, so the Gaussian
/// prior and proposal terms cancel and the acceptance ratio is exactly the
/// likelihood ratio; on acceptance G is carried into the new parameterization
/// and the theta caches are rebuilt. A candidate whose covariance cannot be
/// factorized counts as a rejection.
MhOutcome mh_hyper_step(ChainState& state, PosteriorContext& ctx, std::mt19937_64& rng,
                        const LikelihoodOverride& override_likelihood = {});

/// One elliptical slice sampling update of the log-intensities at the
/// inducing points. Never rejects; throws SamplerError after 1000 bracket
/// shrinkages (which indicates a broken likelihood).
void ess_step(ChainState& state, PosteriorContext& ctx, std::mt19937_64& rng,
              const LikelihoodOverride& override_likelihood = {});

/// Post burn-in draws plus streaming predictive summaries at the data points.
struct PosteriorSamples {
  Eigen::MatrixXd g_draws;      // T x k, log-intensities at the inducing points
  Eigen::MatrixXd theta_draws;  // T x (1 + d): output scale, then input scales

  InducingSet inducing;
  double m_star = 0.0;
  Domain domain;
  HyperPrior prior;
  int quad_order = 20;
  uint64_t seed = 0;

  // Running summaries over draws, one entry per data point:
  // mean/variance of M[i] + Sigma_DD[i,i], mean of Sigma_DD[i,i], and mean of
  // exp(M[i] + 1.5 Sigma_DD[i,i]) (the conditional intensity mean).
  Eigen::VectorXd data_mean_tilted;
  Eigen::VectorXd data_m2_tilted;  // Welford sum of squared deviations
  Eigen::VectorXd data_mean_var;
  Eigen::VectorXd data_mean_intensity;
  Eigen::Index n_data = 0;

  double acceptance_rate = 0.0;
  double ess_per_1000 = 0.0;
  double wall_seconds = 0.0;
  long long conditioning_rejections = 0;

  // A sampler failure mid-run truncates the draws instead of discarding them.
  bool aborted = false;
  std::string abort_reason;

  Eigen::Index draw_count() const { return g_draws.rows(); }
  Eigen::Index num_inducing() const { return inducing.size(); }
};

/// One chain of the block Gibbs sampler (theta by Metropolis-Hastings, then G
/// by elliptical slice sampling), recording thinned post burn-in draws.
PosteriorSamples run_chain(const EventDataset& data, const InducingSet& inducing,
                           const SamplerConfig& config, const HyperPrior& prior,
                           std::mt19937_64& rng);

/// config.chains independent chains (concurrent when chains > 1) with draws
/// pooled in chain order. Seeds are derived deterministically from
/// config.seed.
PosteriorSamples fit_model(const EventDataset& data, const InducingSet& inducing,
                           const SamplerConfig& config, const HyperPrior& prior);

}  // namespace lgcp

#endif
