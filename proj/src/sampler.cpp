#include "lgcp/sampler.hpp"

#include "lgcp/diagnostics.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

namespace lgcp {

namespace {

constexpr int kMaxShrink = 1000;
constexpr int kMaxInitAttempts = 32;

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double eval_likelihood(const GPValues& values, const HyperParams& params, PosteriorContext& ctx,
                       const LikelihoodOverride& override_likelihood, bool staged) {
  if (override_likelihood) return override_likelihood(values, params);
  return staged ? ctx.staged_log_likelihood_term(values) : ctx.log_likelihood_term(values);
}

}  // namespace

MhOutcome mh_hyper_step(ChainState& state, PosteriorContext& ctx, std::mt19937_64& rng,
                        const LikelihoodOverride& override_likelihood) {
  const HyperParams proposal = sample_hyper(ctx.prior(), rng);
  try {
    ctx.stage_params(proposal);
  } catch (const ConditioningError&) {
    return MhOutcome::ConditioningRejected;
  }

  // Carry G across with its whitened coordinates fixed; the Gaussian term
  // then cancels along with the prior/proposal pair.
  GPValues candidate = state.values;
  candidate.log_lambda =
      ctx.staged_transform_from_current(state.values.centered()).array() + state.values.m_star;
  const double cand_log_like =
      eval_likelihood(candidate, proposal, ctx, override_likelihood, /*staged=*/true);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (std::log(unit(rng)) < cand_log_like - state.log_like) {
    ctx.commit_staged();
    state.values = std::move(candidate);
    state.params = proposal;
    state.log_like = cand_log_like;
    return MhOutcome::Accepted;
  }
  ctx.drop_staged();
  return MhOutcome::Rejected;
}

void ess_step(ChainState& state, PosteriorContext& ctx, std::mt19937_64& rng,
              const LikelihoodOverride& override_likelihood) {
  const double tau = 2.0 * std::numbers::pi;
  const Eigen::VectorXd nu = ctx.draw_prior_noise(rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const double threshold = state.log_like + std::log(unit(rng));
  double angle = tau * unit(rng);
  double lo = angle - tau, hi = angle;

  const Eigen::VectorXd centered = state.values.centered();
  GPValues candidate = state.values;
  for (int i = 0; i < kMaxShrink; ++i) {
    candidate.log_lambda = (std::cos(angle) * centered + std::sin(angle) * nu).array() +
                           state.values.m_star;
    const double cand_log_like =
        eval_likelihood(candidate, ctx.params(), ctx, override_likelihood, /*staged=*/false);
    if (cand_log_like > threshold) {
      state.values = std::move(candidate);
      state.log_like = cand_log_like;
      return;
    }
    if (angle < 0.0)
      lo = angle;
    else
      hi = angle;
    angle = lo + (hi - lo) * unit(rng);
  }
  throw SamplerError("elliptical slice sampling exceeded " + std::to_string(kMaxShrink) +
                     " shrinkage steps; the likelihood is inconsistent with the current state");
}

PosteriorSamples run_chain(const EventDataset& data, const InducingSet& inducing,
                           const SamplerConfig& config, const HyperPrior& prior,
                           std::mt19937_64& rng) {
  config.validate();
  data.validate();
  if (data.size() == 0) throw InvalidArgumentError("run_chain needs a nonempty dataset");
  if (inducing.size() == 0) throw InvalidArgumentError("run_chain needs a nonempty inducing set");

  const auto start_time = std::chrono::steady_clock::now();
  PosteriorContext ctx(data, inducing, prior, config.quad_order);

  // Some prior draws are unusable as a starting point: unfactorizable
  // covariances, or states the likelihood evaluates to -infinity. Retry a
  // bounded number of times before giving up.
  ChainState state;
  state.values.m_star = ctx.default_m_star();
  state.values.log_lambda = Eigen::VectorXd::Constant(inducing.size(), state.values.m_star);
  bool initialized = false;
  for (int attempt = 0; attempt < kMaxInitAttempts && !initialized; ++attempt) {
    try {
      ctx.set_params(sample_hyper(prior, rng));
    } catch (const ConditioningError&) {
      continue;
    }
    state.log_like = ctx.log_likelihood_term(state.values);
    initialized = std::isfinite(state.log_like);
  }
  if (!initialized)
    throw SamplerError("no usable starting hyperparameters found in " +
                       std::to_string(kMaxInitAttempts) + " prior draws");
  state.params = ctx.params();

  PosteriorSamples out;
  out.inducing = inducing;
  out.m_star = state.values.m_star;
  out.domain = data.domain;
  out.prior = prior;
  out.quad_order = config.quad_order;
  out.seed = config.seed;

  const Eigen::Index n = data.size();
  const int d = data.dim();
  const Eigen::Index k = inducing.size();
  out.g_draws.resize(config.n_samples, k);
  out.theta_draws.resize(config.n_samples, 1 + d);
  out.n_data = n;
  out.data_mean_tilted = Eigen::VectorXd::Zero(n);
  out.data_m2_tilted = Eigen::VectorXd::Zero(n);
  out.data_mean_var = Eigen::VectorXd::Zero(n);
  out.data_mean_intensity = Eigen::VectorXd::Zero(n);

  long long accepts = 0;
  const long long total = static_cast<long long>(config.burn_in) +
                          static_cast<long long>(config.n_samples) * config.thinning;
  Eigen::Index recorded = 0;
  long long completed = 0;
  for (long long it = 0; it < total; ++it) {
    try {
      switch (mh_hyper_step(state, ctx, rng)) {
        case MhOutcome::Accepted: ++accepts; break;
        case MhOutcome::Rejected: break;
        case MhOutcome::ConditioningRejected: ++out.conditioning_rejections; break;
      }
      ess_step(state, ctx, rng);
    } catch (const Error& err) {
      out.aborted = true;
      out.abort_reason = err.what();
      break;
    }
    state.iteration = it + 1;
    ++completed;

    const long long past_burn = it + 1 - config.burn_in;
    if (past_burn > 0 && past_burn % config.thinning == 0 && recorded < config.n_samples) {
      out.g_draws.row(recorded) = state.values.log_lambda.transpose();
      out.theta_draws(recorded, 0) = state.params.output_scale;
      out.theta_draws.row(recorded).tail(d) = state.params.input_scales.transpose();

      // Streaming per-draw predictive summaries at the data points.
      const Eigen::VectorXd means = ctx.data_means(state.values);
      const Eigen::VectorXd& diag = ctx.data_cond_diag();
      const double count = static_cast<double>(recorded + 1);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double tilted = means[i] + diag[i];
        const double delta = tilted - out.data_mean_tilted[i];
        out.data_mean_tilted[i] += delta / count;
        out.data_m2_tilted[i] += delta * (tilted - out.data_mean_tilted[i]);
        out.data_mean_var[i] += (diag[i] - out.data_mean_var[i]) / count;
        const double intensity = std::exp(tilted + 0.5 * diag[i]);
        out.data_mean_intensity[i] += (intensity - out.data_mean_intensity[i]) / count;
      }
      ++recorded;
    }
  }
  if (recorded < config.n_samples) {
    out.g_draws.conservativeResize(recorded, Eigen::NoChange);
    out.theta_draws.conservativeResize(recorded, Eigen::NoChange);
  }

  out.acceptance_rate =
      completed > 0 ? static_cast<double>(accepts) / static_cast<double>(completed) : 0.0;

  // Average per-component ESS of the recorded G series, scaled per 1000 draws.
  if (recorded >= 10) {
    double total_ess = 0.0;
    std::vector<double> series(static_cast<size_t>(recorded));
    for (Eigen::Index j = 0; j < k; ++j) {
      for (Eigen::Index t = 0; t < recorded; ++t) series[static_cast<size_t>(t)] = out.g_draws(t, j);
      total_ess += effective_sample_size(series);
    }
    out.ess_per_1000 =
        total_ess / static_cast<double>(k) * 1000.0 / static_cast<double>(recorded);
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return out;
}

namespace {

void merge_summaries(PosteriorSamples& pooled, const PosteriorSamples& part, Eigen::Index offset) {
  pooled.g_draws.middleRows(offset, part.draw_count()) = part.g_draws;
  pooled.theta_draws.middleRows(offset, part.draw_count()) = part.theta_draws;

  // Chan et al. parallel combination of the Welford accumulators.
  const double na = static_cast<double>(offset);
  const double nb = static_cast<double>(part.draw_count());
  if (nb == 0) return;
  if (na == 0) {
    pooled.data_mean_tilted = part.data_mean_tilted;
    pooled.data_m2_tilted = part.data_m2_tilted;
    pooled.data_mean_var = part.data_mean_var;
    pooled.data_mean_intensity = part.data_mean_intensity;
    return;
  }
  for (Eigen::Index i = 0; i < pooled.n_data; ++i) {
    const double delta = part.data_mean_tilted[i] - pooled.data_mean_tilted[i];
    pooled.data_m2_tilted[i] += part.data_m2_tilted[i] + delta * delta * na * nb / (na + nb);
    pooled.data_mean_tilted[i] += delta * nb / (na + nb);
    pooled.data_mean_var[i] += (part.data_mean_var[i] - pooled.data_mean_var[i]) * nb / (na + nb);
    pooled.data_mean_intensity[i] +=
        (part.data_mean_intensity[i] - pooled.data_mean_intensity[i]) * nb / (na + nb);
  }
}

}  // namespace

PosteriorSamples fit_model(const EventDataset& data, const InducingSet& inducing,
                           const SamplerConfig& config, const HyperPrior& prior) {
  config.validate();
  if (config.chains == 1) {
    std::mt19937_64 rng(config.seed);
    return run_chain(data, inducing, config, prior, rng);
  }

  const auto start_time = std::chrono::steady_clock::now();
  std::vector<PosteriorSamples> parts(config.chains);
  std::vector<std::exception_ptr> errors(config.chains);
  std::vector<std::thread> workers;
  workers.reserve(config.chains);
  for (int c = 0; c < config.chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        std::mt19937_64 rng(splitmix64(config.seed ^ (0x9e3779b97f4a7c15ULL * (c + 1))));
        parts[c] = run_chain(data, inducing, config, prior, rng);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  for (auto& part : parts)
    if (part.aborted) return std::move(part);  // partial results win over pooling

  PosteriorSamples pooled = parts.front();
  const Eigen::Index per_chain = pooled.draw_count();
  pooled.g_draws.conservativeResize(per_chain * config.chains, Eigen::NoChange);
  pooled.theta_draws.conservativeResize(per_chain * config.chains, Eigen::NoChange);

  double total_ess = 0.0;
  long long cond_rejects = 0;
  double acceptance = 0.0;
  for (int c = 0; c < config.chains; ++c) {
    if (c > 0) merge_summaries(pooled, parts[c], per_chain * c);
    total_ess += parts[c].ess_per_1000 * per_chain / 1000.0;
    cond_rejects += parts[c].conditioning_rejections;
    acceptance += parts[c].acceptance_rate;
  }
  pooled.acceptance_rate = acceptance / config.chains;
  pooled.conditioning_rejections = cond_rejects;
  pooled.ess_per_1000 = total_ess * 1000.0 / static_cast<double>(pooled.draw_count());
  pooled.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  return pooled;
}

}  // namespace lgcp
