#include "lgcp/inducing.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace lgcp {

namespace {

// Conditional variance below this fraction of h^2 marks a candidate as
// already determined by the current set; its gain is defined as zero.
constexpr double kDenomFloor = 1e-10;

// Per-hyperparameter-sample state for the incremental utility of adding one
// point to a fixed current set. Uses the block-inverse identity: conditioning
// additionally on s reduces the variance at d by gamma_{D'}(d,s)^2 /
// gamma_{D'}(s,s).
struct IncrementalState {
  const HyperParams* params = nullptr;
  const Eigen::MatrixXd* inducing = nullptr;  // current D', k x d
  const Eigen::MatrixXd* data = nullptr;      // m x d
  double h2 = 0.0;
  Eigen::MatrixXd chol_lower;  // k x k, empty when D' is empty
  Eigen::MatrixXd white_data;  // k x m, L^-1 Sigma*_{D', data}

  void build(const Eigen::MatrixXd& current, const Eigen::MatrixXd& data_points,
             const HyperParams& theta) {
    params = &theta;
    inducing = &current;
    data = &data_points;
    h2 = theta.output_scale * theta.output_scale;
    if (current.rows() > 0) {
      ConditionalGP gp(InducingSet{current}, theta);
      chol_lower = gp.chol_lower();
      white_data = gp.whiten_cross(data_points);
    } else {
      chol_lower.resize(0, 0);
      white_data.resize(0, data_points.rows());
    }
  }

  double gain(const Eigen::VectorXd& s) const {
    Eigen::VectorXd cross = gram(*data, s.transpose(), *params).col(0);  // m
    if (chol_lower.rows() == 0) return cross.squaredNorm() / h2;

    Eigen::VectorXd v = gram(*inducing, s.transpose(), *params).col(0);  // k
    chol_lower.triangularView<Eigen::Lower>().solveInPlace(v);
    const double denom = h2 - v.squaredNorm();
    if (denom < kDenomFloor * h2) return 0.0;
    const double resid = (cross - white_data.transpose() * v).squaredNorm();
    return resid / denom;
  }
};

// Average incremental gain over the hyperparameter samples. When the data
// are a subsample this is the full utility up to the constant n/m factor,
// which cannot change the argmax.
struct GainObjective {
  std::vector<IncrementalState> states;

  void build(const Eigen::MatrixXd& current, const Eigen::MatrixXd& data_points,
             const std::vector<HyperParams>& thetas) {
    states.resize(thetas.size());
    for (size_t i = 0; i < thetas.size(); ++i) states[i].build(current, data_points, thetas[i]);
  }

  double operator()(const Eigen::VectorXd& s) const {
    double total = 0.0;
    for (const auto& st : states) total += st.gain(s);
    return total / static_cast<double>(states.size());
  }
};

Eigen::VectorXd clamp_to_domain(Eigen::VectorXd s, const Domain& domain) {
  for (Eigen::Index j = 0; j < s.size(); ++j)
    s[j] = std::clamp(s[j], domain.lower[j], domain.upper[j]);
  return s;
}

// Nelder-Mead ascent of `objective` over the rectangle, tracking the best
// point ever evaluated. Good enough here: the objective is cheap, smooth and
// low-dimensional.
template <typename F>
std::pair<Eigen::VectorXd, double> nelder_mead_maximize(const F& objective,
                                                        const Eigen::VectorXd& start,
                                                        const Domain& domain, int max_iterations) {
  const int d = domain.dim();
  const Eigen::VectorXd extent = domain.upper - domain.lower;

  std::vector<Eigen::VectorXd> simplex;
  simplex.push_back(clamp_to_domain(start, domain));
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd v = simplex[0];
    const double step = 0.05 * extent[j];
    v[j] = (v[j] + step <= domain.upper[j]) ? v[j] + step : v[j] - step;
    simplex.push_back(v);
  }

  std::vector<double> value(simplex.size());
  Eigen::VectorXd best_point = simplex[0];
  double best_value = -std::numeric_limits<double>::infinity();
  auto eval = [&](const Eigen::VectorXd& raw) {
    const Eigen::VectorXd s = clamp_to_domain(raw, domain);
    const double f = objective(s);
    if (f > best_value) {
      best_value = f;
      best_point = s;
    }
    return f;
  };
  for (size_t i = 0; i < simplex.size(); ++i) value[i] = eval(simplex[i]);

  std::vector<size_t> order(simplex.size());
  for (int it = 0; it < max_iterations; ++it) {
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return value[a] > value[b]; });
    const size_t hi = order.back(), lo = order.front();

    double diameter = 0.0;
    for (size_t i = 1; i < simplex.size(); ++i)
      diameter = std::max(diameter, (simplex[order[i]] - simplex[lo]).norm());
    if (diameter < 1e-11 * extent.norm()) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (size_t i = 0; i + 1 < order.size(); ++i) centroid += simplex[order[i]];
    centroid /= static_cast<double>(order.size() - 1);

    const Eigen::VectorXd reflected = centroid + (centroid - simplex[hi]);
    const double f_ref = eval(reflected);
    if (f_ref > value[lo]) {
      const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[hi]);
      const double f_exp = eval(expanded);
      if (f_exp > f_ref) {
        simplex[hi] = clamp_to_domain(expanded, domain);
        value[hi] = f_exp;
      } else {
        simplex[hi] = clamp_to_domain(reflected, domain);
        value[hi] = f_ref;
      }
    } else if (f_ref > value[order[order.size() - 2]]) {
      simplex[hi] = clamp_to_domain(reflected, domain);
      value[hi] = f_ref;
    } else {
      const Eigen::VectorXd contracted = centroid + 0.5 * (simplex[hi] - centroid);
      const double f_con = eval(contracted);
      if (f_con > value[hi]) {
        simplex[hi] = clamp_to_domain(contracted, domain);
        value[hi] = f_con;
      } else {
        for (size_t i = 0; i < simplex.size(); ++i) {
          if (i == lo) continue;
          simplex[i] = clamp_to_domain(simplex[lo] + 0.5 * (simplex[i] - simplex[lo]), domain);
          value[i] = eval(simplex[i]);
        }
      }
    }
  }
  return {best_point, best_value};
}

std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index m,
                                                     std::mt19937_64& rng) {
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < m; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(m);
  return idx;
}

}  // namespace

Eigen::Index SelectionTrace::recommended_size() const {
  const Eigen::Index k = size();
  if (k <= 1) return k;
  const double u_last = utilities[k - 1], u_prev = utilities[k - 2];
  if (u_last > 0.0 && (u_last - u_prev) / u_last < alpha) return k - 1;
  return k;
}

double utility(const Eigen::MatrixXd& candidate_set, const Eigen::MatrixXd& data,
               const std::vector<HyperParams>& theta_samples) {
  if (candidate_set.rows() == 0) return 0.0;
  if (theta_samples.empty()) throw InvalidArgumentError("utility needs hyperparameter samples");
  double total = 0.0;
  for (size_t i = 0; i < theta_samples.size(); ++i) {
    try {
      total += trace_reduction(data, InducingSet{candidate_set}, theta_samples[i]);
    } catch (const ConditioningError& err) {
      throw ConditioningError("hyperparameter sample " + std::to_string(i) + ": " + err.what());
    }
  }
  return total / static_cast<double>(theta_samples.size());
}

Eigen::VectorXd argmax_next_point(const InducingSet& current, const Eigen::MatrixXd& data,
                                  const std::vector<HyperParams>& theta_samples,
                                  const Domain& domain, const MaximizerSettings& settings,
                                  std::mt19937_64& rng) {
  domain.validate();
  if (data.rows() == 0) throw InvalidArgumentError("argmax_next_point needs data");

  GainObjective objective;
  objective.build(current.locations, data, theta_samples);

  // Rank a data subsample by incremental gain; the best seeds start the
  // local searches and stay in the candidate pool.
  const Eigen::Index n_rank = std::min<Eigen::Index>(data.rows(), settings.seed_candidates);
  std::vector<Eigen::Index> ranked =
      n_rank == data.rows()
          ? [&] {
              std::vector<Eigen::Index> all(data.rows());
              std::iota(all.begin(), all.end(), Eigen::Index{0});
              return all;
            }()
          : sample_without_replacement(data.rows(), n_rank, rng);

  std::vector<std::pair<double, Eigen::Index>> scored;
  scored.reserve(ranked.size());
  for (Eigen::Index idx : ranked)
    scored.emplace_back(objective(data.row(idx).transpose()), idx);
  std::sort(scored.begin(), scored.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  Eigen::VectorXd best_point = data.row(scored.front().second).transpose();
  double best_value = scored.front().first;

  const int data_starts = std::min<int>(settings.restarts / 2, static_cast<int>(scored.size()));
  std::vector<Eigen::VectorXd> starts;
  for (int i = 0; i < data_starts; ++i) starts.push_back(data.row(scored[i].second).transpose());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = data_starts; i < settings.restarts; ++i) {
    Eigen::VectorXd s(domain.dim());
    for (int j = 0; j < domain.dim(); ++j)
      s[j] = domain.lower[j] + (domain.upper[j] - domain.lower[j]) * unit(rng);
    starts.push_back(s);
  }

  for (const auto& start : starts) {
    auto [point, value] = nelder_mead_maximize(objective, start, domain, settings.max_iterations);
    if (value > best_value) {
      best_value = value;
      best_point = point;
    }
  }
  return best_point;
}

SelectionTrace select_inducing_points(const Eigen::MatrixXd& data, const Domain& domain,
                                      const SelectionConfig& config, std::mt19937_64& rng) {
  config.validate();
  domain.validate();
  if (data.rows() == 0) throw InvalidArgumentError("selection needs a nonempty dataset");
  if (data.cols() != domain.dim())
    throw InvalidArgumentError("data dimension does not match domain dimension");

  SelectionTrace trace;
  trace.alpha = config.alpha;
  trace.theta_samples.reserve(config.num_theta_samples);
  for (int i = 0; i < config.num_theta_samples; ++i)
    trace.theta_samples.push_back(sample_hyper(config.prior, rng));

  const double n = static_cast<double>(data.rows());
  trace.w_inf = 0.0;
  for (const auto& theta : trace.theta_samples)
    trace.w_inf += n * theta.output_scale * theta.output_scale;
  trace.w_inf /= static_cast<double>(trace.theta_samples.size());

  // The inner maximizer works on a fixed subsample when the dataset is large;
  // reported utilities always use the full dataset.
  Eigen::MatrixXd working = data;
  if (data.rows() > config.subsample_limit) {
    auto idx = sample_without_replacement(data.rows(), config.subsample_limit, rng);
    working.resize(config.subsample_limit, data.cols());
    for (Eigen::Index i = 0; i < config.subsample_limit; ++i) working.row(i) = data.row(idx[i]);
  }

  trace.points.resize(0, data.cols());
  double u_prev = 0.0;
  double e = 1.0;  // u_0 = 0, so the first iteration never stops
  while (e > config.alpha) {
    if (trace.size() >= config.max_points) {
      throw SelectionError("selection exceeded the cap of " + std::to_string(config.max_points) +
                           " points at relative gain " + std::to_string(e) + " (" +
                           std::to_string(trace.size()) + " points chosen, last utility " +
                           std::to_string(u_prev) + ")");
    }
    Eigen::VectorXd next = argmax_next_point(InducingSet{trace.points}, working,
                                             trace.theta_samples, domain, config.maximizer, rng);

    Eigen::MatrixXd extended(trace.size() + 1, data.cols());
    extended.topRows(trace.size()) = trace.points;
    extended.row(trace.size()) = next.transpose();

    const double u = utility(extended, data, trace.theta_samples);
    trace.points = std::move(extended);
    trace.utilities.push_back(u);
    e = (u - u_prev) / u;
    u_prev = u;
  }
  return trace;
}

}  // namespace lgcp
