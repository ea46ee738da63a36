#include "lgcp.h"

#include "lgcp/diagnostics.hpp"
#include "lgcp/inducing.hpp"
#include "lgcp/metrics.hpp"
#include "lgcp/predict.hpp"
#include "lgcp/sampler.hpp"
#include "lgcp/simulate.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <random>
#include <string>

using nlohmann::json;

struct lgcp_intensity {
  lgcp::IntensitySpec spec;
};
struct lgcp_dataset {
  lgcp::EventDataset data;
};
struct lgcp_selection {
  lgcp::SelectionTrace trace;
};
struct lgcp_samples {
  lgcp::PosteriorSamples samples;
};
struct lgcp_estimate {
  lgcp::IntensityEstimate estimate;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
lgcp_status wrap(F&& body) noexcept {
  try {
    body();
    return LGCP_OK;
  } catch (const lgcp::InvalidArgumentError& e) {
    g_last_error = e.what();
    return LGCP_ERROR_INVALID_ARGUMENT;
  } catch (const lgcp::DataError& e) {
    g_last_error = e.what();
    return LGCP_ERROR_DATA;
  } catch (const lgcp::ConditioningError& e) {
    g_last_error = e.what();
    return LGCP_ERROR_NUMERICAL;
  } catch (const lgcp::RangeError& e) {
    g_last_error = e.what();
    return LGCP_ERROR_NUMERICAL;
  } catch (const lgcp::SamplerError& e) {
    g_last_error = e.what();
    return LGCP_ERROR_NUMERICAL;
  } catch (const lgcp::SelectionError& e) {
    g_last_error = e.what();
    return LGCP_ERROR_NUMERICAL;
  } catch (const std::ios_base::failure& e) {
    g_last_error = e.what();
    return LGCP_ERROR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LGCP_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return LGCP_ERROR_INTERNAL;
  }
}

lgcp_status invalid(const char* message) noexcept {
  g_last_error = message;
  return LGCP_ERROR_INVALID_ARGUMENT;
}

lgcp::Domain make_domain(const double* lower, const double* upper, size_t dim) {
  if (!lower || !upper || dim == 0) throw lgcp::InvalidArgumentError("domain bounds are required");
  Eigen::VectorXd lo(dim), hi(dim);
  for (size_t j = 0; j < dim; ++j) {
    lo[j] = lower[j];
    hi[j] = upper[j];
  }
  return {lo, hi};
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

Eigen::MatrixXd matrix_from_json(const json& j, Eigen::Index cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != cols)
      throw lgcp::DataError("ragged matrix in samples file");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(i), c) = j[i][static_cast<size_t>(c)].get<double>();
  }
  return m;
}

}  // namespace

extern "C" {

const char* lgcp_last_error(void) { return g_last_error.c_str(); }

const char* lgcp_version(void) { return "1.0.0"; }

/* -------- intensity -------- */

lgcp_status lgcp_intensity_create_synthetic_bimodal(lgcp_intensity** out) {
  if (!out) return invalid("null output pointer");
  return wrap([&] { *out = new lgcp_intensity{lgcp::IntensitySpec::synthetic_bimodal()}; });
}

lgcp_status lgcp_intensity_create_constant(double value, const double* lower, const double* upper,
                                           size_t dim, lgcp_intensity** out) {
  if (!out) return invalid("null output pointer");
  return wrap([&] {
    *out = new lgcp_intensity{
        lgcp::IntensitySpec::constant_rate(value, make_domain(lower, upper, dim))};
  });
}

lgcp_status lgcp_intensity_create_piecewise(const double* edges, size_t n_edges,
                                            const double* values, lgcp_intensity** out) {
  if (!out || !edges || !values) return invalid("null pointer argument");
  return wrap([&] {
    Eigen::VectorXd e = Eigen::Map<const Eigen::VectorXd>(edges, n_edges);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(values, n_edges > 0 ? n_edges - 1 : 0);
    *out = new lgcp_intensity{lgcp::IntensitySpec::piecewise(e, v)};
  });
}

lgcp_status lgcp_intensity_create_tabulated(const double* lower, const double* upper, size_t dim,
                                            const size_t* shape, const double* table,
                                            lgcp_intensity** out) {
  if (!out || !shape || !table) return invalid("null pointer argument");
  return wrap([&] {
    std::vector<Eigen::Index> sh(dim);
    Eigen::Index total = 1;
    for (size_t j = 0; j < dim; ++j) {
      sh[j] = static_cast<Eigen::Index>(shape[j]);
      total *= sh[j];
    }
    Eigen::VectorXd values = Eigen::Map<const Eigen::VectorXd>(table, total);
    *out = new lgcp_intensity{
        lgcp::IntensitySpec::tabulated(make_domain(lower, upper, dim), sh, values)};
  });
}

lgcp_status lgcp_intensity_scale(lgcp_intensity* intensity, double factor) {
  if (!intensity) return invalid("null intensity");
  return wrap([&] { intensity->spec = intensity->spec.scaled(factor); });
}

lgcp_status lgcp_intensity_eval(const lgcp_intensity* intensity, const double* point, double* out) {
  if (!intensity || !point || !out) return invalid("null pointer argument");
  return wrap([&] {
    Eigen::VectorXd s = Eigen::Map<const Eigen::VectorXd>(point, intensity->spec.domain.dim());
    *out = intensity->spec.eval(s);
  });
}

lgcp_status lgcp_intensity_integral(const lgcp_intensity* intensity, int quad_order, double* out) {
  if (!intensity || !out) return invalid("null pointer argument");
  return wrap([&] { *out = lgcp::integral_of(intensity->spec, quad_order); });
}

lgcp_status lgcp_intensity_domain(const lgcp_intensity* intensity, size_t* dim, double* lower,
                                  double* upper) {
  if (!intensity) return invalid("null intensity");
  return wrap([&] {
    const lgcp::Domain& d = intensity->spec.domain;
    if (dim) *dim = static_cast<size_t>(d.dim());
    for (int j = 0; j < d.dim(); ++j) {
      if (lower) lower[j] = d.lower[j];
      if (upper) upper[j] = d.upper[j];
    }
  });
}

void lgcp_intensity_destroy(lgcp_intensity* intensity) { delete intensity; }

/* -------- datasets -------- */

lgcp_status lgcp_dataset_create(const double* points, size_t n, size_t dim, const double* lower,
                                const double* upper, lgcp_dataset** out) {
  if (!out || (n > 0 && !points)) return invalid("null pointer argument");
  return wrap([&] {
    lgcp::EventDataset data;
    data.domain = make_domain(lower, upper, dim);
    data.points.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < dim; ++j)
        data.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            points[i * dim + j];
    data.validate();
    *out = new lgcp_dataset{std::move(data)};
  });
}

lgcp_status lgcp_simulate(const lgcp_intensity* intensity, uint64_t seed, lgcp_dataset** out) {
  if (!intensity || !out) return invalid("null pointer argument");
  return wrap([&] {
    std::mt19937_64 rng(seed);
    *out = new lgcp_dataset{lgcp::simulate(intensity->spec, rng)};
  });
}

size_t lgcp_dataset_size(const lgcp_dataset* dataset) {
  return dataset ? static_cast<size_t>(dataset->data.size()) : 0;
}

size_t lgcp_dataset_dim(const lgcp_dataset* dataset) {
  return dataset ? static_cast<size_t>(dataset->data.dim()) : 0;
}

lgcp_status lgcp_dataset_points(const lgcp_dataset* dataset, double* out) {
  if (!dataset || !out) return invalid("null pointer argument");
  return wrap([&] {
    const Eigen::MatrixXd& p = dataset->data.points;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j) out[i * p.cols() + j] = p(i, j);
  });
}

lgcp_status lgcp_dataset_domain(const lgcp_dataset* dataset, double* lower, double* upper) {
  if (!dataset) return invalid("null dataset");
  return wrap([&] {
    for (int j = 0; j < dataset->data.dim(); ++j) {
      if (lower) lower[j] = dataset->data.domain.lower[j];
      if (upper) upper[j] = dataset->data.domain.upper[j];
    }
  });
}

void lgcp_dataset_destroy(lgcp_dataset* dataset) { delete dataset; }

/* -------- selection -------- */

void lgcp_select_options_init(lgcp_select_options* options) {
  if (!options) return;
  options->h_max = 10.0;
  options->l_max = 25.0;
  options->num_theta = 20;
  options->alpha = 1e-3;
  options->max_points = 256;
  options->restarts = 8;
  options->max_iterations = 400;
  options->seed = 0;
}

lgcp_status lgcp_select(const lgcp_dataset* dataset, const lgcp_select_options* options,
                        lgcp_selection** out) {
  if (!dataset || !options || !out) return invalid("null pointer argument");
  return wrap([&] {
    const int d = dataset->data.dim();
    lgcp::SelectionConfig config;
    config.alpha = options->alpha;
    config.num_theta_samples = options->num_theta;
    config.prior = lgcp::HyperPrior(options->h_max,
                                    Eigen::VectorXd::Constant(d, options->l_max));
    config.maximizer.restarts = options->restarts;
    config.maximizer.max_iterations = options->max_iterations;
    config.max_points = options->max_points;
    std::mt19937_64 rng(options->seed);
    *out = new lgcp_selection{
        lgcp::select_inducing_points(dataset->data.points, dataset->data.domain, config, rng)};
  });
}

size_t lgcp_selection_size(const lgcp_selection* selection) {
  return selection ? static_cast<size_t>(selection->trace.size()) : 0;
}

size_t lgcp_selection_recommended_size(const lgcp_selection* selection) {
  return selection ? static_cast<size_t>(selection->trace.recommended_size()) : 0;
}

size_t lgcp_selection_dim(const lgcp_selection* selection) {
  return selection ? static_cast<size_t>(selection->trace.points.cols()) : 0;
}

lgcp_status lgcp_selection_point(const lgcp_selection* selection, size_t index, double* out) {
  if (!selection || !out) return invalid("null pointer argument");
  if (index >= static_cast<size_t>(selection->trace.size())) return invalid("point index out of range");
  return wrap([&] {
    for (Eigen::Index j = 0; j < selection->trace.points.cols(); ++j)
      out[j] = selection->trace.points(static_cast<Eigen::Index>(index), j);
  });
}

lgcp_status lgcp_selection_utility(const lgcp_selection* selection, size_t index, double* out) {
  if (!selection || !out) return invalid("null pointer argument");
  if (index >= selection->trace.utilities.size()) return invalid("utility index out of range");
  *out = selection->trace.utilities[index];
  return LGCP_OK;
}

lgcp_status lgcp_selection_w_inf(const lgcp_selection* selection, double* out) {
  if (!selection || !out) return invalid("null pointer argument");
  *out = selection->trace.w_inf;
  return LGCP_OK;
}

size_t lgcp_selection_num_theta(const lgcp_selection* selection) {
  return selection ? selection->trace.theta_samples.size() : 0;
}

lgcp_status lgcp_selection_theta(const lgcp_selection* selection, size_t index, double* h,
                                 double* l) {
  if (!selection || !h || !l) return invalid("null pointer argument");
  if (index >= selection->trace.theta_samples.size()) return invalid("theta index out of range");
  const lgcp::HyperParams& params = selection->trace.theta_samples[index];
  *h = params.output_scale;
  for (int j = 0; j < params.dim(); ++j) l[j] = params.input_scales[j];
  return LGCP_OK;
}

void lgcp_selection_destroy(lgcp_selection* selection) { delete selection; }

/* -------- sampling -------- */

void lgcp_fit_options_init(lgcp_fit_options* options) {
  if (!options) return;
  options->h_max = 10.0;
  options->l_max = 25.0;
  options->quad_order = 20;
  options->burn_in = 1000;
  options->n_samples = 5000;
  options->thinning = 1;
  options->chains = 1;
  options->seed = 0;
}

lgcp_status lgcp_fit(const lgcp_dataset* dataset, const double* inducing, size_t k,
                     const lgcp_fit_options* options, lgcp_samples** out) {
  if (!dataset || !inducing || !options || !out) return invalid("null pointer argument");
  return wrap([&] {
    const int d = dataset->data.dim();
    lgcp::InducingSet set;
    set.locations.resize(static_cast<Eigen::Index>(k), d);
    for (size_t i = 0; i < k; ++i)
      for (int j = 0; j < d; ++j)
        set.locations(static_cast<Eigen::Index>(i), j) = inducing[i * static_cast<size_t>(d) + j];

    lgcp::SamplerConfig config;
    config.burn_in = options->burn_in;
    config.n_samples = options->n_samples;
    config.thinning = options->thinning;
    config.quad_order = options->quad_order;
    config.chains = options->chains;
    config.seed = options->seed;
    lgcp::HyperPrior prior(options->h_max, Eigen::VectorXd::Constant(d, options->l_max));
    *out = new lgcp_samples{lgcp::fit_model(dataset->data, set, config, prior)};
  });
}

size_t lgcp_samples_num_draws(const lgcp_samples* samples) {
  return samples ? static_cast<size_t>(samples->samples.draw_count()) : 0;
}

size_t lgcp_samples_num_inducing(const lgcp_samples* samples) {
  return samples ? static_cast<size_t>(samples->samples.num_inducing()) : 0;
}

size_t lgcp_samples_dim(const lgcp_samples* samples) {
  return samples ? static_cast<size_t>(samples->samples.domain.dim()) : 0;
}

lgcp_status lgcp_samples_g_draw(const lgcp_samples* samples, size_t index, double* out) {
  if (!samples || !out) return invalid("null pointer argument");
  if (index >= static_cast<size_t>(samples->samples.draw_count()))
    return invalid("draw index out of range");
  const auto row = samples->samples.g_draws.row(static_cast<Eigen::Index>(index));
  for (Eigen::Index j = 0; j < row.size(); ++j) out[j] = row[j];
  return LGCP_OK;
}

lgcp_status lgcp_samples_theta_draw(const lgcp_samples* samples, size_t index, double* h,
                                    double* l) {
  if (!samples || !h || !l) return invalid("null pointer argument");
  if (index >= static_cast<size_t>(samples->samples.draw_count()))
    return invalid("draw index out of range");
  const auto row = samples->samples.theta_draws.row(static_cast<Eigen::Index>(index));
  *h = row[0];
  for (Eigen::Index j = 1; j < row.size(); ++j) l[j - 1] = row[j];
  return LGCP_OK;
}

lgcp_status lgcp_samples_stats(const lgcp_samples* samples, double* acceptance_rate,
                               double* ess_per_1000, double* wall_seconds,
                               int64_t* conditioning_rejections) {
  if (!samples) return invalid("null samples");
  if (acceptance_rate) *acceptance_rate = samples->samples.acceptance_rate;
  if (ess_per_1000) *ess_per_1000 = samples->samples.ess_per_1000;
  if (wall_seconds) *wall_seconds = samples->samples.wall_seconds;
  if (conditioning_rejections) *conditioning_rejections = samples->samples.conditioning_rejections;
  return LGCP_OK;
}

lgcp_status lgcp_samples_save(const lgcp_samples* samples, const char* path) {
  if (!samples || !path) return invalid("null pointer argument");
  return wrap([&] {
    const lgcp::PosteriorSamples& s = samples->samples;
    json j;
    j["format"] = "lgcp-samples-v1";
    j["dim"] = s.domain.dim();
    j["k"] = s.num_inducing();
    j["m_star"] = s.m_star;
    j["domain_lower"] = vector_to_json(s.domain.lower);
    j["domain_upper"] = vector_to_json(s.domain.upper);
    j["h_max"] = s.prior.max_output_scale;
    j["l_max"] = vector_to_json(s.prior.max_input_scales);
    j["quad_order"] = s.quad_order;
    j["seed"] = s.seed;
    j["inducing"] = matrix_to_json(s.inducing.locations);
    j["g_draws"] = matrix_to_json(s.g_draws);
    j["theta_draws"] = matrix_to_json(s.theta_draws);
    j["n_data"] = s.n_data;
    j["data_mean_tilted"] = vector_to_json(s.data_mean_tilted);
    j["data_m2_tilted"] = vector_to_json(s.data_m2_tilted);
    j["data_mean_var"] = vector_to_json(s.data_mean_var);
    j["data_mean_intensity"] = vector_to_json(s.data_mean_intensity);
    j["acceptance_rate"] = s.acceptance_rate;
    j["ess_per_1000"] = s.ess_per_1000;
    j["conditioning_rejections"] = s.conditioning_rejections;
    j["aborted"] = s.aborted;
    if (s.aborted) j["abort_reason"] = s.abort_reason;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::ios_base::failure(std::string("cannot open for writing: ") + path);
    out << j.dump(1) << "\n";
    if (!out) throw std::ios_base::failure(std::string("write failed: ") + path);
  });
}

lgcp_status lgcp_samples_load(const char* path, lgcp_samples** out) {
  if (!path || !out) return invalid("null pointer argument");
  return wrap([&] {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::ios_base::failure(std::string("cannot open: ") + path);
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw lgcp::DataError(std::string("malformed samples file: ") + e.what());
    }
    try {
      if (j.at("format") != "lgcp-samples-v1") throw lgcp::DataError("unknown samples format");
      lgcp::PosteriorSamples s;
      const Eigen::Index dim = j.at("dim").get<Eigen::Index>();
      const Eigen::Index k = j.at("k").get<Eigen::Index>();
      s.m_star = j.at("m_star").get<double>();
      s.domain = lgcp::Domain(vector_from_json(j.at("domain_lower")),
                              vector_from_json(j.at("domain_upper")));
      s.prior = lgcp::HyperPrior(j.at("h_max").get<double>(), vector_from_json(j.at("l_max")));
      s.quad_order = j.at("quad_order").get<int>();
      s.seed = j.at("seed").get<uint64_t>();
      s.inducing = lgcp::InducingSet{matrix_from_json(j.at("inducing"), dim)};
      s.g_draws = matrix_from_json(j.at("g_draws"), k);
      s.theta_draws = matrix_from_json(j.at("theta_draws"), 1 + dim);
      s.n_data = j.at("n_data").get<Eigen::Index>();
      s.data_mean_tilted = vector_from_json(j.at("data_mean_tilted"));
      s.data_m2_tilted = vector_from_json(j.at("data_m2_tilted"));
      s.data_mean_var = vector_from_json(j.at("data_mean_var"));
      s.data_mean_intensity = vector_from_json(j.at("data_mean_intensity"));
      s.acceptance_rate = j.at("acceptance_rate").get<double>();
      s.ess_per_1000 = j.at("ess_per_1000").get<double>();
      s.conditioning_rejections = j.at("conditioning_rejections").get<long long>();
      s.aborted = j.value("aborted", false);
      s.abort_reason = j.value("abort_reason", std::string());
      s.wall_seconds = std::numeric_limits<double>::quiet_NaN();
      *out = new lgcp_samples{std::move(s)};
    } catch (const json::exception& e) {
      throw lgcp::DataError(std::string("incomplete samples file: ") + e.what());
    }
  });
}

void lgcp_samples_destroy(lgcp_samples* samples) { delete samples; }

int lgcp_samples_aborted(const lgcp_samples* samples) {
  return samples && samples->samples.aborted ? 1 : 0;
}

const char* lgcp_samples_abort_reason(const lgcp_samples* samples) {
  return samples ? samples->samples.abort_reason.c_str() : "";
}

/* -------- prediction -------- */

lgcp_status lgcp_predict_at_data(const lgcp_samples* samples, const lgcp_dataset* dataset,
                                 lgcp_estimate** out) {
  if (!samples || !dataset || !out) return invalid("null pointer argument");
  return wrap([&] {
    *out = new lgcp_estimate{lgcp::predictive_at_data(samples->samples, dataset->data)};
  });
}

lgcp_status lgcp_predict_on_grid(const lgcp_samples* samples, const double* grid, size_t m,
                                 lgcp_estimate** out) {
  if (!samples || !grid || !out) return invalid("null pointer argument");
  return wrap([&] {
    const int d = samples->samples.domain.dim();
    Eigen::MatrixXd g(static_cast<Eigen::Index>(m), d);
    for (size_t i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j)
        g(static_cast<Eigen::Index>(i), j) = grid[i * static_cast<size_t>(d) + j];
    *out = new lgcp_estimate{lgcp::predictive_on_grid(samples->samples, g)};
  });
}

lgcp_status lgcp_estimate_create(const double* locations, size_t m, size_t dim,
                                 const double* log_mean, const double* log_var,
                                 const double* intensity_mean, lgcp_estimate** out) {
  if (!locations || !log_mean || !log_var || !intensity_mean || !out)
    return invalid("null pointer argument");
  return wrap([&] {
    lgcp::IntensityEstimate est;
    est.locations.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(dim));
    for (size_t i = 0; i < m; ++i)
      for (size_t j = 0; j < dim; ++j)
        est.locations(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            locations[i * dim + j];
    est.log_mean = Eigen::Map<const Eigen::VectorXd>(log_mean, m);
    est.log_var = Eigen::Map<const Eigen::VectorXd>(log_var, m);
    est.intensity_mean = Eigen::Map<const Eigen::VectorXd>(intensity_mean, m);
    *out = new lgcp_estimate{std::move(est)};
  });
}

size_t lgcp_estimate_size(const lgcp_estimate* estimate) {
  return estimate ? static_cast<size_t>(estimate->estimate.size()) : 0;
}

size_t lgcp_estimate_dim(const lgcp_estimate* estimate) {
  return estimate ? static_cast<size_t>(estimate->estimate.dim()) : 0;
}

lgcp_status lgcp_estimate_row(const lgcp_estimate* estimate, size_t index, double* location,
                              double* log_mean, double* log_var, double* intensity_mean) {
  if (!estimate) return invalid("null estimate");
  if (index >= static_cast<size_t>(estimate->estimate.size()))
    return invalid("estimate index out of range");
  const Eigen::Index i = static_cast<Eigen::Index>(index);
  if (location)
    for (int j = 0; j < estimate->estimate.dim(); ++j)
      location[j] = estimate->estimate.locations(i, j);
  if (log_mean) *log_mean = estimate->estimate.log_mean[i];
  if (log_var) *log_var = estimate->estimate.log_var[i];
  if (intensity_mean) *intensity_mean = estimate->estimate.intensity_mean[i];
  return LGCP_OK;
}

void lgcp_estimate_destroy(lgcp_estimate* estimate) { delete estimate; }

/* -------- evaluation -------- */

lgcp_status lgcp_normalized_errors(const lgcp_estimate* estimate, const lgcp_intensity* truth,
                                   double* mae, double* rmse) {
  if (!estimate || !truth || !mae || !rmse) return invalid("null pointer argument");
  return wrap([&] {
    auto [m, r] = lgcp::normalized_errors(estimate->estimate, truth->spec);
    *mae = m;
    *rmse = r;
  });
}

namespace {

std::vector<lgcp::EventDataset> collect_heldout(const lgcp_dataset* const* heldout,
                                                size_t n_heldout) {
  if (!heldout || n_heldout == 0) throw lgcp::InvalidArgumentError("no held-out datasets");
  std::vector<lgcp::EventDataset> draws;
  draws.reserve(n_heldout);
  for (size_t i = 0; i < n_heldout; ++i) {
    if (!heldout[i]) throw lgcp::InvalidArgumentError("null held-out dataset");
    if (i > 0 && (heldout[i]->data.domain.lower != heldout[0]->data.domain.lower ||
                  heldout[i]->data.domain.upper != heldout[0]->data.domain.upper))
      throw lgcp::DataError("held-out datasets disagree on the domain");
    draws.push_back(heldout[i]->data);
  }
  return draws;
}

}  // namespace

lgcp_status lgcp_log_predictive(const lgcp_estimate* estimate, const lgcp_dataset* const* heldout,
                                size_t n_heldout, double* mean, double* sd) {
  if (!estimate || !mean || !sd) return invalid("null pointer argument");
  return wrap([&] {
    auto draws = collect_heldout(heldout, n_heldout);
    auto [m, s] = lgcp::log_predictive(estimate->estimate, draws, draws.front().domain);
    *mean = m;
    *sd = s;
  });
}

lgcp_status lgcp_log_predictive_per_draw(const lgcp_samples* samples, const double* grid, size_t m,
                                         const lgcp_dataset* const* heldout, size_t n_heldout,
                                         double* mean, double* sd) {
  if (!samples || !grid || !mean || !sd) return invalid("null pointer argument");
  return wrap([&] {
    auto draws = collect_heldout(heldout, n_heldout);
    const int d = samples->samples.domain.dim();
    Eigen::MatrixXd g(static_cast<Eigen::Index>(m), d);
    for (size_t i = 0; i < m; ++i)
      for (int j = 0; j < d; ++j)
        g(static_cast<Eigen::Index>(i), j) = grid[i * static_cast<size_t>(d) + j];
    Eigen::MatrixXd per_draw;
    lgcp::predictive_on_grid(samples->samples, g, &per_draw);
    auto [lpm, lps] = lgcp::log_predictive_per_draw(per_draw, g, draws, draws.front().domain);
    *mean = lpm;
    *sd = lps;
  });
}

lgcp_status lgcp_effective_sample_size(const double* series, size_t n, double* out) {
  if (!series || !out) return invalid("null pointer argument");
  return wrap([&] {
    std::vector<double> v(series, series + n);
    *out = lgcp::effective_sample_size(v);
  });
}

}  // extern "C"
