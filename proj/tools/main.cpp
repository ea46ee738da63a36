// lgcp: simulate, select, fit, predict and evaluate log-Gaussian Cox process
// models from the command line. Talks to the core library exclusively through
// the C interface in lgcp.h.
#include "lgcp.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CliError {
  int code;
  std::string message;
};

[[noreturn]] void fail(int code, const std::string& message) { throw CliError{code, message}; }

[[noreturn]] void fail_status(lgcp_status status, const std::string& context) {
  const std::string message = context + ": " + lgcp_last_error();
  switch (status) {
    case LGCP_ERROR_INVALID_ARGUMENT: fail(kExitUsage, message);
    case LGCP_ERROR_DATA: fail(kExitData, message);
    case LGCP_ERROR_IO: fail(kExitData, message);
    default: fail(kExitNumerical, message);
  }
}

void check(lgcp_status status, const std::string& context) {
  if (status != LGCP_OK) fail_status(status, context);
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/* ---------- configuration ---------- */

// Flat key = value file; '#' starts a comment. Command-line flags override.
struct RunConfig {
  std::vector<double> domain_lower{0.0};
  std::vector<double> domain_upper{50.0};
  std::vector<double> piecewise_edges;
  std::vector<double> piecewise_values;
  double h_max = 10.0;
  double l_max = 25.0;
  int quad_order = 20;
  int n_theta = 20;
  double alpha = 1e-3;
  int max_points = 256;
  int burn_in = 1000;
  int n_samples = 5000;
  int thinning = 1;
  int chains = 1;
  std::optional<uint64_t> seed;
  int grid_resolution = 512;
  double constant_value = 1.0;
  double intensity_scale = 1.0;

  size_t dim() const { return domain_lower.size(); }
};

std::vector<double> parse_double_list(const std::string& text, const std::string& where) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(kExitUsage, where + ": cannot parse number '" + item + "'");
    }
  }
  if (out.empty()) fail(kExitUsage, where + ": empty list");
  return out;
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value,
                        const std::string& where) {
  auto as_double = [&](const char* name) {
    try {
      return std::stod(value);
    } catch (const std::exception&) {
      fail(kExitUsage, where + ": " + name + " expects a number, got '" + value + "'");
    }
  };
  auto as_int = [&](const char* name) {
    try {
      return std::stoi(value);
    } catch (const std::exception&) {
      fail(kExitUsage, where + ": " + name + " expects an integer, got '" + value + "'");
    }
  };

  if (key == "domain_lower")
    cfg.domain_lower = parse_double_list(value, where);
  else if (key == "domain_upper")
    cfg.domain_upper = parse_double_list(value, where);
  else if (key == "h_max")
    cfg.h_max = as_double("h_max");
  else if (key == "l_max")
    cfg.l_max = as_double("l_max");
  else if (key == "quad_order")
    cfg.quad_order = as_int("quad_order");
  else if (key == "n_theta")
    cfg.n_theta = as_int("n_theta");
  else if (key == "alpha")
    cfg.alpha = as_double("alpha");
  else if (key == "max_points")
    cfg.max_points = as_int("max_points");
  else if (key == "burn_in")
    cfg.burn_in = as_int("burn_in");
  else if (key == "n_samples")
    cfg.n_samples = as_int("n_samples");
  else if (key == "thinning")
    cfg.thinning = as_int("thinning");
  else if (key == "chains")
    cfg.chains = as_int("chains");
  else if (key == "seed") {
    try {
      cfg.seed = std::stoull(value);
    } catch (const std::exception&) {
      fail(kExitUsage, where + ": seed expects a nonnegative integer, got '" + value + "'");
    }
  } else if (key == "grid_resolution")
    cfg.grid_resolution = as_int("grid_resolution");
  else if (key == "constant_value")
    cfg.constant_value = as_double("constant_value");
  else if (key == "piecewise_edges")
    cfg.piecewise_edges = parse_double_list(value, where);
  else if (key == "piecewise_values")
    cfg.piecewise_values = parse_double_list(value, where);
  else if (key == "intensity_scale")
    cfg.intensity_scale = as_double("intensity_scale");
  else
    fail(kExitUsage, where + ": unknown key '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(kExitUsage, "cannot open config file: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const size_t eq = line.find('=');
    const std::string where = path + ":" + std::to_string(lineno);
    if (eq == std::string::npos) fail(kExitUsage, where + ": expected 'key = value'");
    auto trim = [](std::string s) {
      const size_t a = s.find_first_not_of(" \t\r");
      const size_t b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(kExitUsage, where + ": expected 'key = value'");
    apply_config_entry(cfg, key, value, where);
  }
}

void validate_config(const RunConfig& cfg) {
  if (cfg.domain_lower.size() != cfg.domain_upper.size())
    fail(kExitUsage, "config: domain_lower and domain_upper differ in dimension");
  if (cfg.dim() < 1 || cfg.dim() > 2) fail(kExitUsage, "config: dimension must be 1 or 2");
  for (size_t j = 0; j < cfg.dim(); ++j)
    if (!(cfg.domain_lower[j] < cfg.domain_upper[j]))
      fail(kExitUsage, "config: domain_lower must be strictly below domain_upper");
  if (!(cfg.h_max > 0.0)) fail(kExitUsage, "config: h_max must be positive");
  if (!(cfg.l_max > 0.0)) fail(kExitUsage, "config: l_max must be positive");
  if (cfg.quad_order < 1 || cfg.quad_order > 64)
    fail(kExitUsage, "config: quad_order must lie in [1, 64]");
  if (cfg.n_theta < 1) fail(kExitUsage, "config: n_theta must be positive");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) fail(kExitUsage, "config: alpha must lie in (0, 1)");
  if (cfg.burn_in < 0) fail(kExitUsage, "config: burn_in must be nonnegative");
  if (cfg.n_samples < 1) fail(kExitUsage, "config: n_samples must be positive");
  if (cfg.thinning < 1) fail(kExitUsage, "config: thinning must be positive");
  if (cfg.chains < 1) fail(kExitUsage, "config: chains must be positive");
  if (cfg.grid_resolution < 2) fail(kExitUsage, "config: grid_resolution must be at least 2");
  if (!cfg.seed)
    fail(kExitUsage, "config: seed is required (set it in the config file or pass --seed)");
}

/* ---------- handles ---------- */

template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* ptr = nullptr;
  Handle() = default;
  explicit Handle(T* p) : ptr(p) {}
  ~Handle() { reset(); }
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  Handle(Handle&& other) noexcept : ptr(other.ptr) { other.ptr = nullptr; }
  void reset() {
    if (ptr) Destroy(ptr);
    ptr = nullptr;
  }
  T** out() {
    reset();
    return &ptr;
  }
  T* get() const { return ptr; }
};

using IntensityHandle = Handle<lgcp_intensity, lgcp_intensity_destroy>;
using DatasetHandle = Handle<lgcp_dataset, lgcp_dataset_destroy>;
using SelectionHandle = Handle<lgcp_selection, lgcp_selection_destroy>;
using SamplesHandle = Handle<lgcp_samples, lgcp_samples_destroy>;
using EstimateHandle = Handle<lgcp_estimate, lgcp_estimate_destroy>;

IntensityHandle make_intensity(const RunConfig& cfg, const std::string& name) {
  IntensityHandle intensity;
  if (name == "synthetic-bimodal") {
    check(lgcp_intensity_create_synthetic_bimodal(intensity.out()), "intensity");
  } else if (name == "constant") {
    check(lgcp_intensity_create_constant(cfg.constant_value, cfg.domain_lower.data(),
                                         cfg.domain_upper.data(), cfg.dim(), intensity.out()),
          "intensity");
  } else if (name == "piecewise") {
    if (cfg.piecewise_edges.empty() || cfg.piecewise_values.empty())
      fail(kExitUsage, "piecewise intensity needs piecewise_edges and piecewise_values");
    check(lgcp_intensity_create_piecewise(cfg.piecewise_edges.data(), cfg.piecewise_edges.size(),
                                          cfg.piecewise_values.data(), intensity.out()),
          "intensity");
  } else {
    fail(kExitUsage, "unknown intensity '" + name +
                         "' (available here: synthetic-bimodal, constant, piecewise)");
  }
  if (cfg.intensity_scale != 1.0)
    check(lgcp_intensity_scale(intensity.get(), cfg.intensity_scale), "intensity scale");
  return intensity;
}

/* ---------- event CSV ---------- */

void write_events_csv(const std::string& path, const lgcp_dataset* dataset) {
  const size_t n = lgcp_dataset_size(dataset);
  const size_t d = lgcp_dataset_dim(dataset);
  std::vector<double> pts(n * d);
  if (n > 0) check(lgcp_dataset_points(dataset, pts.data()), "reading dataset");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(kExitData, "cannot write " + path);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < d; ++j) {
      if (j) out << ',';
      out << format_g17(pts[i * d + j]);
    }
    out << '\n';
  }
  if (!out) fail(kExitData, "write failed: " + path);
}

DatasetHandle read_events_csv(const std::string& path, const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitData, "cannot open events file: " + path);
  std::vector<double> coords;
  std::string line;
  int lineno = 0;
  std::vector<int> bad_rows;
  const size_t d = cfg.dim();
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    size_t col = 0;
    double point[2] = {0.0, 0.0};
    while (std::getline(ss, cell, ',')) {
      if (col >= d) fail(kExitData, path + ":" + std::to_string(lineno) + ": too many columns");
      try {
        point[col] = std::stod(cell);
      } catch (const std::exception&) {
        fail(kExitData, path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
      ++col;
    }
    if (col != d)
      fail(kExitData, path + ":" + std::to_string(lineno) + ": expected " + std::to_string(d) +
                          " columns, got " + std::to_string(col));
    bool inside = true;
    for (size_t j = 0; j < d; ++j)
      inside = inside && point[j] >= cfg.domain_lower[j] && point[j] <= cfg.domain_upper[j];
    if (!inside) bad_rows.push_back(lineno);
    for (size_t j = 0; j < d; ++j) coords.push_back(point[j]);
  }
  if (!bad_rows.empty()) {
    std::string rows;
    for (size_t i = 0; i < bad_rows.size() && i < 20; ++i)
      rows += (i ? ", " : "") + std::to_string(bad_rows[i]);
    if (bad_rows.size() > 20) rows += ", ...";
    fail(kExitData, path + ": events outside the domain at rows " + rows);
  }
  DatasetHandle dataset;
  check(lgcp_dataset_create(coords.data(), coords.size() / d, d, cfg.domain_lower.data(),
                            cfg.domain_upper.data(), dataset.out()),
        "loading events");
  return dataset;
}

/* ---------- grids ---------- */

std::vector<double> make_grid(const RunConfig& cfg) {
  const size_t d = cfg.dim();
  const size_t r = static_cast<size_t>(cfg.grid_resolution);
  std::vector<double> grid;
  if (d == 1) {
    grid.reserve(r);
    for (size_t i = 0; i < r; ++i)
      grid.push_back(cfg.domain_lower[0] +
                     (cfg.domain_upper[0] - cfg.domain_lower[0]) * static_cast<double>(i) /
                         static_cast<double>(r - 1));
  } else {
    grid.reserve(2 * r * r);
    for (size_t i = 0; i < r; ++i) {
      for (size_t j = 0; j < r; ++j) {
        grid.push_back(cfg.domain_lower[0] +
                       (cfg.domain_upper[0] - cfg.domain_lower[0]) * static_cast<double>(i) /
                           static_cast<double>(r - 1));
        grid.push_back(cfg.domain_lower[1] +
                       (cfg.domain_upper[1] - cfg.domain_lower[1]) * static_cast<double>(j) /
                           static_cast<double>(r - 1));
      }
    }
  }
  return grid;
}

/* ---------- commands ---------- */

struct SimulateArgs {
  std::string intensity, out, manifest;
};

int cmd_simulate(const RunConfig& cfg, const SimulateArgs& args) {
  IntensityHandle intensity = make_intensity(cfg, args.intensity);
  DatasetHandle dataset;
  check(lgcp_simulate(intensity.get(), *cfg.seed, dataset.out()), "simulate");
  write_events_csv(args.out, dataset.get());

  double integral = 0.0;
  check(lgcp_intensity_integral(intensity.get(), std::min(cfg.quad_order * 2, 64), &integral),
        "intensity integral");
  json manifest;
  manifest["intensity"] = args.intensity;
  manifest["intensity_scale"] = cfg.intensity_scale;
  if (args.intensity == "constant") manifest["constant_value"] = cfg.constant_value;
  manifest["domain_lower"] = cfg.domain_lower;
  manifest["domain_upper"] = cfg.domain_upper;
  manifest["seed"] = *cfg.seed;
  manifest["integral"] = integral;
  manifest["n_events"] = lgcp_dataset_size(dataset.get());
  manifest["events_file"] = args.out;
  const std::string manifest_path =
      args.manifest.empty() ? args.out + ".manifest.json" : args.manifest;
  std::ofstream mf(manifest_path, std::ios::binary);
  if (!mf) fail(kExitData, "cannot write " + manifest_path);
  mf << manifest.dump(1) << "\n";
  std::cout << "simulated " << lgcp_dataset_size(dataset.get()) << " events -> " << args.out
            << "\n";
  return 0;
}

struct SelectArgs {
  std::string events, out;
};

int cmd_select(const RunConfig& cfg, const SelectArgs& args) {
  DatasetHandle dataset = read_events_csv(args.events, cfg);
  if (lgcp_dataset_size(dataset.get()) == 0) fail(kExitData, args.events + ": no events");

  lgcp_select_options options;
  lgcp_select_options_init(&options);
  options.h_max = cfg.h_max;
  options.l_max = cfg.l_max;
  options.num_theta = cfg.n_theta;
  options.alpha = cfg.alpha;
  options.max_points = cfg.max_points;
  options.seed = *cfg.seed;
  SelectionHandle selection;
  check(lgcp_select(dataset.get(), &options, selection.out()), "select");

  const size_t d = cfg.dim();
  const size_t k_full = lgcp_selection_size(selection.get());
  const size_t k_rec = lgcp_selection_recommended_size(selection.get());
  double w_inf = 0.0;
  check(lgcp_selection_w_inf(selection.get(), &w_inf), "select");

  json out;
  out["dim"] = d;
  out["seed"] = *cfg.seed;
  out["alpha"] = cfg.alpha;
  out["h_max"] = cfg.h_max;
  out["l_max"] = cfg.l_max;
  out["w_inf"] = w_inf;
  json locations = json::array(), trace_points = json::array(), utilities = json::array();
  for (size_t i = 0; i < k_full; ++i) {
    double point[2] = {0, 0};
    check(lgcp_selection_point(selection.get(), i, point), "select");
    json p = json::array();
    for (size_t j = 0; j < d; ++j) p.push_back(point[j]);
    trace_points.push_back(p);
    if (i < k_rec) locations.push_back(p);
    double u = 0.0;
    check(lgcp_selection_utility(selection.get(), i, &u), "select");
    utilities.push_back(u);
  }
  out["locations"] = locations;
  out["trace_points"] = trace_points;
  out["utilities"] = utilities;
  json thetas = json::array();
  for (size_t i = 0; i < lgcp_selection_num_theta(selection.get()); ++i) {
    double h = 0.0, l[2] = {0, 0};
    check(lgcp_selection_theta(selection.get(), i, &h, l), "select");
    json t;
    t["h"] = h;
    t["l"] = std::vector<double>(l, l + d);
    thetas.push_back(t);
  }
  out["theta_samples"] = thetas;

  std::ofstream f(args.out, std::ios::binary);
  if (!f) fail(kExitData, "cannot write " + args.out);
  f << out.dump(1) << "\n";
  std::cout << "selected " << k_rec << " inducing points (trace length " << k_full << ") -> "
            << args.out << "\n";
  return 0;
}

std::vector<double> read_inducing_file(const std::string& path, size_t dim, size_t* k_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitData, "cannot open inducing file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(kExitData, path + ": malformed JSON: " + std::string(e.what()));
  }
  std::vector<double> coords;
  try {
    for (const auto& row : j.at("locations")) {
      if (row.size() != dim) fail(kExitData, path + ": inducing point dimension mismatch");
      for (size_t c = 0; c < dim; ++c) coords.push_back(row[c].get<double>());
    }
  } catch (const json::exception& e) {
    fail(kExitData, path + ": missing locations: " + std::string(e.what()));
  }
  if (coords.empty()) fail(kExitData, path + ": no inducing locations");
  *k_out = coords.size() / dim;
  return coords;
}

struct FitArgs {
  std::string events, inducing, out, summary;
};

int cmd_fit(const RunConfig& cfg, const FitArgs& args) {
  DatasetHandle dataset = read_events_csv(args.events, cfg);
  size_t k = 0;
  const std::vector<double> inducing = read_inducing_file(args.inducing, cfg.dim(), &k);

  lgcp_fit_options options;
  lgcp_fit_options_init(&options);
  options.h_max = cfg.h_max;
  options.l_max = cfg.l_max;
  options.quad_order = cfg.quad_order;
  options.burn_in = cfg.burn_in;
  options.n_samples = cfg.n_samples;
  options.thinning = cfg.thinning;
  options.chains = cfg.chains;
  options.seed = *cfg.seed;

  SamplesHandle samples;
  check(lgcp_fit(dataset.get(), inducing.data(), k, &options, samples.out()), "fit");
  check(lgcp_samples_save(samples.get(), args.out.c_str()), "saving samples");

  if (lgcp_samples_aborted(samples.get())) {
    json error_manifest;
    error_manifest["error"] = lgcp_samples_abort_reason(samples.get());
    error_manifest["draws_recorded"] = lgcp_samples_num_draws(samples.get());
    error_manifest["samples_file"] = args.out;
    std::ofstream ef(args.out + ".error.json", std::ios::binary);
    ef << error_manifest.dump(1) << "\n";
    std::cerr << "error: sampler aborted after " << lgcp_samples_num_draws(samples.get())
              << " draws: " << lgcp_samples_abort_reason(samples.get()) << "\n";
    return kExitNumerical;
  }

  double acc = 0, ess = 0, wall = 0;
  int64_t rejects = 0;
  check(lgcp_samples_stats(samples.get(), &acc, &ess, &wall, &rejects), "fit stats");
  json summary;
  summary["n_events"] = lgcp_dataset_size(dataset.get());
  summary["k"] = k;
  summary["n_samples"] = cfg.n_samples * cfg.chains;
  summary["burn_in"] = cfg.burn_in;
  summary["chains"] = cfg.chains;
  summary["seed"] = *cfg.seed;
  summary["acceptance_rate"] = acc;
  summary["ess_per_1000"] = ess;
  summary["wall_seconds"] = wall;
  summary["conditioning_rejections"] = rejects;
  const std::string summary_path =
      args.summary.empty() ? args.out + ".summary.json" : args.summary;
  std::ofstream sf(summary_path, std::ios::binary);
  if (!sf) fail(kExitData, "cannot write " + summary_path);
  sf << summary.dump(1) << "\n";
  std::cout << "fit: " << cfg.n_samples * cfg.chains << " draws, acceptance " << acc
            << ", ESS/1000 " << ess << ", " << wall << " s -> " << args.out << "\n";
  return 0;
}

struct PredictArgs {
  std::string samples, out;
  bool at_data = false;
  std::string events;  // needed for --at-data
};

int cmd_predict(const RunConfig& cfg, const PredictArgs& args) {
  SamplesHandle samples;
  check(lgcp_samples_load(args.samples.c_str(), samples.out()), "loading samples");

  EstimateHandle estimate;
  if (args.at_data) {
    if (args.events.empty()) fail(kExitUsage, "--at-data requires --events");
    DatasetHandle dataset = read_events_csv(args.events, cfg);
    check(lgcp_predict_at_data(samples.get(), dataset.get(), estimate.out()), "predict");
  } else {
    const std::vector<double> grid = make_grid(cfg);
    check(lgcp_predict_on_grid(samples.get(), grid.data(), grid.size() / cfg.dim(), estimate.out()),
          "predict");
  }

  const size_t m = lgcp_estimate_size(estimate.get());
  const size_t d = lgcp_estimate_dim(estimate.get());
  std::ofstream out(args.out, std::ios::binary);
  if (!out) fail(kExitData, "cannot write " + args.out);
  for (size_t j = 0; j < d; ++j) out << (j ? ",x" + std::to_string(j) : "x0");
  out << ",log_mean,log_var,intensity_mean,lo_band,hi_band\n";
  for (size_t i = 0; i < m; ++i) {
    double loc[2] = {0, 0}, log_mean = 0, log_var = 0, intensity = 0;
    check(lgcp_estimate_row(estimate.get(), i, loc, &log_mean, &log_var, &intensity), "predict");
    const double sd = std::sqrt(std::max(log_var, 0.0));
    for (size_t j = 0; j < d; ++j) out << (j ? "," : "") << format_g17(loc[j]);
    out << ',' << format_g17(log_mean) << ',' << format_g17(log_var) << ','
        << format_g17(intensity) << ',' << format_g17(std::exp(log_mean - sd)) << ','
        << format_g17(std::exp(log_mean + sd)) << "\n";
  }
  if (!out) fail(kExitData, "write failed: " + args.out);
  std::cout << "predicted " << m << " locations -> " << args.out << "\n";
  return 0;
}

EstimateHandle read_estimate_csv(const std::string& path, const RunConfig& cfg) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(kExitData, "cannot open estimate file: " + path);
  std::string line;
  if (!std::getline(in, line)) fail(kExitData, path + ": empty estimate file");
  const size_t d = cfg.dim();
  std::vector<double> locs, log_mean, log_var, intensity;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        fail(kExitData, path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (row.size() != d + 5)
      fail(kExitData,
           path + ":" + std::to_string(lineno) + ": expected " + std::to_string(d + 5) + " columns");
    for (size_t j = 0; j < d; ++j) locs.push_back(row[j]);
    log_mean.push_back(row[d]);
    log_var.push_back(row[d + 1]);
    intensity.push_back(row[d + 2]);
  }
  EstimateHandle estimate;
  check(lgcp_estimate_create(locs.data(), log_mean.size(), d, log_mean.data(), log_var.data(),
                             intensity.data(), estimate.out()),
        "loading estimate");
  return estimate;
}

struct EvaluateArgs {
  std::string estimate, truth, out, samples, fit_summary;
  std::vector<std::string> heldout;
};

int cmd_evaluate(const RunConfig& cfg, const EvaluateArgs& args) {
  EstimateHandle estimate = read_estimate_csv(args.estimate, cfg);
  IntensityHandle truth = make_intensity(cfg, args.truth);

  // The configured domain must agree with the truth's.
  size_t truth_dim = 0;
  double lo[2], hi[2];
  check(lgcp_intensity_domain(truth.get(), &truth_dim, lo, hi), "truth domain");
  if (truth_dim != cfg.dim()) fail(kExitData, "truth dimension does not match the config domain");
  for (size_t j = 0; j < truth_dim; ++j)
    if (lo[j] != cfg.domain_lower[j] || hi[j] != cfg.domain_upper[j])
      fail(kExitData, "config domain does not match the truth's domain");

  double mae = 0, rmse = 0;
  check(lgcp_normalized_errors(estimate.get(), truth.get(), &mae, &rmse), "normalized errors");

  json report;
  report["mae"] = mae;
  report["rmse"] = rmse;

  double lp_mean = 0, lp_sd = 0;
  if (!args.heldout.empty()) {
    std::vector<DatasetHandle> draws;
    std::vector<const lgcp_dataset*> raw;
    for (const auto& path : args.heldout) {
      draws.push_back(read_events_csv(path, cfg));
      raw.push_back(draws.back().get());
    }
    check(lgcp_log_predictive(estimate.get(), raw.data(), raw.size(), &lp_mean, &lp_sd),
          "log predictive");
    report["lp_mean"] = lp_mean;
    report["lp_sd"] = lp_sd;
    report["n_heldout"] = args.heldout.size();

    if (!args.samples.empty()) {
      SamplesHandle samples;
      check(lgcp_samples_load(args.samples.c_str(), samples.out()), "loading samples");
      const std::vector<double> grid = make_grid(cfg);
      double lpd_mean = 0, lpd_sd = 0;
      check(lgcp_log_predictive_per_draw(samples.get(), grid.data(), grid.size() / cfg.dim(),
                                         raw.data(), raw.size(), &lpd_mean, &lpd_sd),
            "per-draw log predictive");
      report["lp_per_draw_mean"] = lpd_mean;
      report["lp_per_draw_sd"] = lpd_sd;
      double ess = 0;
      check(lgcp_samples_stats(samples.get(), nullptr, &ess, nullptr, nullptr), "sample stats");
      report["ess_per_1000"] = ess;
    }
  }

  if (!args.fit_summary.empty()) {
    std::ifstream in(args.fit_summary, std::ios::binary);
    if (!in) fail(kExitData, "cannot open fit summary: " + args.fit_summary);
    json summary;
    try {
      in >> summary;
    } catch (const json::exception& e) {
      fail(kExitData, args.fit_summary + ": malformed JSON: " + std::string(e.what()));
    }
    for (const char* key : {"wall_seconds", "acceptance_rate", "ess_per_1000"})
      if (summary.contains(key)) report[key] = summary.at(key);
  }

  std::ofstream jf(args.out + ".json", std::ios::binary);
  if (!jf) fail(kExitData, "cannot write " + args.out + ".json");
  jf << report.dump(1) << "\n";

  std::ofstream tf(args.out + ".txt", std::ios::binary);
  if (!tf) fail(kExitData, "cannot write " + args.out + ".txt");
  for (const auto& [key, value] : report.items())
    tf << key << " = " << (value.is_number() ? format_g17(value.get<double>()) : value.dump())
       << "\n";

  std::cout << "mae = " << format_g17(mae) << "\nrmse = " << format_g17(rmse) << "\n";
  if (!args.heldout.empty())
    std::cout << "lp_mean = " << format_g17(lp_mean) << "\nlp_sd = " << format_g17(lp_sd) << "\n";
  std::cout << "report -> " << args.out << ".json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Bayesian inference on Poisson point process intensities"};
  app.require_subcommand(1);

  std::string config_path;

  // Collected overrides; applied after the config file so flags win.
  std::map<std::string, std::string> overrides;
  auto add_override = [&](CLI::App* cmd, const std::string& key) {
    cmd->add_option_function<std::string>(
        "--" + key, [&overrides, key](const std::string& v) { overrides[key] = v; },
        "override config value");
  };
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "flat key = value configuration file");
    for (const char* key :
         {"domain_lower", "domain_upper", "h_max", "l_max", "quad_order", "n_theta", "alpha",
          "max_points", "burn_in", "n_samples", "thinning", "chains", "seed", "grid_resolution",
          "constant_value", "intensity_scale", "piecewise_edges", "piecewise_values"})
      add_override(cmd, key);
  };

  SimulateArgs sim_args;
  CLI::App* sim = app.add_subcommand("simulate", "draw events from a known intensity");
  add_common(sim);
  sim->add_option("--intensity", sim_args.intensity, "synthetic-bimodal | constant | piecewise")->required();
  sim->add_option("--out", sim_args.out, "output events CSV")->required();
  sim->add_option("--manifest", sim_args.manifest, "manifest path (default <out>.manifest.json)");

  SelectArgs sel_args;
  CLI::App* sel = app.add_subcommand("select", "choose inducing points greedily");
  add_common(sel);
  sel->add_option("--events", sel_args.events, "input events CSV")->required();
  sel->add_option("--out", sel_args.out, "output inducing JSON")->required();

  FitArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "run the MCMC sampler");
  add_common(fit);
  fit->add_option("--events", fit_args.events, "input events CSV")->required();
  fit->add_option("--inducing", fit_args.inducing, "inducing JSON from select")->required();
  fit->add_option("--out", fit_args.out, "output samples JSON")->required();
  fit->add_option("--summary", fit_args.summary, "summary path (default <out>.summary.json)");

  PredictArgs pred_args;
  CLI::App* pred = app.add_subcommand("predict", "posterior intensity estimates");
  add_common(pred);
  pred->add_option("--samples", pred_args.samples, "samples JSON from fit")->required();
  pred->add_option("--out", pred_args.out, "output estimate CSV")->required();
  pred->add_flag("--at-data", pred_args.at_data, "evaluate at the observed events");
  pred->add_option("--events", pred_args.events, "events CSV (with --at-data)");

  EvaluateArgs eval_args;
  CLI::App* eval = app.add_subcommand("evaluate", "accuracy metrics against a known truth");
  add_common(eval);
  eval->add_option("--estimate", eval_args.estimate, "estimate CSV from predict")->required();
  eval->add_option("--truth", eval_args.truth, "true intensity name")->required();
  eval->add_option("--out", eval_args.out, "report path prefix")->required();
  eval->add_option("--heldout", eval_args.heldout, "held-out events CSVs")->expected(-1);
  eval->add_option("--samples", eval_args.samples, "samples JSON for per-draw log predictive");
  eval->add_option("--fit-summary", eval_args.fit_summary,
                   "fit summary JSON whose timing fields join the report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(cfg, config_path);
    for (const auto& [key, value] : overrides) apply_config_entry(cfg, key, value, "command line");
    validate_config(cfg);

    if (sim->parsed()) return cmd_simulate(cfg, sim_args);
    if (sel->parsed()) return cmd_select(cfg, sel_args);
    if (fit->parsed()) return cmd_fit(cfg, fit_args);
    if (pred->parsed()) return cmd_predict(cfg, pred_args);
    if (eval->parsed()) return cmd_evaluate(cfg, eval_args);
    return kExitUsage;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
