#include "lgcp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace lgcp {

namespace {

// Fraction of the domain extent the grid may leave uncovered at either end.
constexpr double kCoverageSlack = 0.02;

void check_coverage(const Eigen::MatrixXd& locations, const Domain& domain) {
  for (int j = 0; j < domain.dim(); ++j) {
    const double extent = domain.upper[j] - domain.lower[j];
    const double lo = locations.col(j).minCoeff();
    const double hi = locations.col(j).maxCoeff();
    if (lo > domain.lower[j] + kCoverageSlack * extent ||
        hi < domain.upper[j] - kCoverageSlack * extent)
      throw DataError("estimate grid does not cover the domain in dimension " + std::to_string(j));
  }
}

// Trapezoidal weights for sorted coordinates, with constant extension over
// the (at most 2% wide) uncovered strips at the domain edges.
Eigen::VectorXd trapezoid_weights(const std::vector<double>& xs, double lower, double upper) {
  const size_t m = xs.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  for (size_t i = 0; i + 1 < m; ++i) {
    const double half = 0.5 * (xs[i + 1] - xs[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  w[0] += xs.front() - lower;
  w[m - 1] += upper - xs.back();
  return w;
}

// Piecewise-linear interpolation with clamping to the grid span.
double interp1(const std::vector<double>& xs, const Eigen::VectorXd& values, double x) {
  if (x <= xs.front()) return values[0];
  if (x >= xs.back()) return values[values.size() - 1];
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const size_t hi = static_cast<size_t>(it - xs.begin());
  const size_t lo = hi - 1;
  const double t = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return (1.0 - t) * values[lo] + t * values[hi];
}

// Estimate grid wrapped as an integrable, interpolable function. In 2-D the
// locations must form a product grid (the order of rows is free).
class GridFunction {
 public:
  GridFunction(const Eigen::MatrixXd& locations, const Domain& domain) : dim_(domain.dim()) {
    if (locations.cols() != domain.dim())
      throw InvalidArgumentError("grid dimension does not match domain dimension");
    check_coverage(locations, domain);

    if (dim_ == 1) {
      order_.resize(locations.rows());
      std::iota(order_.begin(), order_.end(), Eigen::Index{0});
      std::sort(order_.begin(), order_.end(),
                [&](Eigen::Index a, Eigen::Index b) { return locations(a, 0) < locations(b, 0); });
      xs_.reserve(order_.size());
      for (Eigen::Index idx : order_) xs_.push_back(locations(idx, 0));
      weights_ = trapezoid_weights(xs_, domain.lower[0], domain.upper[0]);
      return;
    }
    if (dim_ != 2) throw InvalidArgumentError("grids beyond 2 dimensions are not supported");

    std::map<double, Eigen::Index> x_index, y_index;
    for (Eigen::Index i = 0; i < locations.rows(); ++i) {
      x_index.emplace(locations(i, 0), 0);
      y_index.emplace(locations(i, 1), 0);
    }
    if (static_cast<Eigen::Index>(x_index.size()) * static_cast<Eigen::Index>(y_index.size()) !=
        locations.rows())
      throw DataError("2-D estimate locations must form a product grid");
    xs_.reserve(x_index.size());
    ys_.reserve(y_index.size());
    for (auto& [x, idx] : x_index) {
      idx = static_cast<Eigen::Index>(xs_.size());
      xs_.push_back(x);
    }
    for (auto& [y, idx] : y_index) {
      idx = static_cast<Eigen::Index>(ys_.size());
      ys_.push_back(y);
    }
    cell_of_row_.resize(locations.rows());
    for (Eigen::Index i = 0; i < locations.rows(); ++i)
      cell_of_row_[i] = {x_index.at(locations(i, 0)), y_index.at(locations(i, 1))};
    weights_ = trapezoid_weights(xs_, domain.lower[0], domain.upper[0]);
    weights_y_ = trapezoid_weights(ys_, domain.lower[1], domain.upper[1]);
  }

  void set_values(const Eigen::VectorXd& row_values) {
    if (dim_ == 1) {
      values_.resize(row_values.size());
      for (Eigen::Index i = 0; i < row_values.size(); ++i) values_[i] = row_values[order_[i]];
    } else {
      table_.resize(static_cast<Eigen::Index>(xs_.size()), static_cast<Eigen::Index>(ys_.size()));
      for (Eigen::Index i = 0; i < row_values.size(); ++i)
        table_(cell_of_row_[i].first, cell_of_row_[i].second) = row_values[i];
    }
  }

  double integral() const {
    if (dim_ == 1) return weights_.dot(values_);
    return weights_.transpose() * table_ * weights_y_;
  }

  double at(const Eigen::VectorXd& s) const {
    if (dim_ == 1) return interp1(xs_, values_, s[0]);
    // Bilinear on the product grid, clamped to the span.
    const auto bracket = [](const std::vector<double>& xs, double x) {
      if (x <= xs.front()) return std::pair<size_t, double>{0, 0.0};
      if (x >= xs.back()) return std::pair<size_t, double>{xs.size() - 2, 1.0};
      const size_t hi = static_cast<size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin());
      return std::pair<size_t, double>{hi - 1, (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1])};
    };
    const auto [ix, tx] = bracket(xs_, s[0]);
    const auto [iy, ty] = bracket(ys_, s[1]);
    return (1.0 - tx) * ((1.0 - ty) * table_(ix, iy) + ty * table_(ix, iy + 1)) +
           tx * ((1.0 - ty) * table_(ix + 1, iy) + ty * table_(ix + 1, iy + 1));
  }

 private:
  int dim_;
  std::vector<Eigen::Index> order_;  // 1-D: sort permutation
  std::vector<double> xs_, ys_;
  Eigen::VectorXd weights_, weights_y_;
  Eigen::VectorXd values_;   // 1-D, sorted order
  Eigen::MatrixXd table_;    // 2-D
  std::vector<std::pair<Eigen::Index, Eigen::Index>> cell_of_row_;
};

double poisson_log_likelihood(const GridFunction& fn, const EventDataset& draw,
                              const Domain& domain) {
  if (draw.domain.dim() != domain.dim())
    throw InvalidArgumentError("held-out draw dimension does not match");
  double ll = -fn.integral();
  for (Eigen::Index i = 0; i < draw.size(); ++i) {
    const Eigen::VectorXd s = draw.points.row(i).transpose();
    if (!domain.contains(s))
      throw InvalidArgumentError("held-out event " + std::to_string(i) + " lies outside the domain");
    ll += std::log(fn.at(s));
  }
  return ll;
}

std::pair<double, double> mean_sd(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd};
}

}  // namespace

std::pair<double, double> normalized_errors(const IntensityEstimate& estimate,
                                            const IntensitySpec& truth) {
  if (estimate.size() < 50)
    throw InvalidArgumentError("normalized errors need a grid of at least 50 points");
  check_coverage(estimate.locations, truth.domain);

  const Eigen::Index m = estimate.size();
  double mean_truth = 0.0, abs_err = 0.0, sq_err = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const double lambda = truth.eval(estimate.locations.row(i).transpose());
    const double err = estimate.intensity_mean[i] - lambda;
    mean_truth += lambda;
    abs_err += std::abs(err);
    sq_err += err * err;
  }
  mean_truth /= static_cast<double>(m);
  if (!(mean_truth > 0.0)) throw InvalidArgumentError("true intensity has nonpositive mean");
  const double mae = abs_err / static_cast<double>(m) / mean_truth;
  const double rmse = std::sqrt(sq_err / static_cast<double>(m)) / mean_truth;
  return {mae, rmse};
}

std::pair<double, double> log_predictive(const IntensityEstimate& estimate,
                                         const std::vector<EventDataset>& heldout,
                                         const Domain& domain) {
  if (heldout.empty()) throw InvalidArgumentError("no held-out draws supplied");
  if (estimate.size() < 500)
    throw InvalidArgumentError("log predictive needs at least 500 grid points");

  GridFunction fn(estimate.locations, domain);
  fn.set_values(estimate.intensity_mean);

  std::vector<double> lls;
  lls.reserve(heldout.size());
  for (const auto& draw : heldout) lls.push_back(poisson_log_likelihood(fn, draw, domain));
  return mean_sd(lls);
}

std::pair<double, double> log_predictive_per_draw(const Eigen::MatrixXd& per_draw_intensity,
                                                  const Eigen::MatrixXd& grid,
                                                  const std::vector<EventDataset>& heldout,
                                                  const Domain& domain) {
  if (heldout.empty()) throw InvalidArgumentError("no held-out draws supplied");
  if (per_draw_intensity.rows() == 0 || per_draw_intensity.cols() != grid.rows())
    throw InvalidArgumentError("per-draw intensity matrix does not match the grid");

  GridFunction fn(grid, domain);
  const Eigen::Index t_total = per_draw_intensity.rows();

  // log L per (posterior draw, held-out draw), then log-mean-exp over draws.
  Eigen::MatrixXd ll(t_total, static_cast<Eigen::Index>(heldout.size()));
  for (Eigen::Index t = 0; t < t_total; ++t) {
    fn.set_values(per_draw_intensity.row(t).transpose());
    for (size_t j = 0; j < heldout.size(); ++j)
      ll(t, static_cast<Eigen::Index>(j)) = poisson_log_likelihood(fn, heldout[j], domain);
  }

  std::vector<double> lp(heldout.size());
  for (size_t j = 0; j < heldout.size(); ++j) {
    const auto col = ll.col(static_cast<Eigen::Index>(j));
    const double top = col.maxCoeff();
    double acc = 0.0;
    for (Eigen::Index t = 0; t < t_total; ++t) acc += std::exp(col[t] - top);
    lp[j] = top + std::log(acc / static_cast<double>(t_total));
  }
  return mean_sd(lp);
}

}  // namespace lgcp
