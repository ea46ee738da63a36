#include "lgcp/kernel.hpp"

#include <cmath>
#include <limits>

namespace lgcp {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727;  // log(sqrt(2*pi))

void check_dim(Eigen::Index point_dim, const HyperParams& params) {
  if (point_dim != params.dim())
    throw InvalidArgumentError("point dimension " + std::to_string(point_dim) +
                               " does not match kernel dimension " + std::to_string(params.dim()));
}

}  // namespace

double kernel_eval(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const HyperParams& params) {
  if (a.size() != b.size()) throw InvalidArgumentError("kernel arguments differ in dimension");
  check_dim(a.size(), params);
  double q = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double r = (a[j] - b[j]) / params.input_scales[j];
    q += r * r;
  }
  const double h = params.output_scale;
  return h * h * std::exp(-0.5 * q);
}

Eigen::MatrixXd gram(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y, const HyperParams& params) {
  if (X.rows() == 0 || Y.rows() == 0) throw InvalidArgumentError("gram requires nonempty point lists");
  if (X.cols() != Y.cols()) throw InvalidArgumentError("gram point lists differ in dimension");
  check_dim(X.cols(), params);

  // Scaled squared distances, accumulated per dimension so that (i,j) and
  // (j,i) are computed bitwise identically.
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(X.rows(), Y.rows());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const double inv_l = 1.0 / params.input_scales[j];
    for (Eigen::Index c = 0; c < Y.rows(); ++c) {
      const double yc = Y(c, j);
      for (Eigen::Index r = 0; r < X.rows(); ++r) {
        const double d = (X(r, j) - yc) * inv_l;
        sq(r, c) += d * d;
      }
    }
  }
  const double h2 = params.output_scale * params.output_scale;
  return h2 * (-0.5 * sq.array()).exp();
}

HyperParams sample_hyper(const HyperPrior& prior, std::mt19937_64& rng) {
  prior.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  auto scaled_sigmoid = [](double x, double max) { return max / (1.0 + std::exp(-x)); };

  HyperParams params;
  params.output_scale = scaled_sigmoid(normal(rng), prior.max_output_scale);
  params.input_scales.resize(prior.dim());
  for (int j = 0; j < prior.dim(); ++j)
    params.input_scales[j] = scaled_sigmoid(normal(rng), prior.max_input_scales[j]);
  return params;
}

double log_hyper_prior_density(const HyperParams& params, const HyperPrior& prior) {
  prior.validate();
  if (params.dim() != prior.dim())
    throw InvalidArgumentError("hyperparameter dimension does not match prior dimension");

  // p(theta) = phi(x(theta)) * theta_max / (theta * (theta_max - theta)),
  // the pushforward of a standard normal through the scaled sigmoid.
  auto component = [](double theta, double theta_max) {
    if (!(theta > 0.0) || !(theta < theta_max)) return -std::numeric_limits<double>::infinity();
    const double x = std::log(theta) - std::log(theta_max - theta);
    return -kLogSqrt2Pi - 0.5 * x * x + std::log(theta_max) - std::log(theta) -
           std::log(theta_max - theta);
  };

  double lp = component(params.output_scale, prior.max_output_scale);
  for (int j = 0; j < prior.dim(); ++j)
    lp += component(params.input_scales[j], prior.max_input_scales[j]);
  return lp;
}

JitteredCholesky jittered_cholesky(const Eigen::MatrixXd& m, double h2) {
  if (m.rows() != m.cols() || m.rows() == 0)
    throw InvalidArgumentError("cholesky requires a nonempty square matrix");
  if (!m.allFinite()) throw ConditioningError("matrix contains non-finite entries");

  const Eigen::Index k = m.rows();
  for (double jitter = 1e-8 * h2; jitter <= 1e-4 * h2 * (1.0 + 1e-12); jitter *= 10.0) {
    Eigen::MatrixXd work = m;
    work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      JitteredCholesky out;
      out.lower = llt.matrixL();
      out.jitter = jitter;
      // LLT can report success with non-finite entries on pathological input.
      if (out.lower.allFinite() && (out.lower.diagonal().array() > 0.0).all()) return out;
    }
  }
  throw ConditioningError("covariance matrix of " + std::to_string(k) +
                          " points is not factorizable within the jitter ladder");
}

}  // namespace lgcp
