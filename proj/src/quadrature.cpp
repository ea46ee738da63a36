#include "lgcp/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace lgcp {

namespace {

constexpr double kSigmaFloor = 1e-12;   // relative floor on sigma2
constexpr double kExpOverflow = 700.0;  // exp argument beyond which doubles overflow

// Legendre polynomial value and derivative at x by the three-term recurrence.
std::pair<double, double> legendre(int p, double x) {
  double prev = 1.0, cur = x;
  for (int n = 2; n <= p; ++n) {
    const double next = ((2.0 * n - 1.0) * x * cur - (n - 1.0) * prev) / n;
    prev = cur;
    cur = next;
  }
  const double deriv = p * (x * cur - prev) / (x * x - 1.0);
  return {cur, deriv};
}

}  // namespace

QuadratureRule gauss_legendre_rule(int p, const Domain& domain) {
  domain.validate();
  if (p < 1 || p > 64) throw InvalidArgumentError("quadrature order must lie in [1, 64]");
  const int d = domain.dim();
  if (d != 1 && d != 2) throw InvalidArgumentError("quadrature supports dimensions 1 and 2 only");

  QuadratureRule rule;
  rule.order = p;
  rule.domain = domain;
  rule.nodes_1d.resize(p);
  rule.weights_1d.resize(p);

  if (p == 1) {
    rule.nodes_1d[0] = 0.0;
    rule.weights_1d[0] = 2.0;
  } else {
    for (int i = 0; i < p; ++i) {
      // Newton iteration from the Chebyshev-like initial guess.
      double x = std::cos(std::numbers::pi * (i + 0.75) / (p + 0.5));
      for (int it = 0; it < 100; ++it) {
        auto [value, deriv] = legendre(p, x);
        const double step = value / deriv;
        x -= step;
        if (std::abs(step) < 1e-15) break;
      }
      rule.nodes_1d[p - 1 - i] = x;
      const double deriv = legendre(p, x).second;
      rule.weights_1d[p - 1 - i] = 2.0 / ((1.0 - x * x) * deriv * deriv);
    }
  }

  // Affine map onto the rectangle, tensorized in 2-D.
  const Eigen::VectorXd half = 0.5 * (domain.upper - domain.lower);
  const Eigen::VectorXd mid = 0.5 * (domain.upper + domain.lower);
  if (d == 1) {
    rule.nodes = (half[0] * rule.nodes_1d.array() + mid[0]).matrix();
    rule.weights = half[0] * rule.weights_1d;
  } else {
    rule.nodes.resize(static_cast<Eigen::Index>(p) * p, 2);
    rule.weights.resize(static_cast<Eigen::Index>(p) * p);
    Eigen::Index row = 0;
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j, ++row) {
        rule.nodes(row, 0) = half[0] * rule.nodes_1d[i] + mid[0];
        rule.nodes(row, 1) = half[1] * rule.nodes_1d[j] + mid[1];
        rule.weights[row] = half[0] * half[1] * rule.weights_1d[i] * rule.weights_1d[j];
      }
    }
  }
  return rule;
}

GammaMoments gamma_moments_from_moments(const Eigen::VectorXd& node_means,
                                        const Eigen::MatrixXd& node_cov,
                                        const Eigen::VectorXd& weights) {
  const Eigen::Index q = weights.size();
  if (node_means.size() != q || node_cov.rows() != q || node_cov.cols() != q)
    throw InvalidArgumentError("node moments and weights disagree in size");

  // mu = sum_i w_i f(s_i), f(s) = exp(m(s) + gamma(s,s)/2).
  Eigen::VectorXd phi(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const double arg = node_means[i] + 0.5 * node_cov(i, i);
    if (arg > kExpOverflow)
      throw RangeError("integrand exponent " + std::to_string(arg) + " overflows at node " +
                           std::to_string(i),
                       i);
    phi[i] = weights[i] * std::exp(arg);
  }
  const double mu = phi.sum();
  if (!std::isfinite(mu)) throw RangeError("intensity integral mean overflows", -1);
  if (!(mu > 0.0)) throw InternalError("intensity integral mean is nonpositive");

  // The double sum sum_ij w_i w_j g(s_i,s_j) - mu^2 collapses to
  // sum_ij phi_i phi_j (exp(gamma_ij) - 1), which avoids the cancellation of
  // two nearly equal large sums when the covariances are small.
  double sigma2 = 0.0;
  for (Eigen::Index i = 0; i < q; ++i) {
    double row = 0.0;
    for (Eigen::Index j = 0; j < q; ++j) row += phi[j] * std::expm1(node_cov(i, j));
    sigma2 += phi[i] * row;
  }
  const double floor = kSigmaFloor * mu * mu;
  if (!std::isfinite(sigma2)) throw RangeError("intensity integral variance overflows", -1);
  if (sigma2 < floor) sigma2 = floor;

  GammaMoments out;
  out.mu = mu;
  out.sigma2 = sigma2;
  out.alpha = mu * mu / sigma2;
  out.beta = sigma2 / mu;
  return out;
}

GammaMoments gamma_moments(const InducingSet& inducing, const GPValues& values,
                           const HyperParams& params, const QuadratureRule& rule) {
  ConditionalGP gp(inducing, params);
  return gamma_moments_from_moments(gp.mean(rule.nodes, values), gp.cov_full(rule.nodes),
                                    rule.weights);
}

}  // namespace lgcp
