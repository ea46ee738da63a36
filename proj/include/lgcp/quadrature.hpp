#ifndef LGCP_QUADRATURE_HPP
#define LGCP_QUADRATURE_HPP

#include "lgcp/conditional_gp.hpp"
#include "lgcp/types.hpp"

namespace lgcp {

/// Gauss-Legendre rule of order p per dimension, tensorized over a rectangle.
/// `weights` already carry the affine volume scaling, so an integral is just
/// weights.dot(f(nodes)).
struct QuadratureRule {
  int order = 0;
  Eigen::VectorXd nodes_1d;    // roots of the Legendre polynomial on [-1, 1]
  Eigen::VectorXd weights_1d;  // reference weights, sum to 2
  Eigen::MatrixXd nodes;       // p^d x d, mapped into the domain
  Eigen::VectorXd weights;     // p^d, mapped
  Domain domain;

  Eigen::Index size() const { return weights.size(); }
};

QuadratureRule gauss_legendre_rule(int p, const Domain& domain);

/// Moment-matched Gamma parameters of the intensity integral I.
struct GammaMoments {
  double mu = 0.0;      // E[I]
  double sigma2 = 0.0;  // Var[I], floored at 1e-12 * mu^2
  double alpha = 0.0;   // mu^2 / sigma2
  double beta = 0.0;    // sigma2 / mu
};

/// Moments from precomputed conditional means and covariances at the nodes.
/// This is the computational core; gamma_moments() feeds it from a
/// ConditionalGP and it is also the injection point for stubbed moments.
GammaMoments gamma_moments_from_moments(const Eigen::VectorXd& node_means,
                                        const Eigen::MatrixXd& node_cov,
                                        const Eigen::VectorXd& weights);

GammaMoments gamma_moments(const InducingSet& inducing, const GPValues& values,
                           const HyperParams& params, const QuadratureRule& rule);

}  // namespace lgcp

#endif
