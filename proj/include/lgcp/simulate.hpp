#ifndef LGCP_SIMULATE_HPP
#define LGCP_SIMULATE_HPP

#include "lgcp/types.hpp"

#include <random>
#include <string>
#include <vector>

namespace lgcp {

/// Closed-form or tabulated intensity function over a rectangular domain.
/// `scale` multiplies the base form; the large-n clones in the experiments
/// are scaled copies of the bimodal intensity.
struct IntensitySpec {
  enum class Form { SyntheticBimodal, Constant, Piecewise, Tabulated };

  Form form = Form::Constant;
  Domain domain;
  double scale = 1.0;

  double constant = 0.0;             // Constant
  Eigen::VectorXd edges;             // Piecewise: m+1 ascending edges spanning the domain
  Eigen::VectorXd values;            // Piecewise: m nonnegative levels
  std::vector<Eigen::Index> shape;   // Tabulated: grid nodes per dimension
  Eigen::VectorXd table;             // Tabulated: row-major node values

  /// lambda(t) = 2 exp(-t/15) + exp(-((t-25)/10)^2) on [0, 50].
  static IntensitySpec synthetic_bimodal();
  static IntensitySpec constant_rate(double c, Domain domain);
  static IntensitySpec piecewise(Eigen::VectorXd edges, Eigen::VectorXd values);
  static IntensitySpec tabulated(Domain domain, std::vector<Eigen::Index> shape,
                                 Eigen::VectorXd table);

  IntensitySpec scaled(double factor) const;

  double eval(const Eigen::VectorXd& s) const;

  /// Upper bound dominating the intensity. Exact for the closed forms; grid
  /// maximum times a 1.01 safety factor for tabulated specs, which leaves a
  /// residual risk only for tables hiding spikes between nodes.
  double max_bound() const;

  const char* name() const;
  void validate() const;
};

/// Exact simulation by thinning a homogeneous process at rate max_bound().
EventDataset simulate(const IntensitySpec& spec, std::mt19937_64& rng);

/// Gauss-Legendre integral of the intensity over its domain.
double integral_of(const IntensitySpec& spec, int quad_order);

}  // namespace lgcp

#endif
