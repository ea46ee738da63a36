#include "lgcp/simulate.hpp"

#include "lgcp/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace lgcp {

IntensitySpec IntensitySpec::synthetic_bimodal() {
  IntensitySpec spec;
  spec.form = Form::SyntheticBimodal;
  spec.domain = Domain(0.0, 50.0);
  return spec;
}

IntensitySpec IntensitySpec::constant_rate(double c, Domain domain) {
  IntensitySpec spec;
  spec.form = Form::Constant;
  spec.constant = c;
  spec.domain = std::move(domain);
  spec.validate();
  return spec;
}

IntensitySpec IntensitySpec::piecewise(Eigen::VectorXd edges, Eigen::VectorXd values) {
  IntensitySpec spec;
  spec.form = Form::Piecewise;
  spec.edges = std::move(edges);
  spec.values = std::move(values);
  if (spec.edges.size() < 2 || spec.values.size() != spec.edges.size() - 1)
    throw InvalidArgumentError("piecewise intensity needs m+1 edges and m values");
  spec.domain = Domain(spec.edges[0], spec.edges[spec.edges.size() - 1]);
  spec.validate();
  return spec;
}

IntensitySpec IntensitySpec::tabulated(Domain domain, std::vector<Eigen::Index> shape,
                                       Eigen::VectorXd table) {
  IntensitySpec spec;
  spec.form = Form::Tabulated;
  spec.domain = std::move(domain);
  spec.shape = std::move(shape);
  spec.table = std::move(table);
  if (spec.shape.size() != static_cast<size_t>(spec.domain.dim()))
    throw InvalidArgumentError("tabulated intensity shape does not match domain dimension");
  Eigen::Index expected = 1;
  for (Eigen::Index m : spec.shape) {
    if (m < 2) throw InvalidArgumentError("tabulated intensity needs at least 2 nodes per dimension");
    expected *= m;
  }
  if (spec.table.size() != expected)
    throw InvalidArgumentError("tabulated intensity table size does not match shape");
  spec.validate();
  return spec;
}

IntensitySpec IntensitySpec::scaled(double factor) const {
  if (!(factor >= 0.0) || !std::isfinite(factor))
    throw InvalidArgumentError("intensity scale must be nonnegative and finite");
  IntensitySpec copy = *this;
  copy.scale = scale * factor;
  return copy;
}

void IntensitySpec::validate() const {
  domain.validate();
  switch (form) {
    case Form::SyntheticBimodal:
      if (domain.dim() != 1) throw InvalidArgumentError("bimodal intensity is one-dimensional");
      break;
    case Form::Constant:
      if (constant < 0.0) throw InvalidArgumentError("intensity must be nonnegative");
      break;
    case Form::Piecewise:
      for (Eigen::Index i = 0; i + 1 < edges.size(); ++i)
        if (!(edges[i] < edges[i + 1])) throw InvalidArgumentError("piecewise edges must ascend");
      if ((values.array() < 0.0).any()) throw InvalidArgumentError("intensity must be nonnegative");
      break;
    case Form::Tabulated:
      if ((table.array() < 0.0).any()) throw InvalidArgumentError("intensity must be nonnegative");
      break;
  }
}

double IntensitySpec::eval(const Eigen::VectorXd& s) const {
  if (s.size() != domain.dim()) throw InvalidArgumentError("point dimension mismatch in intensity");
  double base = 0.0;
  switch (form) {
    case Form::SyntheticBimodal: {
      const double t = s[0];
      const double bump = (t - 25.0) / 10.0;
      base = 2.0 * std::exp(-t / 15.0) + std::exp(-bump * bump);
      break;
    }
    case Form::Constant:
      base = constant;
      break;
    case Form::Piecewise: {
      const double t = s[0];
      // Right-closed last cell so the upper domain edge is valid.
      Eigen::Index cell = values.size() - 1;
      for (Eigen::Index i = 0; i + 1 < edges.size(); ++i) {
        if (t < edges[i + 1]) {
          cell = i;
          break;
        }
      }
      base = values[cell];
      break;
    }
    case Form::Tabulated: {
      // Multilinear interpolation on the node grid.
      const int d = domain.dim();
      Eigen::VectorXd frac(d);
      std::vector<Eigen::Index> cell(d);
      for (int j = 0; j < d; ++j) {
        const Eigen::Index m = shape[j];
        const double step = (domain.upper[j] - domain.lower[j]) / static_cast<double>(m - 1);
        double u = (s[j] - domain.lower[j]) / step;
        Eigen::Index c = static_cast<Eigen::Index>(std::floor(u));
        c = std::clamp<Eigen::Index>(c, 0, m - 2);
        cell[j] = c;
        frac[j] = std::clamp(u - static_cast<double>(c), 0.0, 1.0);
      }
      if (d == 1) {
        base = (1.0 - frac[0]) * table[cell[0]] + frac[0] * table[cell[0] + 1];
      } else {
        const Eigen::Index stride = shape[1];
        auto at = [&](Eigen::Index i, Eigen::Index j) { return table[i * stride + j]; };
        const double v00 = at(cell[0], cell[1]), v01 = at(cell[0], cell[1] + 1);
        const double v10 = at(cell[0] + 1, cell[1]), v11 = at(cell[0] + 1, cell[1] + 1);
        base = (1.0 - frac[0]) * ((1.0 - frac[1]) * v00 + frac[1] * v01) +
               frac[0] * ((1.0 - frac[1]) * v10 + frac[1] * v11);
      }
      break;
    }
  }
  return scale * base;
}

double IntensitySpec::max_bound() const {
  double base = 0.0;
  switch (form) {
    case Form::SyntheticBimodal:
      base = 3.0;  // 2 e^{-t/15} <= 2 and the Gaussian bump <= 1
      break;
    case Form::Constant:
      base = constant;
      break;
    case Form::Piecewise:
      base = values.size() ? values.maxCoeff() : 0.0;
      break;
    case Form::Tabulated:
      base = table.size() ? table.maxCoeff() * 1.01 : 0.0;
      break;
  }
  return scale * base;
}

const char* IntensitySpec::name() const {
  switch (form) {
    case Form::SyntheticBimodal: return "synthetic-bimodal";
    case Form::Constant: return "constant";
    case Form::Piecewise: return "piecewise";
    case Form::Tabulated: return "tabulated-on-grid";
  }
  return "unknown";
}

EventDataset simulate(const IntensitySpec& spec, std::mt19937_64& rng) {
  spec.validate();
  EventDataset out;
  out.domain = spec.domain;
  const int d = spec.domain.dim();
  out.points.resize(0, d);

  const double bound = spec.max_bound();
  if (!(bound > 0.0)) return out;  // identically zero intensity

  std::poisson_distribution<Eigen::Index> count_dist(bound * spec.domain.volume());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Eigen::Index candidates = count_dist(rng);

  std::vector<double> kept;
  Eigen::VectorXd s(d);
  for (Eigen::Index i = 0; i < candidates; ++i) {
    for (int j = 0; j < d; ++j)
      s[j] = spec.domain.lower[j] + (spec.domain.upper[j] - spec.domain.lower[j]) * unit(rng);
    const double lambda = spec.eval(s);
    if (lambda < 0.0) throw InvalidArgumentError("negative intensity encountered while thinning");
    if (unit(rng) * bound < lambda)
      for (int j = 0; j < d; ++j) kept.push_back(s[j]);
  }

  if (!kept.empty()) {
    out.points =
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            kept.data(), static_cast<Eigen::Index>(kept.size()) / d, d);
  }
  return out;
}

namespace {

double quadrature_sum(const IntensitySpec& spec, const Domain& domain, int order) {
  const QuadratureRule rule = gauss_legendre_rule(order, domain);
  double total = 0.0;
  for (Eigen::Index i = 0; i < rule.size(); ++i)
    total += rule.weights[i] * spec.eval(rule.nodes.row(i).transpose());
  return total;
}

}  // namespace

double integral_of(const IntensitySpec& spec, int quad_order) {
  spec.validate();
  if (quad_order < 1) throw InvalidArgumentError("quadrature order must be positive");

  // The intensity of a piecewise spec is discontinuous at the edges, where a
  // single global rule converges slowly; integrate piece by piece instead.
  if (spec.form == IntensitySpec::Form::Piecewise) {
    double total = 0.0;
    for (Eigen::Index i = 0; i + 1 < spec.edges.size(); ++i)
      total += spec.scale * spec.values[i] * (spec.edges[i + 1] - spec.edges[i]);
    return total;
  }

  // Orders beyond the single-rule cap become composite panels of equal width.
  const int panels = (quad_order + 63) / 64;
  const int order = (quad_order + panels - 1) / panels;
  if (panels == 1) return quadrature_sum(spec, spec.domain, order);

  const int d = spec.domain.dim();
  double total = 0.0;
  if (d == 1) {
    const double width = (spec.domain.upper[0] - spec.domain.lower[0]) / panels;
    for (int i = 0; i < panels; ++i) {
      const double lo = spec.domain.lower[0] + i * width;
      total += quadrature_sum(spec, Domain(lo, lo + width), order);
    }
  } else {
    const double wx = (spec.domain.upper[0] - spec.domain.lower[0]) / panels;
    const double wy = (spec.domain.upper[1] - spec.domain.lower[1]) / panels;
    for (int i = 0; i < panels; ++i) {
      for (int j = 0; j < panels; ++j) {
        Eigen::VectorXd lo(2), hi(2);
        lo << spec.domain.lower[0] + i * wx, spec.domain.lower[1] + j * wy;
        hi << lo[0] + wx, lo[1] + wy;
        total += quadrature_sum(spec, Domain(lo, hi), order);
      }
    }
  }
  return total;
}

}  // namespace lgcp
