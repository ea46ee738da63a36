#ifndef LGCP_TYPES_HPP
#define LGCP_TYPES_HPP

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace lgcp {

// Error hierarchy. The C API and the CLI map these onto status / exit codes.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed inputs: dimension mismatches, invalid configuration values.
struct InvalidArgumentError : Error {
  using Error::Error;
};

/// Problems with user-supplied data files (events outside the domain, ...).
struct DataError : Error {
  using Error::Error;
};

/// A Gram matrix that stays non-factorizable after the full jitter ladder.
struct ConditioningError : Error {
  using Error::Error;
};

/// Overflow in an exponential; carries the index of the offending node.
struct RangeError : Error {
  RangeError(const std::string& msg, Eigen::Index node) : Error(msg), node_index(node) {}
  Eigen::Index node_index;
};

struct SamplerError : Error {
  using Error::Error;
};

/// A condition the implementation guarantees cannot occur for finite inputs.
struct InternalError : Error {
  using Error::Error;
};

struct SelectionError : Error {
  using Error::Error;
};

/// Bounded axis-aligned rectangle in R^d.
struct Domain {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Domain() = default;
  Domain(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
    validate();
  }
  Domain(double lo, double hi) : lower(Eigen::VectorXd::Constant(1, lo)), upper(Eigen::VectorXd::Constant(1, hi)) {
    validate();
  }

  int dim() const { return static_cast<int>(lower.size()); }

  double volume() const { return (upper - lower).prod(); }

  bool contains(const Eigen::VectorXd& s) const {
    if (s.size() != lower.size()) return false;
    return (s.array() >= lower.array()).all() && (s.array() <= upper.array()).all();
  }

  void validate() const {
    if (lower.size() == 0 || lower.size() != upper.size())
      throw InvalidArgumentError("domain bounds must be nonempty and of equal dimension");
    for (Eigen::Index j = 0; j < lower.size(); ++j) {
      if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]) || !(lower[j] < upper[j]))
        throw InvalidArgumentError("domain requires finite lower < upper in every dimension");
    }
  }
};

/// Observed point pattern: n points (rows) in a bounded rectangular domain.
struct EventDataset {
  Eigen::MatrixXd points;  // n x d
  Domain domain;

  Eigen::Index size() const { return points.rows(); }
  int dim() const { return domain.dim(); }

  void validate() const {
    domain.validate();
    if (points.rows() > 0 && points.cols() != domain.dim())
      throw InvalidArgumentError("event dimension does not match domain dimension");
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
      if (!domain.contains(points.row(i).transpose()))
        throw DataError("event " + std::to_string(i) + " lies outside the domain");
    }
  }
};

}  // namespace lgcp

#endif
