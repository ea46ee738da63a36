#ifndef LGCP_DIAGNOSTICS_HPP
#define LGCP_DIAGNOSTICS_HPP

#include <vector>

namespace lgcp {

/// Effective sample size n / (1 + 2 sum rho_t), with the autocorrelation sum
/// truncated by Geyer's initial monotone positive sequence. A constant series
/// has ESS 1 by definition. Requires at least 10 observations.
double effective_sample_size(const std::vector<double>& series);

}  // namespace lgcp

#endif
