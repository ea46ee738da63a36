#include "lgcp/diagnostics.hpp"

#include "lgcp/types.hpp"

#include <cmath>
#include <limits>

namespace lgcp {

double effective_sample_size(const std::vector<double>& series) {
  const size_t n = series.size();
  if (n < 10) throw InvalidArgumentError("effective sample size needs at least 10 observations");

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  const size_t max_lag = n - 1;
  auto autocov = [&](size_t t) {
    double c = 0.0;
    for (size_t i = 0; i + t < n; ++i) c += (series[i] - mean) * (series[i + t] - mean);
    return c / static_cast<double>(n);
  };

  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 1.0;  // constant series

  // Geyer: sum paired autocorrelations Gamma_m = rho_{2m} + rho_{2m+1} while
  // positive, enforcing monotone decrease.
  double tau = 0.0;
  double prev = std::numeric_limits<double>::infinity();
  for (size_t m = 0; 2 * m + 1 <= max_lag; ++m) {
    double gamma = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
    if (gamma <= 0.0) break;
    gamma = std::min(gamma, prev);
    prev = gamma;
    tau += 2.0 * gamma;
  }
  tau -= 1.0;  // Gamma_0 double-counts rho_0
  tau = std::max(tau, 1e-12);

  return static_cast<double>(n) / tau;
}

}  // namespace lgcp
