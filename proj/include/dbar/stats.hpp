#ifndef DBAR_STATS_HPP
#define DBAR_STATS_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace dbar {

struct MeanCi {
  double mean = 0;
  double se = 0;          // standard error of the mean
  double halfwidth = 0;   // 95% normal halfwidth
  int64_t n = 0;
};

/// Mean and 95% confidence halfwidth over independent values (replica
/// means in practice; within-path dependence never enters here).
MeanCi mean_ci(std::span<const double> values);

/// Survival function of the chi-squared distribution.
double chi2_sf(double stat, double dof);

struct Chi2Fit {
  double stat = 0;
  int64_t dof = 0;
  double p_value = 1.0;
  int64_t bins = 0;
};

/// Pearson goodness of fit of observed category counts against expected
/// probabilities (which must sum to 1 within 1e-9, tail category
/// included).  Trailing bins are lumped until every expected count
/// reaches `min_expected`.  Degenerate single-bin fits pass with p = 1.
Chi2Fit chi2_goodness_of_fit(std::span<const int64_t> observed,
                             std::span<const double> probs, double min_expected = 5.0);

/// Standard error of an autocorrelated series through batch means.
double batch_means_se(std::span<const double> series, int64_t n_batches = 100);

}  // namespace dbar

#endif  // DBAR_STATS_HPP
