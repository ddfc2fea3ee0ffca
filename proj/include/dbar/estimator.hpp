#ifndef DBAR_ESTIMATOR_HPP
#define DBAR_ESTIMATOR_HPP

#include <span>
#include <string>
#include <vector>

#include "dbar/regeneration.hpp"
#include "dbar/stats.hpp"

namespace dbar {

struct MarginalEstimate {
  double value = 0;
  double error_bound = 0;  // certified for closed forms, heuristic for simulation
  double se = 0;           // statistical part only (simulation methods)
  std::string method;
};

/// Stationary P(chain = 1).  Exact for iid; the stationary vector of the
/// induced suffix chain for finite Markov; the reciprocal mean gap (with
/// a certified geometric tail cutoff below 1e-12) for renewal.
MarginalEstimate marginal_oracle_closed_form(const ChainSpec& spec);

struct ForwardSimOptions {
  int64_t burn_in = 1000;
  int64_t length = 200000;
  uint64_t seed = 0x5eedf00d;
};

/// Simulates the single chain from an all-ones past and averages after
/// burn-in.  The reported error bound stacks the continuity-rate bias
/// bound at the burn-in depth on top of 3 batch-means standard errors.
MarginalEstimate marginal_oracle_forward_sim(const ChainSpec& spec,
                                             const ForwardSimOptions& opts = {});

/// One line of the flat metric CSV: name, value, ci, theoretical, pass.
struct MetricRow {
  std::string name;
  double value = 0;
  double ci = 0;
  double theoretical = 0;
  bool pass = true;
};

struct EstimateReport {
  int64_t n_replicas = 0;
  int64_t window_length = 0;
  uint64_t seed = 0;

  double empirical_mismatch = 0;
  double ci_halfwidth = 0;   // 95% over replica means
  double mismatch_se = 0;
  double theoretical_dbar = 0;

  double marginal_x = 0, marginal_x_se = 0, marginal_x_oracle = 0;
  double marginal_y = 0, marginal_y_se = 0, marginal_y_oracle = 0;

  // Joint cell frequencies in layout order (0,0), (0,1), (1,1).
  double cells[3] = {0, 0, 0};
  double cells_se[3] = {0, 0, 0};
  double cells_theoretical[3] = {0, 0, 0};

  int64_t regen_truncation = 0;
  double regen_rate_empirical = 0;
  double regen_rate_theoretical = 0;
  double regen_rate_sigma = 0;  // across replica means (flags are autocorrelated)
  int64_t regen_eligible = 0;

  int64_t clamp_warning_count = 0;
  double dbar_abs_tolerance = 1e-3;

  /// Per-window-offset mismatch frequencies averaged over replicas.
  std::vector<double> per_offset_mismatch;

  bool pass_optimality() const;
  bool pass_lower_bound() const;
  std::vector<MetricRow> rows() const;
  bool all_pass() const;
};

/// Runs independent perfect samples of [0, window_length-1] under replica
/// ids 0..n_replicas-1 and aggregates replica-mean statistics.
EstimateReport estimate_dbar(const CoupledPair& pair, int64_t n_replicas,
                             int64_t window_length, uint64_t seed);

struct MarginalConsistencyReport {
  MetricRow marginal_x, marginal_y;
  MetricRow cell_rows[3];
  bool all_pass() const;
  std::vector<MetricRow> rows() const;
};

/// Checks that coupled-path marginals match the single-chain oracles and
/// that the joint cells match P(0,0)=P(Y=0), P(1,1)=P(X=1),
/// P(0,1)=P(X=0)-P(Y=0), each within 3 standard errors.
MarginalConsistencyReport marginal_consistency(const CoupledPair& pair, int64_t n_replicas,
                                               int64_t window_length, uint64_t seed);

/// Additive-cost functional sum_n c_n P(X_n != Y_n) over the report's
/// window offsets.  Weights must be nonnegative and sum to 1 within 1e-9;
/// by stationarity the value matches the plain mismatch up to noise.
double mk_cost(const CoupledPair& pair, std::span<const double> weights,
               const EstimateReport& report);

struct MkCostReport {
  double cost = 0;
  double mismatch = 0;
  double diff_mean = 0;
  double diff_se = 0;
  bool pass = true;  // |diff| within 3 se of zero
};

/// Replica-resolved comparison of the weighted cost against the plain
/// mismatch: the per-replica differences give the proper standard error
/// for the stationarity identity.
MkCostReport mk_cost_check(const CoupledPair& pair, std::span<const double> weights,
                           int64_t n_replicas, int64_t window_length, uint64_t seed);

/// Normalized weights proportional to 2^{-offset} over a window.
std::vector<double> geometric_weights(int64_t window_length);

struct RegenStatsReport {
  int64_t truncation_depth = 0;
  int64_t eligible = 0;
  int64_t flagged = 0;
  double rate_empirical = 0;
  double rate_theoretical = 0;
  double rate_sigma = 0;
  Chi2Fit trial_count_fit;       // failed-trial counts vs geometric
  double geometric_parameter = 0;  // truncated product of mass floors
  double chi2_p_threshold = 1e-3;
  bool rate_pass() const;
  bool geometric_pass() const;
  bool all_pass() const { return rate_pass() && geometric_pass(); }
  std::vector<MetricRow> rows() const;
};

/// Regeneration statistics over realized paths with a fixed forward
/// truncation: empirical flag frequency against the truncated product of
/// mass floors, and the failed-trial-count histogram against the
/// geometric law with that success probability.
RegenStatsReport regen_statistics(const CoupledPair& pair, std::span<const CoupledPath> paths,
                                  int64_t truncation_depth, double chi2_p_threshold = 1e-3);

/// Chi-squared fit of realized memory lengths against the memory-weight
/// distribution, over n_draws time-keyed draws.
Chi2Fit memory_length_fit(const CoupledPair& pair, int64_t n_draws,
                          const TimeKeyedRandomness& rng);

}  // namespace dbar

#endif  // DBAR_ESTIMATOR_HPP
