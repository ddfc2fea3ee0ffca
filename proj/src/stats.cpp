#include "dbar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace dbar {

namespace {
constexpr double kZ975 = 1.959963984540054;  // 97.5% normal quantile
}

MeanCi mean_ci(std::span<const double> values) {
  MeanCi out;
  out.n = static_cast<int64_t>(values.size());
  if (out.n == 0) return out;
  out.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(out.n);
  if (out.n < 2) return out;
  double ss = 0.0;
  for (double v : values) {
    const double d = v - out.mean;
    ss += d * d;
  }
  const double var = ss / static_cast<double>(out.n - 1);
  out.se = std::sqrt(var / static_cast<double>(out.n));
  out.halfwidth = kZ975 * out.se;
  return out;
}

double chi2_sf(double stat, double dof) {
  if (dof <= 0) return 1.0;
  if (stat <= 0) return 1.0;
  return boost::math::gamma_q(dof / 2.0, stat / 2.0);
}

Chi2Fit chi2_goodness_of_fit(std::span<const int64_t> observed,
                             std::span<const double> probs, double min_expected) {
  if (observed.size() != probs.size()) {
    throw std::invalid_argument("chi2: observed and probability sizes differ");
  }
  const double total_prob = std::accumulate(probs.begin(), probs.end(), 0.0);
  if (std::abs(total_prob - 1.0) > 1e-9) {
    throw std::invalid_argument("chi2: probabilities must sum to 1 (tail included)");
  }
  const int64_t n = std::accumulate(observed.begin(), observed.end(), int64_t{0});
  const auto nd = static_cast<double>(n);

  // Lump bins left to right so every kept bin has enough expected mass;
  // whatever trails off merges into the last kept bin.
  std::vector<double> obs_bins, exp_bins;
  double obs_acc = 0.0, exp_acc = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    obs_acc += static_cast<double>(observed[i]);
    exp_acc += probs[i] * nd;
    if (exp_acc >= min_expected) {
      obs_bins.push_back(obs_acc);
      exp_bins.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (!obs_bins.empty()) {
      obs_bins.back() += obs_acc;
      exp_bins.back() += exp_acc;
    } else {
      obs_bins.push_back(obs_acc);
      exp_bins.push_back(exp_acc);
    }
  }

  Chi2Fit fit;
  fit.bins = static_cast<int64_t>(obs_bins.size());
  fit.dof = fit.bins - 1;
  if (fit.dof <= 0) {
    fit.p_value = 1.0;
    return fit;
  }
  for (size_t b = 0; b < obs_bins.size(); ++b) {
    const double d = obs_bins[b] - exp_bins[b];
    fit.stat += d * d / exp_bins[b];
  }
  fit.p_value = chi2_sf(fit.stat, static_cast<double>(fit.dof));
  return fit;
}

double batch_means_se(std::span<const double> series, int64_t n_batches) {
  const auto n = static_cast<int64_t>(series.size());
  if (n < 2) return 0.0;
  n_batches = std::clamp<int64_t>(n_batches, 2, n);
  const int64_t batch = n / n_batches;
  std::vector<double> means;
  means.reserve(static_cast<size_t>(n_batches));
  for (int64_t b = 0; b < n_batches; ++b) {
    const int64_t lo = b * batch;
    const int64_t hi = b + 1 == n_batches ? n : lo + batch;
    double s = 0.0;
    for (int64_t i = lo; i < hi; ++i) s += series[static_cast<size_t>(i)];
    means.push_back(s / static_cast<double>(hi - lo));
  }
  return mean_ci(means).se;
}

}  // namespace dbar
