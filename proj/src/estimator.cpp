#include "dbar/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "dbar/detail/envelope_table.hpp"
#include "dbar/kernel.hpp"

namespace dbar {

namespace {

MarginalEstimate closed_form_markov(const ChainSpec& spec) {
  const int d = spec.markov_order();
  const size_t n = size_t{1} << d;
  const uint32_t mask = static_cast<uint32_t>(n - 1);
  // Stationary vector of the suffix chain: solve (P^T - I) pi = 0 with the
  // last equation replaced by normalization.
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (size_t s = 0; s < n; ++s) {
    const double p = spec.markov_p1(static_cast<uint32_t>(s));
    const uint32_t s1 = ((static_cast<uint32_t>(s) << 1) | 1u) & mask;
    const uint32_t s0 = (static_cast<uint32_t>(s) << 1) & mask;
    a[s1][s] += p;
    a[s0][s] += 1.0 - p;
  }
  for (size_t i = 0; i < n; ++i) a[i][i] -= 1.0;
  for (size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;

  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    for (size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-13) {
      throw UsageError("closed-form marginal: suffix chain is not irreducible");
    }
    std::swap(a[col], a[piv]);
    for (size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (size_t j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
    }
  }
  double p1 = 0.0;
  for (size_t s = 0; s < n; ++s) {
    const double pi_s = a[s][n] / a[s][s];
    p1 += pi_s * spec.markov_p1(static_cast<uint32_t>(s));
  }
  return MarginalEstimate{p1, 0.0, 0.0, "closed_form"};
}

MarginalEstimate closed_form_renewal(const ChainSpec& spec) {
  const auto& h = spec.hazard();
  const double q_inf = h.at_infinity();
  // Mean gap between 1s: 1 + sum_k prod_{j<=k} (1 - q_j), truncated once
  // the certified geometric tail drops below 1e-12.
  double mu = 1.0;
  double prod = 1.0;
  double tail = (1.0 - q_inf) / q_inf;
  for (int64_t k = 1; k < (int64_t{1} << 24); ++k) {
    prod *= 1.0 - h.at(k);
    mu += prod;
    tail = prod * (1.0 - q_inf) / q_inf;
    if (tail < 1e-12) break;
  }
  return MarginalEstimate{1.0 / mu, tail / (mu * mu), 0.0, "closed_form"};
}

}  // namespace

MarginalEstimate marginal_oracle_closed_form(const ChainSpec& spec) {
  switch (spec.family()) {
    case ChainSpec::Family::Iid:
      return MarginalEstimate{spec.iid_p1(), 0.0, 0.0, "closed_form"};
    case ChainSpec::Family::FiniteMarkov:
      return closed_form_markov(spec);
    case ChainSpec::Family::Renewal:
      return closed_form_renewal(spec);
  }
  throw std::logic_error("marginal_oracle_closed_form: unreachable");
}

MarginalEstimate marginal_oracle_forward_sim(const ChainSpec& spec,
                                             const ForwardSimOptions& opts) {
  if (opts.length < 1 || opts.burn_in < 0) {
    throw UsageError("forward_sim: bad burn-in or length");
  }
  const TimeKeyedRandomness rng{opts.seed, 0};
  // All-ones initial past; a renewal chain then starts at lag 1.
  int64_t ell = 1;
  uint32_t window = 0;
  if (spec.is_markov()) window = (uint32_t{1} << spec.markov_order()) - 1u;

  auto step_p1 = [&]() {
    switch (spec.family()) {
      case ChainSpec::Family::Iid:
        return spec.iid_p1();
      case ChainSpec::Family::Renewal:
        return spec.hazard().at(ell);
      case ChainSpec::Family::FiniteMarkov:
        return spec.markov_p1(window);
    }
    return 0.0;
  };

  std::vector<double> kept;
  kept.reserve(static_cast<size_t>(opts.length));
  for (int64_t t = 0; t < opts.burn_in + opts.length; ++t) {
    const int bit = rng.uniform_at(t) < step_p1() ? 1 : 0;
    if (t >= opts.burn_in) kept.push_back(static_cast<double>(bit));
    if (spec.is_renewal()) {
      ell = bit ? 1 : (ell == kLagInfinity ? kLagInfinity : ell + 1);
    } else if (spec.is_markov()) {
      window = ((window << 1) | static_cast<uint32_t>(bit)) &
               ((uint32_t{1} << spec.markov_order()) - 1u);
    }
  }
  const double mean =
      std::accumulate(kept.begin(), kept.end(), 0.0) / static_cast<double>(kept.size());
  const double se = batch_means_se(kept);
  const double bias = continuity_rate(spec, opts.burn_in);
  MarginalEstimate out;
  out.value = mean;
  out.se = se;
  out.error_bound = bias + 3.0 * se;
  out.method = "forward_sim";
  return out;
}

namespace {

struct ReplicaStats {
  std::vector<double> mismatch;  // per replica means
  std::vector<double> x_ones;
  std::vector<double> y_ones;
  std::vector<double> cell[3];
  std::vector<double> regen_rate;  // per replica truncated flag rates
  std::vector<double> per_offset;  // summed, divided at the end
  int64_t regen_eligible = 0;
  int64_t regen_flagged = 0;
};

// Truncated regeneration flags: t counts as flagged when L_{t+j} <= j for
// all j < depth; eligible t keep the whole check window inside [m, n].
void count_truncated_flags(const CoupledPath& path, int64_t depth, int64_t* eligible,
                           int64_t* flagged) {
  const int64_t m = path.window_m();
  const int64_t n = path.window_n();
  if (n - m + 1 < depth) return;
  // Sliding-window minimum of s - L_s over [t, t+depth-1].
  std::deque<int64_t> dq;  // times with increasing slack
  auto slack = [&](int64_t s) { return s - path.memory_length(s); };
  for (int64_t s = m; s <= n; ++s) {
    while (!dq.empty() && slack(dq.back()) >= slack(s)) dq.pop_back();
    dq.push_back(s);
    const int64_t t = s - depth + 1;
    if (t < m) continue;
    while (dq.front() < t) dq.pop_front();
    ++*eligible;
    if (slack(dq.front()) >= t) ++*flagged;
  }
}

ReplicaStats run_replicas(const CoupledPair& pair, int64_t n_replicas, int64_t window_length,
                          uint64_t seed, int64_t regen_depth) {
  if (n_replicas < 1 || window_length < 1) {
    throw UsageError("estimator: need at least one replica and a nonempty window");
  }
  ReplicaStats st;
  st.per_offset.assign(static_cast<size_t>(window_length), 0.0);
  const int64_t n = window_length - 1;
  for (int64_t r = 0; r < n_replicas; ++r) {
    const CoupledPath path =
        perfect_sample(pair, TimeKeyedRandomness{seed, static_cast<uint64_t>(r)}, 0, n);
    int64_t mism = 0, xs = 0, ys = 0;
    int64_t cells[3] = {0, 0, 0};
    for (int64_t t = 0; t <= n; ++t) {
      const SymbolPair s = path.at(t);
      ++cells[static_cast<int>(s)];
      xs += x_bit(s);
      ys += y_bit(s);
      if (s == SymbolPair::Discordant) {
        ++mism;
        st.per_offset[static_cast<size_t>(t)] += 1.0;
      }
    }
    const double len = static_cast<double>(window_length);
    st.mismatch.push_back(static_cast<double>(mism) / len);
    st.x_ones.push_back(static_cast<double>(xs) / len);
    st.y_ones.push_back(static_cast<double>(ys) / len);
    for (int c = 0; c < 3; ++c) {
      st.cell[c].push_back(static_cast<double>(cells[c]) / len);
    }
    int64_t eligible = 0, flagged = 0;
    count_truncated_flags(path, regen_depth, &eligible, &flagged);
    st.regen_eligible += eligible;
    st.regen_flagged += flagged;
    if (eligible > 0) {
      st.regen_rate.push_back(static_cast<double>(flagged) / static_cast<double>(eligible));
    }
  }
  for (double& v : st.per_offset) v /= static_cast<double>(n_replicas);
  return st;
}

double truncated_floor_product(const CoupledPair& pair, int64_t depth) {
  double p = 1.0;
  for (int64_t j = 0; j < depth; ++j) p *= envelope_floor(pair, j);
  return p;
}

}  // namespace

bool EstimateReport::pass_optimality() const {
  return std::abs(empirical_mismatch - theoretical_dbar) <=
         std::max(3.0 * ci_halfwidth, dbar_abs_tolerance);
}

bool EstimateReport::pass_lower_bound() const {
  return empirical_mismatch + 3.0 * ci_halfwidth >= theoretical_dbar - dbar_abs_tolerance;
}

std::vector<MetricRow> EstimateReport::rows() const {
  std::vector<MetricRow> out;
  out.push_back({"empirical_mismatch", empirical_mismatch, ci_halfwidth, theoretical_dbar,
                 pass_optimality()});
  out.push_back({"lower_bound_check", empirical_mismatch + 3.0 * ci_halfwidth, ci_halfwidth,
                 theoretical_dbar, pass_lower_bound()});
  out.push_back({"marginal_x", marginal_x, 1.959963984540054 * marginal_x_se,
                 marginal_x_oracle,
                 std::abs(marginal_x - marginal_x_oracle) <= 3.0 * marginal_x_se + 1e-9});
  out.push_back({"marginal_y", marginal_y, 1.959963984540054 * marginal_y_se,
                 marginal_y_oracle,
                 std::abs(marginal_y - marginal_y_oracle) <= 3.0 * marginal_y_se + 1e-9});
  const char* cell_names[3] = {"cell_00", "cell_01", "cell_11"};
  for (int c = 0; c < 3; ++c) {
    out.push_back({cell_names[c], cells[c], 1.959963984540054 * cells_se[c],
                   cells_theoretical[c],
                   std::abs(cells[c] - cells_theoretical[c]) <= 3.0 * cells_se[c] + 1e-9});
  }
  const bool regen_pass =
      regen_eligible == 0 || std::abs(regen_rate_empirical - regen_rate_theoretical) <=
                                 3.0 * regen_rate_sigma + 1e-9;
  out.push_back({"regen_rate", regen_rate_empirical, 3.0 * regen_rate_sigma,
                 regen_rate_theoretical, regen_pass});
  out.push_back({"clamp_warnings", static_cast<double>(clamp_warning_count), 0.0, 0.0, true});
  return out;
}

bool EstimateReport::all_pass() const {
  for (const auto& r : rows()) {
    if (!r.pass) return false;
  }
  return true;
}

EstimateReport estimate_dbar(const CoupledPair& pair, int64_t n_replicas,
                             int64_t window_length, uint64_t seed) {
  EstimateReport rep;
  rep.n_replicas = n_replicas;
  rep.window_length = window_length;
  rep.seed = seed;
  rep.regen_truncation = std::min<int64_t>(64, window_length);

  const ReplicaStats st = run_replicas(pair, n_replicas, window_length, seed,
                                       rep.regen_truncation);

  const MeanCi mism = mean_ci(st.mismatch);
  rep.empirical_mismatch = mism.mean;
  rep.ci_halfwidth = mism.halfwidth;
  rep.mismatch_se = mism.se;

  const MarginalEstimate ox = marginal_oracle_closed_form(pair.chain_x());
  const MarginalEstimate oy = marginal_oracle_closed_form(pair.chain_y());
  rep.theoretical_dbar = oy.value - ox.value;

  const MeanCi mx = mean_ci(st.x_ones);
  const MeanCi my = mean_ci(st.y_ones);
  rep.marginal_x = mx.mean;
  rep.marginal_x_se = mx.se;
  rep.marginal_x_oracle = ox.value;
  rep.marginal_y = my.mean;
  rep.marginal_y_se = my.se;
  rep.marginal_y_oracle = oy.value;

  rep.cells_theoretical[static_cast<int>(SymbolPair::BothZero)] = 1.0 - oy.value;
  rep.cells_theoretical[static_cast<int>(SymbolPair::Discordant)] = oy.value - ox.value;
  rep.cells_theoretical[static_cast<int>(SymbolPair::BothOne)] = ox.value;
  for (int c = 0; c < 3; ++c) {
    const MeanCi mc = mean_ci(st.cell[c]);
    rep.cells[c] = mc.mean;
    rep.cells_se[c] = mc.se;
  }

  rep.regen_eligible = st.regen_eligible;
  rep.regen_rate_theoretical = truncated_floor_product(pair, rep.regen_truncation);
  if (!st.regen_rate.empty()) {
    // Flags at nearby times share memory-length draws, so the spread is
    // taken across replicas rather than from a binomial count.
    const MeanCi rc = mean_ci(st.regen_rate);
    rep.regen_rate_empirical = rc.mean;
    rep.regen_rate_sigma = rc.se;
  }

  rep.clamp_warning_count = pair.clamp_warning_count();
  rep.per_offset_mismatch = st.per_offset;
  return rep;
}

bool MarginalConsistencyReport::all_pass() const {
  if (!marginal_x.pass || !marginal_y.pass) return false;
  for (const auto& c : cell_rows) {
    if (!c.pass) return false;
  }
  return true;
}

std::vector<MetricRow> MarginalConsistencyReport::rows() const {
  std::vector<MetricRow> out{marginal_x, marginal_y};
  out.insert(out.end(), std::begin(cell_rows), std::end(cell_rows));
  return out;
}

MarginalConsistencyReport marginal_consistency(const CoupledPair& pair, int64_t n_replicas,
                                               int64_t window_length, uint64_t seed) {
  const EstimateReport rep = estimate_dbar(pair, n_replicas, window_length, seed);
  MarginalConsistencyReport out;
  auto row = [](std::string name, double emp, double se, double theo) {
    return MetricRow{std::move(name), emp, 1.959963984540054 * se, theo,
                     std::abs(emp - theo) <= 3.0 * se + 1e-9};
  };
  out.marginal_x = row("marginal_x", rep.marginal_x, rep.marginal_x_se, rep.marginal_x_oracle);
  out.marginal_y = row("marginal_y", rep.marginal_y, rep.marginal_y_se, rep.marginal_y_oracle);
  const char* names[3] = {"cell_00", "cell_01", "cell_11"};
  for (int c = 0; c < 3; ++c) {
    out.cell_rows[c] = row(names[c], rep.cells[c], rep.cells_se[c], rep.cells_theoretical[c]);
  }
  return out;
}

double mk_cost(const CoupledPair& pair, std::span<const double> weights,
               const EstimateReport& report) {
  (void)pair;
  if (weights.size() != report.per_offset_mismatch.size()) {
    throw UsageError("mk_cost: weights must align with the report's window offsets");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw UsageError("mk_cost: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw UsageError("mk_cost: weights must sum to 1 within 1e-9");
  }
  double cost = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    cost += weights[i] * report.per_offset_mismatch[i];
  }
  return cost;
}

MkCostReport mk_cost_check(const CoupledPair& pair, std::span<const double> weights,
                           int64_t n_replicas, int64_t window_length, uint64_t seed) {
  if (static_cast<int64_t>(weights.size()) != window_length) {
    throw UsageError("mk_cost_check: weights must cover the window");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > 1e-9) {
    throw UsageError("mk_cost_check: weights must sum to 1 within 1e-9");
  }
  std::vector<double> costs, mismatches, diffs;
  for (int64_t r = 0; r < n_replicas; ++r) {
    const CoupledPath path = perfect_sample(
        pair, TimeKeyedRandomness{seed, static_cast<uint64_t>(r)}, 0, window_length - 1);
    double cost = 0.0;
    int64_t mism = 0;
    for (int64_t t = 0; t < window_length; ++t) {
      if (path.at(t) == SymbolPair::Discordant) {
        ++mism;
        cost += weights[static_cast<size_t>(t)];
      }
    }
    costs.push_back(cost);
    mismatches.push_back(static_cast<double>(mism) / static_cast<double>(window_length));
    diffs.push_back(costs.back() - mismatches.back());
  }
  MkCostReport rep;
  rep.cost = mean_ci(costs).mean;
  rep.mismatch = mean_ci(mismatches).mean;
  const MeanCi d = mean_ci(diffs);
  rep.diff_mean = d.mean;
  rep.diff_se = d.se;
  rep.pass = std::abs(d.mean) <= 3.0 * d.se + 1e-9;
  return rep;
}

std::vector<double> geometric_weights(int64_t window_length) {
  std::vector<double> w(static_cast<size_t>(window_length));
  double total = 0.0;
  double v = 1.0;
  for (auto& x : w) {
    x = v;
    total += v;
    v *= 0.5;
  }
  for (auto& x : w) x /= total;
  return w;
}

bool RegenStatsReport::rate_pass() const {
  if (eligible == 0) return true;
  return std::abs(rate_empirical - rate_theoretical) <= 3.0 * rate_sigma + 1e-9;
}

bool RegenStatsReport::geometric_pass() const {
  return trial_count_fit.p_value >= chi2_p_threshold;
}

std::vector<MetricRow> RegenStatsReport::rows() const {
  std::vector<MetricRow> out;
  out.push_back({"regen_rate", rate_empirical, 3.0 * rate_sigma, rate_theoretical,
                 rate_pass()});
  out.push_back({"geom_trials_chi2_p", trial_count_fit.p_value, 0.0, chi2_p_threshold,
                 geometric_pass()});
  out.push_back({"geom_parameter", geometric_parameter, 0.0, geometric_parameter, true});
  return out;
}

RegenStatsReport regen_statistics(const CoupledPair& pair, std::span<const CoupledPath> paths,
                                  int64_t truncation_depth, double chi2_p_threshold) {
  if (truncation_depth < 1) throw UsageError("regen_statistics: truncation must be >= 1");
  RegenStatsReport rep;
  rep.truncation_depth = truncation_depth;
  rep.chi2_p_threshold = chi2_p_threshold;
  rep.rate_theoretical = truncated_floor_product(pair, truncation_depth);
  rep.geometric_parameter = rep.rate_theoretical;

  std::vector<int64_t> trial_counts;
  for (const auto& path : paths) {
    count_truncated_flags(path, truncation_depth, &rep.eligible, &rep.flagged);
    // Failed-trial counting: from the window start, scan forward; each
    // violation L_{pos+j} > j restarts just past it, each clean depth-long
    // stretch closes one trial sequence.  Blocks are disjoint, so the
    // sequence counts are independent draws.
    int64_t pos = path.window_m();
    int64_t fails = 0;
    while (pos + truncation_depth - 1 <= path.window_n()) {
      bool ok = true;
      for (int64_t j = 0; j < truncation_depth; ++j) {
        if (path.memory_length(pos + j) > j) {
          ++fails;
          pos = pos + j + 1;
          ok = false;
          break;
        }
      }
      if (ok) {
        trial_counts.push_back(fails + 1);
        fails = 0;
        pos += truncation_depth;
      }
    }
  }
  if (rep.eligible > 0) {
    rep.rate_empirical =
        static_cast<double>(rep.flagged) / static_cast<double>(rep.eligible);
    const double p = rep.rate_theoretical;
    rep.rate_sigma =
        std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(rep.eligible));
  }

  if (!trial_counts.empty()) {
    const int64_t max_count = *std::max_element(trial_counts.begin(), trial_counts.end());
    std::vector<int64_t> observed(static_cast<size_t>(max_count) + 1, 0);
    for (int64_t c : trial_counts) ++observed[static_cast<size_t>(c - 1)];
    std::vector<double> probs(static_cast<size_t>(max_count) + 1, 0.0);
    const double p = rep.geometric_parameter;
    double cum = 0.0;
    for (int64_t k = 1; k <= max_count; ++k) {
      probs[static_cast<size_t>(k - 1)] = p * std::pow(1.0 - p, static_cast<double>(k - 1));
      cum += probs[static_cast<size_t>(k - 1)];
    }
    probs.back() = 1.0 - cum;  // open tail bucket (counts beyond max land here)
    rep.trial_count_fit = chi2_goodness_of_fit(observed, probs);
  }
  return rep;
}

Chi2Fit memory_length_fit(const CoupledPair& pair, int64_t n_draws,
                          const TimeKeyedRandomness& rng) {
  if (n_draws < 1) throw UsageError("memory_length_fit: need draws");
  std::vector<int64_t> observed;
  for (int64_t t = 0; t < n_draws; ++t) {
    const auto len = static_cast<size_t>(sample_memory_length(pair, rng, t));
    if (observed.size() <= len) observed.resize(len + 1, 0);
    ++observed[len];
  }
  // Weights up to the saturation depth of the mass floor; beyond it the
  // remaining mass is an exact-zero tail.
  std::vector<double> probs;
  for (int64_t k = 0;; ++k) {
    probs.push_back(memory_weight(pair, k));
    if (envelope_floor(pair, k) >= 1.0) break;
  }
  if (observed.size() > probs.size()) {
    throw std::logic_error("memory_length_fit: draw beyond the saturated floor");
  }
  observed.resize(probs.size(), 0);
  return chi2_goodness_of_fit(observed, probs);
}

}  // namespace dbar
