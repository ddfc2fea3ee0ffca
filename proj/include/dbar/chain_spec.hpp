#ifndef DBAR_CHAIN_SPEC_HPP
#define DBAR_CHAIN_SPEC_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "dbar/bits.hpp"

namespace dbar {

/// Sentinel lag for "no 1 anywhere in the past" (the all-zero past).
inline constexpr int64_t kLagInfinity = std::numeric_limits<int64_t>::max();

/// Hazard sequence q_l, l in {1,2,...} union {infinity}, for renewal chains
/// that restart whenever they emit a 1.  l is the distance to the most
/// recent 1.  Hazards must decrease (non-strictly) to a positive limit;
/// non-monotone sequences are rejected because the exact extremal and
/// ordering computations rely on monotonicity.
class HazardSequence {
 public:
  enum class Kind { GeometricApproach, Explicit };

  /// q_l = q_inf + amplitude * ratio^l.  Requires amplitude >= 0,
  /// ratio in (0,1), and all values in (0,1).
  static HazardSequence geometric_approach(double q_inf, double amplitude, double ratio);

  /// q_l = values[l-1] for l <= values.size(), q_inf afterwards.
  static HazardSequence explicit_values(std::vector<double> values, double q_inf);

  Kind kind() const { return kind_; }

  /// q_l for a finite lag l >= 1, or the limit for kLagInfinity.
  double at(int64_t ell) const;
  double at_infinity() const { return q_inf_; }

  /// sup over lags >= ell equals q_ell by monotonicity.
  double tail_sup(int64_t ell) const { return at(ell); }

  /// Exact value of sum_{k > K} (q_{k+1} - q_inf), the continuity-rate tail.
  double excess_tail_sum(int64_t K) const;

  /// Smallest lag L with q_L - q_inf <= tol (capped; used for scan horizons).
  int64_t settle_depth(double tol) const;

  double q_inf() const { return q_inf_; }
  double amplitude() const { return amplitude_; }
  double ratio() const { return ratio_; }
  const std::vector<double>& values() const { return values_; }

 private:
  HazardSequence() = default;
  Kind kind_ = Kind::GeometricApproach;
  double q_inf_ = 0;
  double amplitude_ = 0;   // GeometricApproach
  double ratio_ = 0;       // GeometricApproach
  std::vector<double> values_;  // Explicit
};

/// A binary chain of infinite order, given through one of three kernel
/// families.  Immutable after construction; all evaluations are pure.
class ChainSpec {
 public:
  enum class Family { Iid, FiniteMarkov, Renewal };

  static constexpr int kMaxMarkovOrder = 8;

  static ChainSpec iid(double p_one);

  /// `table` maps each chronological suffix string of length `order`
  /// (e.g. "01" = x_{-2}=0, x_{-1}=1) to the probability of emitting 1.
  /// Exactly 2^order entries are required.
  static ChainSpec finite_markov(int order, const std::map<std::string, double>& table);

  static ChainSpec renewal(HazardSequence hazard);

  Family family() const { return family_; }
  bool is_iid() const { return family_ == Family::Iid; }
  bool is_markov() const { return family_ == Family::FiniteMarkov; }
  bool is_renewal() const { return family_ == Family::Renewal; }

  double iid_p1() const;
  int markov_order() const;
  /// Table lookup by packed suffix code, bit i = symbol at lag -(i+1).
  double markov_p1(uint32_t recent_first_code) const;
  const HazardSequence& hazard() const;

  /// Depth beyond which the kernel is a function of the observed suffix
  /// alone: 0 for iid, `order` for finite Markov, unbounded for renewal.
  int64_t resolution_depth() const;
  bool has_finite_resolution() const { return family_ != Family::Renewal; }

  std::string describe() const;

 private:
  ChainSpec() = default;
  Family family_ = Family::Iid;
  double p_ = 0;
  int order_ = 0;
  std::vector<double> table_;  // indexed by packed recent-first code
  HazardSequence hazard_ = HazardSequence::geometric_approach(0.5, 0.0, 0.5);
};

/// Finite sufficient statistic of an infinite past, per kernel family.
/// Renewal pasts are summarized by the distance to the most recent 1,
/// finite Markov pasts by the last `order` symbols, iid pasts by nothing.
struct PastSummary {
  ChainSpec::Family family = ChainSpec::Family::Iid;
  int64_t ell = 0;  // Renewal: >= 1, or kLagInfinity for the all-zero past
  Bits suffix;      // FiniteMarkov: exactly `order` symbols, most recent first

  static PastSummary iid_past();
  static PastSummary renewal_past(int64_t ell);
  static PastSummary markov_past(Bits suffix);

  std::string describe() const;
};

}  // namespace dbar

#endif  // DBAR_CHAIN_SPEC_HPP
