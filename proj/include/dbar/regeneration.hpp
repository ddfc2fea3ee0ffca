#ifndef DBAR_REGENERATION_HPP
#define DBAR_REGENERATION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "dbar/coupling.hpp"
#include "dbar/rng.hpp"

namespace dbar {

/// The memory length at time t, read from the time-keyed uniform through
/// the global mass floors; its marginal law is exactly the memory-weight
/// distribution.  Throws DiagnosticError (naming t and the uniform) at
/// the hard depth cap.
int64_t sample_memory_length(const CoupledPair& pair, const TimeKeyedRandomness& rng,
                             int64_t t);

struct BacktrackOptions {
  /// Abort after backing up this far below m; signals a pair whose
  /// envelope mass is impractically small.
  uint64_t max_depth = 1'000'000;
};

struct BacktrackResult {
  int64_t time = 0;       // largest t <= m with L_s <= s-t for all s in [t,n]
  uint64_t checks = 0;    // constraint evaluations performed
};

/// Walks candidate start times t = m, m-1, ... until every constraint
/// L_s <= s-t holds on [t, n]; memory lengths are memoized reads of the
/// time-keyed stream, so the decision depends only on L_t..L_n.
BacktrackResult backtrack(const CoupledPair& pair, const TimeKeyedRandomness& rng,
                          int64_t m, int64_t n, BacktrackOptions opts = {});

/// A realized window of the coupled stationary chain: symbols and memory
/// lengths for every t in [backtrack_time, n], regeneration flags
/// verified against the realized horizon, and the construction metadata.
class CoupledPath {
 public:
  CoupledPath(int64_t m, int64_t n, int64_t backtrack_time, uint64_t seed, uint64_t replica,
              std::vector<SymbolPair> symbols, std::vector<int64_t> memory_lengths,
              uint64_t backtrack_checks);

  int64_t window_m() const { return m_; }
  int64_t window_n() const { return n_; }
  int64_t backtrack_time() const { return t0_; }
  uint64_t seed() const { return seed_; }
  uint64_t replica() const { return replica_; }
  uint64_t backtrack_checks() const { return checks_; }

  SymbolPair at(int64_t t) const { return symbols_[index(t)]; }
  int64_t memory_length(int64_t t) const { return lengths_[index(t)]; }
  bool regen_flag(int64_t t) const { return flags_[index(t)] != 0; }

  std::span<const SymbolPair> symbols() const { return symbols_; }
  std::span<const int64_t> memory_lengths() const { return lengths_; }

  size_t index(int64_t t) const;

 private:
  int64_t m_, n_, t0_;
  uint64_t seed_, replica_, checks_;
  std::vector<SymbolPair> symbols_;
  std::vector<int64_t> lengths_;
  std::vector<uint8_t> flags_;
};

/// Perfect sample of the coupled chain on [m, n]: backtracks to the
/// regeneration time, then builds symbols left to right, one uniform per
/// time index driving both the memory length and the symbol choice.
/// Deterministic given (seed, replica).
CoupledPath perfect_sample(const CoupledPair& pair, const TimeKeyedRandomness& rng,
                           int64_t m, int64_t n, BacktrackOptions opts = {});

/// Times t with L_s <= s-t for every s in [t, n] (horizon-verified
/// regeneration flags); the backtrack time is always present.
std::vector<int64_t> regen_marks(const CoupledPath& path);

/// Pure helper: flags aligned to t0..n for the given realized lengths.
std::vector<uint8_t> marks_from_lengths(std::span<const int64_t> lengths, int64_t t0,
                                        int64_t n);

}  // namespace dbar

#endif  // DBAR_REGENERATION_HPP
