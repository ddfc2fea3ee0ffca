#ifndef DBAR_DETAIL_ENVELOPE_TABLE_HPP
#define DBAR_DETAIL_ENVELOPE_TABLE_HPP

#include <array>
#include <atomic>
#include <cstdint>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "dbar/chain_spec.hpp"

namespace dbar {

class OrderedSuffix;

namespace detail {

/// Canonical per-family summary of one side of an observed depth-k suffix.
/// Renewal: first_one = 1-based lag of the most recent 1, 0 if none.
/// FiniteMarkov: window = packed min(k, order) most recent bits.
/// Iid: nothing.
struct ChainStat {
  int64_t first_one = 0;
  uint32_t window = 0;
};

/// Lazily extended, memoized envelope data for a chain pair: the global
/// mass floors (one per depth) and the per-suffix-class lower envelopes,
/// both clamped monotone against floating-point rounding.  All entries
/// are pure functions of (pair, depth, suffix class); a single mutex
/// makes concurrent readers safe.
class EnvelopeTable {
 public:
  EnvelopeTable(ChainSpec x, ChainSpec y);

  static constexpr int64_t kHardDepthCap = 4096;

  const ChainSpec& chain_x() const { return x_; }
  const ChainSpec& chain_y() const { return y_; }

  /// Mass floor at depth k (the infimum over ordered depth-k suffixes of
  /// the summed lower envelopes); non-decreasing, capped at 1.
  double floor_at(int64_t k);

  /// Weight of memory length k: floor_at(k) - floor_at(k-1).
  double weight_at(int64_t k);

  /// Smallest k with u < floor_at(k).  Throws DiagnosticError past the cap.
  int64_t memory_length_from_uniform(double u);

  /// Effective lower envelopes (layout order: (0,0), (0,1), (1,1)) for
  /// every prefix depth 0..s.depth() of the given suffix.
  std::vector<std::array<double, 3>> envelope_chain(const OrderedSuffix& s);

  std::array<double, 3> envelopes_at(const OrderedSuffix& s);

  int64_t clamp_warnings() const { return clamp_warnings_.load(); }

 private:
  struct ClassKey {
    int64_t k;
    uint64_t cx;
    uint64_t cy;
    bool operator==(const ClassKey&) const = default;
  };
  struct ClassKeyHash {
    size_t operator()(const ClassKey& key) const;
  };

  double compute_floor_locked(int64_t k);
  std::array<double, 3> class_envelopes_locked(int64_t k, ChainStat sx, ChainStat sy);

  ChainSpec x_, y_;
  mutable std::mutex mu_;
  std::vector<double> floors_;
  std::unordered_map<ClassKey, std::array<double, 3>, ClassKeyHash> class_memo_;
  // Rolling per-depth class values for the floor enumeration; every
  // enumerated class has its parent in the previous depth's enumeration,
  // so two levels suffice and the memory stays linear in the depth.
  std::unordered_map<ClassKey, std::array<double, 3>, ClassKeyHash> floor_prev_;
  std::atomic<int64_t> clamp_warnings_{0};
};

}  // namespace detail
}  // namespace dbar

#endif  // DBAR_DETAIL_ENVELOPE_TABLE_HPP
