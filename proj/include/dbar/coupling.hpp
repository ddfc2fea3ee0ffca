#ifndef DBAR_COUPLING_HPP
#define DBAR_COUPLING_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>

#include "dbar/chain_spec.hpp"
#include "dbar/errors.hpp"
#include "dbar/kernel.hpp"

namespace dbar {

/// A coupled symbol from S = {(0,0), (0,1), (1,1)}; the pair (1,0) is
/// unrepresentable, which is what keeps X_t <= Y_t a type-level fact.
/// The numeric order is also the interval-layout order.
enum class SymbolPair : uint8_t { BothZero = 0, Discordant = 1, BothOne = 2 };

inline constexpr std::array<SymbolPair, 3> kSymbolsInLayoutOrder = {
    SymbolPair::BothZero, SymbolPair::Discordant, SymbolPair::BothOne};

inline int x_bit(SymbolPair s) { return s == SymbolPair::BothOne ? 1 : 0; }
inline int y_bit(SymbolPair s) { return s == SymbolPair::BothZero ? 0 : 1; }

/// Throws UsageError on the unrepresentable pair (1,0).
SymbolPair make_symbol_pair(int xb, int yb);

std::string to_string(SymbolPair s);

/// A finite ordered pair of past strings of equal depth, most recent
/// symbol first; x <= y componentwise.
class OrderedSuffix {
 public:
  OrderedSuffix() = default;
  OrderedSuffix(Bits x, Bits y);  // throws UsageError unless x <= y

  size_t depth() const { return x_.size(); }
  const Bits& x() const { return x_; }
  const Bits& y() const { return y_; }

  OrderedSuffix prefix(size_t k) const;
  void push_older(SymbolPair s);

  std::string describe() const;

 private:
  Bits x_, y_;
};

struct Condition3Result {
  enum class Kind { Satisfied, Failed, Inconclusive };
  Kind kind = Kind::Inconclusive;
  /// Certified lower bound on the full envelope mass product (Satisfied only).
  double lower_bound = 0.0;
  std::string detail;

  bool satisfied() const { return kind == Kind::Satisfied; }
};

namespace detail {
class EnvelopeTable;
}

/// A verified ordered pair of chains together with its (lazily extended,
/// internally synchronized) envelope table.  Construction runs the
/// ordering check and the envelope-mass-product certificate; instances
/// are therefore always in a samplable state.  Copies share the table.
class CoupledPair {
 public:
  struct Options {
    /// Product depth for the mass-product certificate.
    int64_t condition3_depth = 256;
  };

  /// Throws OrderViolationError / ConditionFailure when the checks fail.
  static CoupledPair create(ChainSpec chain_x, ChainSpec chain_y);
  static CoupledPair create(ChainSpec chain_x, ChainSpec chain_y, Options opts);

  const ChainSpec& chain_x() const { return x_; }
  const ChainSpec& chain_y() const { return y_; }
  const OrderVerdict& order_verdict() const { return order_; }
  const Condition3Result& condition3() const { return cond3_; }

  /// Times the numeric monotonicity clamps fired while extending envelopes.
  int64_t clamp_warning_count() const;

  /// Envelope depths never exceed this; reaching it raises DiagnosticError.
  static constexpr int64_t kHardDepthCap = 4096;

  detail::EnvelopeTable& table() const { return *table_; }

 private:
  CoupledPair() = default;
  ChainSpec x_ = ChainSpec::iid(0.5);
  ChainSpec y_ = ChainSpec::iid(0.5);
  OrderVerdict order_;
  Condition3Result cond3_;
  std::shared_ptr<detail::EnvelopeTable> table_;
};

/// The monotone coupling kernel on S given family-consistent ordered pasts:
/// P(1,1) = p^X(1|x), P(0,0) = p^Y(0|y), P(0,1) = p^X(0|x) - p^Y(0|y).
/// Throws UsageError when the past pair cannot come from ordered pasts.
double coupled_kernel(const CoupledPair& pair, SymbolPair ab, const PastSummary& past_x,
                      const PastSummary& past_y);

/// Lower envelope of the coupled kernel over all ordered past extensions
/// of a depth-k suffix; non-decreasing along suffix refinement and exact
/// for the built-in families (up to a <=1e-18 conservative tail slack on
/// geometric hazards).
double lower_envelope(const CoupledPair& pair, int64_t k, SymbolPair ab,
                      const OrderedSuffix& s);

/// All three lower envelopes at once, indexed in layout order.
std::array<double, 3> lower_envelopes(const CoupledPair& pair, int64_t k,
                                      const OrderedSuffix& s);

/// Sum of the three lower envelopes at a suffix.
double envelope_total(const CoupledPair& pair, int64_t k, const OrderedSuffix& s);

/// Infimum of envelope_total over all ordered depth-k suffixes, computed
/// exactly via per-family suffix classes; non-decreasing, in [0,1].
double envelope_floor(const CoupledPair& pair, int64_t k);

/// Memory-length weight: envelope_floor(k) - envelope_floor(k-1), with
/// weight 0 := envelope_floor(0).
double memory_weight(const CoupledPair& pair, int64_t k);

/// Certifies that the infinite product of envelope floors is strictly
/// positive: multiplies floors up to k_max and bounds the tail through
/// the closed-form continuity-rate tails of both chains.
Condition3Result check_condition3(const ChainSpec& x, const ChainSpec& y, int64_t k_max);

}  // namespace dbar

#endif  // DBAR_COUPLING_HPP
