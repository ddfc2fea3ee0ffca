#ifndef DBAR_KERNEL_HPP
#define DBAR_KERNEL_HPP

#include <optional>
#include <string>

#include "dbar/chain_spec.hpp"

namespace dbar {

/// p(1 | past).  The past summary must match the chain's kernel family.
double eval_p1(const ChainSpec& spec, const PastSummary& past);

/// Certified upper bound on the continuity rate: the worst kernel
/// discrepancy between two pasts agreeing on their last k symbols.
/// Non-increasing in k; zero from the resolution depth on.
double continuity_rate(const ChainSpec& spec, int64_t k);

/// Exact value of sum_{k > K} continuity_rate(spec, k), in closed form.
double continuity_tail_sum(const ChainSpec& spec, int64_t K);

enum class ExtremalDirection { Min, Max };

/// Exact infimum (or supremum) of p(1 | w . suffix) over all infinite
/// extensions w of the observed suffix (most recent symbol first).
double extremal_p1(const ChainSpec& spec, const Bits& observed_suffix,
                   ExtremalDirection dir);

struct OrderWitness {
  PastSummary past_x;
  PastSummary past_y;
  double p_x = 0;
  double p_y = 0;
  std::string describe() const;
};

struct OrderVerdict {
  enum class Kind { Ordered, Violated, Inconclusive };
  Kind kind = Kind::Inconclusive;
  std::optional<OrderWitness> witness;  // set when Violated
  std::string detail;

  bool ordered() const { return kind == Kind::Ordered; }
};

/// Checks the stochastic ordering p^X(1|x) <= p^Y(1|y) for all ordered
/// past pairs x <= y.  Exact for same-family pairs; mixed families are
/// decided through extremal envelopes at increasing depth and may come
/// back Inconclusive when the envelopes never separate.
OrderVerdict check_order(const ChainSpec& spec_x, const ChainSpec& spec_y);

}  // namespace dbar

#endif  // DBAR_KERNEL_HPP
