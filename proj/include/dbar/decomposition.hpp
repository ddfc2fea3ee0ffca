#ifndef DBAR_DECOMPOSITION_HPP
#define DBAR_DECOMPOSITION_HPP

#include <functional>
#include <vector>

#include "dbar/coupling.hpp"

namespace dbar {

/// One piece of the interval layout for a suffix chain: the half-open
/// interval [lo, hi) at the given depth, owned by the given symbol.
/// Depth-j pieces have length envelope(j) - envelope(j-1) and the pieces
/// are laid out contiguously, depth by depth, in symbol layout order.
struct LayoutInterval {
  int64_t depth = 0;
  SymbolPair symbol = SymbolPair::BothZero;
  double lo = 0;
  double hi = 0;
};

/// Exact interval layout for all depths 0..s.depth(); cumulative
/// positions are recomputed from the envelope values on every call.
std::vector<LayoutInterval> interval_layout(const CoupledPair& pair, const OrderedSuffix& s);

/// The order-k mixture component: the layout mass owned by `ab` inside
/// the global window [floor(k-1), floor(k)), normalized by the memory
/// weight.  Throws UsageError when the weight is zero (such k is never
/// drawn).
double mixture_kernel(const CoupledPair& pair, int64_t k, SymbolPair ab,
                      const OrderedSuffix& s);

struct SymbolDraw {
  int64_t memory_length = 0;
  SymbolPair symbol = SymbolPair::BothZero;
};

/// Single-uniform draw: `u` picks the memory length L through the global
/// mass floors, then the symbol through the layout of the depth-L suffix
/// supplied by the callback.  The induced joint law of (L, symbol) is
/// weight_L * mixture_kernel(L, symbol | suffix).
SymbolDraw sample_symbol(const CoupledPair& pair, double u,
                         const std::function<OrderedSuffix(int64_t)>& suffix_at_depth);

/// Max over symbols of |sum_k weight_k * mixture_kernel(k, ., s_k) -
/// coupled_kernel|.  Requires a pair whose kernels are resolved within
/// depth(s) (iid or finite Markov components), so the mixture terminates.
double decomposition_identity_error(const CoupledPair& pair, const OrderedSuffix& s);

}  // namespace dbar

#endif  // DBAR_DECOMPOSITION_HPP
