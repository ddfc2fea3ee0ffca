#include "dbar/decomposition.hpp"

#include <algorithm>
#include <cmath>

#include "dbar/detail/envelope_table.hpp"

namespace dbar {

std::vector<LayoutInterval> interval_layout(const CoupledPair& pair, const OrderedSuffix& s) {
  const auto chain = pair.table().envelope_chain(s);
  std::vector<LayoutInterval> out;
  out.reserve(chain.size() * 3);
  double pos = 0.0;
  for (size_t j = 0; j < chain.size(); ++j) {
    for (SymbolPair ab : kSymbolsInLayoutOrder) {
      const int a = static_cast<int>(ab);
      const double len = j == 0 ? chain[0][a] : chain[j][a] - chain[j - 1][a];
      out.push_back(LayoutInterval{static_cast<int64_t>(j), ab, pos, pos + len});
      pos += len;
    }
  }
  return out;
}

double mixture_kernel(const CoupledPair& pair, int64_t k, SymbolPair ab,
                      const OrderedSuffix& s) {
  if (static_cast<int64_t>(s.depth()) != k) {
    throw UsageError("mixture_kernel: suffix depth must equal k");
  }
  const double lo = k == 0 ? 0.0 : envelope_floor(pair, k - 1);
  const double hi = envelope_floor(pair, k);
  const double weight = hi - lo;
  if (weight <= 0.0) {
    throw UsageError("mixture_kernel: memory weight is zero at k=" + std::to_string(k));
  }
  double mass = 0.0;
  for (const auto& iv : interval_layout(pair, s)) {
    if (iv.symbol != ab) continue;
    mass += std::max(0.0, std::min(iv.hi, hi) - std::max(iv.lo, lo));
  }
  return mass / weight;
}

SymbolDraw sample_symbol(const CoupledPair& pair, double u,
                         const std::function<OrderedSuffix(int64_t)>& suffix_at_depth) {
  if (!(u >= 0.0 && u < 1.0)) {
    throw UsageError("sample_symbol: uniform value must lie in [0,1)");
  }
  const int64_t memory = pair.table().memory_length_from_uniform(u);
  const OrderedSuffix s = suffix_at_depth(memory);
  if (static_cast<int64_t>(s.depth()) != memory) {
    throw UsageError("sample_symbol: suffix provider returned the wrong depth");
  }
  const auto layout = interval_layout(pair, s);
  const LayoutInterval* last_positive = nullptr;
  for (const auto& iv : layout) {
    if (iv.hi > iv.lo) last_positive = &iv;
    if (u >= iv.lo && u < iv.hi) {
      return SymbolDraw{memory, iv.symbol};
    }
  }
  // u < floor(memory) <= total layout mass up to rounding; if the summation
  // order left u an ulp past the last breakpoint, the final nonempty
  // interval absorbs it (a measure-zero tie rule).
  if (last_positive != nullptr) {
    return SymbolDraw{memory, last_positive->symbol};
  }
  throw DiagnosticError("sample_symbol: empty interval layout");
}

double decomposition_identity_error(const CoupledPair& pair, const OrderedSuffix& s) {
  const auto depth = static_cast<int64_t>(s.depth());
  auto past_of = [&](const ChainSpec& spec, const Bits& side) {
    switch (spec.family()) {
      case ChainSpec::Family::Iid:
        return PastSummary::iid_past();
      case ChainSpec::Family::FiniteMarkov: {
        const auto d = static_cast<size_t>(spec.markov_order());
        if (side.size() < d) {
          throw UsageError("identity check: suffix shorter than the chain order");
        }
        return PastSummary::markov_past(side.prefix(d));
      }
      case ChainSpec::Family::Renewal:
        throw UsageError("identity check requires finite-resolution components");
    }
    return PastSummary::iid_past();
  };
  const PastSummary px = past_of(pair.chain_x(), s.x());
  const PastSummary py = past_of(pair.chain_y(), s.y());

  double worst = 0.0;
  for (SymbolPair ab : kSymbolsInLayoutOrder) {
    double mixture = 0.0;
    for (int64_t k = 0; k <= depth; ++k) {
      const double w = memory_weight(pair, k);
      if (w <= 0.0) continue;
      mixture += w * mixture_kernel(pair, k, ab, s.prefix(static_cast<size_t>(k)));
    }
    const double direct = coupled_kernel(pair, ab, px, py);
    worst = std::max(worst, std::abs(mixture - direct));
  }
  return worst;
}

}  // namespace dbar
