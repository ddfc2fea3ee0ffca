#include "dbar/coupling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

#include "dbar/detail/envelope_table.hpp"

namespace dbar {

SymbolPair make_symbol_pair(int xb, int yb) {
  if (xb == 0 && yb == 0) return SymbolPair::BothZero;
  if (xb == 0 && yb == 1) return SymbolPair::Discordant;
  if (xb == 1 && yb == 1) return SymbolPair::BothOne;
  throw UsageError("symbol pair (1,0) is outside the ordered state space");
}

std::string to_string(SymbolPair s) {
  switch (s) {
    case SymbolPair::BothZero:
      return "(0,0)";
    case SymbolPair::Discordant:
      return "(0,1)";
    case SymbolPair::BothOne:
      return "(1,1)";
  }
  return "?";
}

OrderedSuffix::OrderedSuffix(Bits x, Bits y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) {
    throw UsageError("ordered suffix: sides must have equal depth");
  }
  if (!componentwise_leq(x_, y_)) {
    throw UsageError("ordered suffix: x must be componentwise <= y");
  }
}

OrderedSuffix OrderedSuffix::prefix(size_t k) const {
  OrderedSuffix out;
  out.x_ = x_.prefix(k);
  out.y_ = y_.prefix(k);
  return out;
}

void OrderedSuffix::push_older(SymbolPair s) {
  x_.push_older(x_bit(s));
  y_.push_older(y_bit(s));
}

std::string OrderedSuffix::describe() const {
  return "(" + x_.to_chronological() + ", " + y_.to_chronological() + ")";
}

namespace detail {

namespace {

uint32_t low_mask(int n) { return n <= 0 ? 0u : ((uint32_t{1} << n) - 1u); }

ChainStat stat_of(const ChainSpec& spec, const Bits& suffix) {
  ChainStat st;
  switch (spec.family()) {
    case ChainSpec::Family::Iid:
      break;
    case ChainSpec::Family::Renewal:
      if (auto j = suffix.first_one()) st.first_one = static_cast<int64_t>(*j) + 1;
      break;
    case ChainSpec::Family::FiniteMarkov: {
      const size_t wl = std::min(suffix.size(), static_cast<size_t>(spec.markov_order()));
      st.window = suffix.pack(wl);
      break;
    }
  }
  return st;
}

// The stat of the depth-(k-1) prefix of a depth-k suffix with this stat.
ChainStat parent_stat(const ChainSpec& spec, const ChainStat& st, int64_t k) {
  ChainStat p = st;
  switch (spec.family()) {
    case ChainSpec::Family::Iid:
      break;
    case ChainSpec::Family::Renewal:
      if (st.first_one == k) p.first_one = 0;  // the only 1 falls off the window
      break;
    case ChainSpec::Family::FiniteMarkov:
      if (k <= spec.markov_order()) p.window = st.window & low_mask(static_cast<int>(k - 1));
      break;
  }
  return p;
}

bool stat_determined(const ChainSpec& spec, const ChainStat& st, int64_t k) {
  switch (spec.family()) {
    case ChainSpec::Family::Iid:
      return true;
    case ChainSpec::Family::Renewal:
      return st.first_one >= 1;
    case ChainSpec::Family::FiniteMarkov:
      return k >= spec.markov_order();
  }
  return true;
}

double stat_eval(const ChainSpec& spec, const ChainStat& st) {
  switch (spec.family()) {
    case ChainSpec::Family::Iid:
      return spec.iid_p1();
    case ChainSpec::Family::Renewal:
      return spec.hazard().at(st.first_one);
    case ChainSpec::Family::FiniteMarkov:
      return spec.markov_p1(st.window);
  }
  return 0;
}

double stat_extremal(const ChainSpec& spec, const ChainStat& st, int64_t k,
                     ExtremalDirection dir) {
  if (stat_determined(spec, st, k)) return stat_eval(spec, st);
  if (spec.is_renewal()) {
    return dir == ExtremalDirection::Min ? spec.hazard().at_infinity()
                                         : spec.hazard().at(k + 1);
  }
  // Undetermined finite Markov: window holds exactly k bits, extremize
  // over the missing order-k completions.
  const int d = spec.markov_order();
  const uint32_t n_free = uint32_t{1} << (d - k);
  double best = dir == ExtremalDirection::Min ? 1.0 : 0.0;
  for (uint32_t c = 0; c < n_free; ++c) {
    const double p = spec.markov_p1(st.window | (c << k));
    best = dir == ExtremalDirection::Min ? std::min(best, p) : std::max(best, p);
  }
  return best;
}

// Admissible infimum of q^Y_l - q^X_l over lags l in {k+1, ..., inf}.
// Exact for explicit hazards; for geometric hazards the certified tail
// bound can undershoot the true infimum by at most 1e-18.
double renewal_discordant_floor(const HazardSequence& hx, const HazardSequence& hy,
                                int64_t k) {
  const int64_t horizon =
      std::max({hx.settle_depth(1e-18), hy.settle_depth(1e-18), k + 1});
  double m = hy.at_infinity() - hx.at_infinity();  // the l = infinity candidate
  for (int64_t l = k + 1; l <= horizon; ++l) {
    m = std::min(m, hy.at(l) - hx.at(l));
  }
  const double tail_floor =
      (hy.at_infinity() - hx.at_infinity()) - (hx.at(horizon + 1) - hx.at_infinity());
  return std::min(m, tail_floor);
}

// Infimum of p^Y(1|v.sy) - p^X(1|u.sx) over ordered extension pairs u <= v,
// with both sides undetermined by the suffix.
double discordant_floor_undetermined(const ChainSpec& x, const ChainStat& sx,
                                     const ChainSpec& y, const ChainStat& sy, int64_t k) {
  if (x.is_renewal() && y.is_renewal()) {
    // u <= v forces the x-lag to be >= the y-lag; with monotone hazards the
    // infimum sits on the diagonal of equal lags.
    return renewal_discordant_floor(x.hazard(), y.hazard(), k);
  }
  if (x.is_markov() && y.is_markov()) {
    const int dx = x.markov_order(), dy = y.markov_order();
    const int w = static_cast<int>(std::max<int64_t>(dx, dy) - k);
    const uint32_t mx = low_mask(static_cast<int>(dx - k));
    const uint32_t my = low_mask(static_cast<int>(dy - k));
    double best = 1.0;
    uint64_t total = 1;
    for (int i = 0; i < w; ++i) total *= 3;
    for (uint64_t idx = 0; idx < total; ++idx) {
      uint64_t rest = idx;
      uint32_t a = 0, b = 0;
      for (int i = 0; i < w; ++i) {
        const int digit = static_cast<int>(rest % 3);
        rest /= 3;
        if (digit == 2) a |= uint32_t{1} << i;
        if (digit >= 1) b |= uint32_t{1} << i;
      }
      const double px = x.markov_p1(sx.window | ((a & mx) << k));
      const double py = y.markov_p1(sy.window | ((b & my) << k));
      best = std::min(best, py - px);
    }
    return best;
  }
  if (x.is_renewal() && y.is_markov()) {
    // Enumerate the y completions; for each, the largest feasible x hazard
    // sits at the first position where v can carry a 1.
    const int dy = y.markov_order();
    const int wy = static_cast<int>(dy - k);
    double best = 1.0;
    for (uint32_t c = 0; c < (uint32_t{1} << wy); ++c) {
      const double py = y.markov_p1(sy.window | (c << k));
      const int64_t j_feasible = c == 0 ? wy + 1 : std::countr_zero(c) + 1;
      best = std::min(best, py - x.hazard().at(k + j_feasible));
    }
    return best;
  }
  if (x.is_markov() && y.is_renewal()) {
    const int dx = x.markov_order();
    const int wx = static_cast<int>(dx - k);
    double best = 1.0;
    for (int j = 1; j <= wx; ++j) {
      // v's first 1 at extension position j: u must be zero before it.
      const double qy = y.hazard().at(k + j);
      double mx = 0.0;
      const uint32_t forbidden = low_mask(j - 1);
      for (uint32_t c = 0; c < (uint32_t{1} << wx); ++c) {
        if ((c & forbidden) != 0) continue;
        mx = std::max(mx, x.markov_p1(sx.window | (c << k)));
      }
      best = std::min(best, qy - mx);
    }
    // v with no 1 inside the x window horizon pins the x completion to zero.
    best = std::min(best, y.hazard().at_infinity() - x.markov_p1(sx.window));
    return best;
  }
  throw std::logic_error("discordant_floor_undetermined: unreachable family pair");
}

std::array<double, 3> raw_envelopes(const ChainSpec& x, const ChainSpec& y, int64_t k,
                                    const ChainStat& sx, const ChainStat& sy) {
  std::array<double, 3> r{};
  r[static_cast<int>(SymbolPair::BothOne)] = stat_extremal(x, sx, k, ExtremalDirection::Min);
  r[static_cast<int>(SymbolPair::BothZero)] =
      1.0 - stat_extremal(y, sy, k, ExtremalDirection::Max);
  const bool det_x = stat_determined(x, sx, k);
  const bool det_y = stat_determined(y, sy, k);
  double disc;
  if (det_x && det_y) {
    disc = stat_eval(y, sy) - stat_eval(x, sx);
  } else if (det_x) {
    disc = stat_extremal(y, sy, k, ExtremalDirection::Min) - stat_eval(x, sx);
  } else if (det_y) {
    disc = stat_eval(y, sy) - stat_extremal(x, sx, k, ExtremalDirection::Max);
  } else {
    disc = discordant_floor_undetermined(x, sx, y, sy, k);
  }
  r[static_cast<int>(SymbolPair::Discordant)] = disc;
  return r;
}

std::vector<ChainStat> enumerate_stats(const ChainSpec& spec, int64_t k) {
  std::vector<ChainStat> out;
  switch (spec.family()) {
    case ChainSpec::Family::Iid:
      out.push_back(ChainStat{});
      break;
    case ChainSpec::Family::Renewal:
      for (int64_t j = 0; j <= k; ++j) out.push_back(ChainStat{j, 0});
      break;
    case ChainSpec::Family::FiniteMarkov: {
      const int wl = static_cast<int>(std::min<int64_t>(k, spec.markov_order()));
      for (uint32_t w = 0; w < (uint32_t{1} << wl); ++w) out.push_back(ChainStat{0, w});
      break;
    }
  }
  return out;
}

// Whether some ordered pair of depth-k suffixes projects onto these stats.
bool stats_realizable(const ChainSpec& x, const ChainStat& sx, const ChainSpec& y,
                      const ChainStat& sy, int64_t k) {
  if (x.is_iid() || y.is_iid()) return true;
  if (x.is_renewal() && y.is_renewal()) {
    if (sy.first_one == 0) return sx.first_one == 0;
    if (sx.first_one == 0) return true;
    return sx.first_one >= sy.first_one;
  }
  if (x.is_markov() && y.is_markov()) {
    const int overlap = static_cast<int>(std::min<int64_t>(
        std::min<int64_t>(k, x.markov_order()), std::min<int64_t>(k, y.markov_order())));
    return ((sx.window & ~sy.window) & low_mask(overlap)) == 0;
  }
  if (x.is_markov() && y.is_renewal()) {
    const int wlx = static_cast<int>(std::min<int64_t>(k, x.markov_order()));
    if (sy.first_one == 0) return sx.window == 0;
    const int zeros = static_cast<int>(std::min<int64_t>(sy.first_one - 1, wlx));
    return (sx.window & low_mask(zeros)) == 0;
  }
  if (x.is_renewal() && y.is_markov()) {
    if (sx.first_one == 0) return true;
    const int wly = static_cast<int>(std::min<int64_t>(k, y.markov_order()));
    if (sx.first_one > wly) return true;
    return ((sy.window >> (sx.first_one - 1)) & 1u) == 1u;
  }
  return true;
}

}  // namespace

size_t EnvelopeTable::ClassKeyHash::operator()(const ClassKey& key) const {
  uint64_t h = static_cast<uint64_t>(key.k);
  auto mix = [](uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  };
  h = mix(h ^ (key.cx * 0x9E3779B97F4A7C15ull));
  h = mix(h ^ (key.cy + 0x9E3779B97F4A7C15ull));
  return static_cast<size_t>(h);
}

EnvelopeTable::EnvelopeTable(ChainSpec x, ChainSpec y) : x_(std::move(x)), y_(std::move(y)) {}

namespace {
uint64_t stat_code(const ChainSpec& spec, const ChainStat& st) {
  switch (spec.family()) {
    case ChainSpec::Family::Iid:
      return 0;
    case ChainSpec::Family::Renewal:
      return static_cast<uint64_t>(st.first_one);
    case ChainSpec::Family::FiniteMarkov:
      return st.window;
  }
  return 0;
}
}  // namespace

std::array<double, 3> EnvelopeTable::class_envelopes_locked(int64_t k, ChainStat sx,
                                                            ChainStat sy) {
  // Walk up the ancestor chain until a memoized level, then come back down
  // applying the monotonicity clamp r_k := max(r_k, r_{k-1}).
  std::vector<std::pair<ChainStat, ChainStat>> chain;
  chain.reserve(static_cast<size_t>(k) + 1);
  chain.emplace_back(sx, sy);
  int64_t depth = k;
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  bool have_base = false;
  while (depth > 0) {
    const auto [cx, cy] = chain.back();
    const ClassKey key{depth, stat_code(x_, cx), stat_code(y_, cy)};
    if (auto it = class_memo_.find(key); it != class_memo_.end()) {
      acc = it->second;
      have_base = true;
      chain.pop_back();
      break;
    }
    chain.emplace_back(parent_stat(x_, cx, depth), parent_stat(y_, cy, depth));
    --depth;
  }
  if (!have_base && depth == 0) {
    const auto& [cx, cy] = chain.back();
    const ClassKey key{0, stat_code(x_, cx), stat_code(y_, cy)};
    if (auto it = class_memo_.find(key); it != class_memo_.end()) {
      acc = it->second;
    } else {
      acc = raw_envelopes(x_, y_, 0, cx, cy);
      class_memo_.emplace(key, acc);
    }
    chain.pop_back();
  }
  for (int64_t j = depth + 1; !chain.empty(); ++j) {
    const auto [cx, cy] = chain.back();
    chain.pop_back();
    auto r = raw_envelopes(x_, y_, j, cx, cy);
    for (int s = 0; s < 3; ++s) {
      if (r[s] < acc[s]) {
        r[s] = acc[s];
        clamp_warnings_.fetch_add(1, std::memory_order_relaxed);
      }
    }
    acc = r;
    class_memo_.emplace(ClassKey{j, stat_code(x_, cx), stat_code(y_, cy)}, acc);
  }
  return acc;
}

double EnvelopeTable::compute_floor_locked(int64_t k) {
  // Classes where both sides are pinned by the suffix carry full kernel
  // mass (the three components sum to one identically), so the infimum
  // can only be attained where at least one side is still open.
  const bool all_resolved = x_.has_finite_resolution() && y_.has_finite_resolution() &&
                            k >= std::max(x_.resolution_depth(), y_.resolution_depth());
  if (all_resolved) return 1.0;

  const auto xs = enumerate_stats(x_, k);
  const auto ys = enumerate_stats(y_, k);
  std::vector<ChainStat> xs_det, xs_undet, ys_undet;
  for (const auto& sx : xs) {
    (stat_determined(x_, sx, k) ? xs_det : xs_undet).push_back(sx);
  }
  for (const auto& sy : ys) {
    if (!stat_determined(y_, sy, k)) ys_undet.push_back(sy);
  }
  double best = 1.0;
  std::unordered_map<ClassKey, std::array<double, 3>, ClassKeyHash> cur;
  auto consider = [&](const ChainStat& sx, const ChainStat& sy) {
    if (!stats_realizable(x_, sx, y_, sy, k)) return;
    auto r = raw_envelopes(x_, y_, k, sx, sy);
    if (k > 0) {
      const ClassKey parent_key{k - 1, stat_code(x_, parent_stat(x_, sx, k)),
                                stat_code(y_, parent_stat(y_, sy, k))};
      const auto it = floor_prev_.find(parent_key);
      const std::array<double, 3> parent =
          it != floor_prev_.end()
              ? it->second
              : class_envelopes_locked(k - 1, parent_stat(x_, sx, k),
                                       parent_stat(y_, sy, k));
      for (int s = 0; s < 3; ++s) {
        if (r[s] < parent[s]) {
          r[s] = parent[s];
          clamp_warnings_.fetch_add(1, std::memory_order_relaxed);
        }
      }
    }
    cur.emplace(ClassKey{k, stat_code(x_, sx), stat_code(y_, sy)}, r);
    best = std::min(best, r[0] + r[1] + r[2]);
  };
  for (const auto& sx : xs_undet) {
    for (const auto& sy : ys) consider(sx, sy);
  }
  for (const auto& sx : xs_det) {
    for (const auto& sy : ys_undet) consider(sx, sy);
  }
  floor_prev_ = std::move(cur);
  return best;
}

double EnvelopeTable::floor_at(int64_t k) {
  if (k < 0) return 0.0;
  if (k >= kHardDepthCap) {
    throw DiagnosticError("envelope depth hard cap (" + std::to_string(kHardDepthCap) +
                          ") reached; the pair's envelope mass grows too slowly");
  }
  std::lock_guard<std::mutex> lock(mu_);
  while (static_cast<int64_t>(floors_.size()) <= k) {
    const auto depth = static_cast<int64_t>(floors_.size());
    double v = compute_floor_locked(depth);
    if (depth > 0 && v < floors_.back()) {
      v = floors_.back();
      clamp_warnings_.fetch_add(1, std::memory_order_relaxed);
    }
    floors_.push_back(std::min(v, 1.0));
  }
  return floors_[static_cast<size_t>(k)];
}

double EnvelopeTable::weight_at(int64_t k) {
  if (k == 0) return floor_at(0);
  return floor_at(k) - floor_at(k - 1);
}

int64_t EnvelopeTable::memory_length_from_uniform(double u) {
  for (int64_t k = 0; k < kHardDepthCap; ++k) {
    if (u < floor_at(k)) return k;
  }
  throw DiagnosticError("memory length exceeds the hard depth cap for uniform value " +
                        std::to_string(u));
}

std::vector<std::array<double, 3>> EnvelopeTable::envelope_chain(const OrderedSuffix& s) {
  const auto depth = static_cast<int64_t>(s.depth());
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<std::array<double, 3>> out;
  out.reserve(static_cast<size_t>(depth) + 1);
  for (int64_t j = 0; j <= depth; ++j) {
    const auto pj = s.prefix(static_cast<size_t>(j));
    out.push_back(class_envelopes_locked(j, stat_of(x_, pj.x()), stat_of(y_, pj.y())));
  }
  return out;
}

std::array<double, 3> EnvelopeTable::envelopes_at(const OrderedSuffix& s) {
  std::lock_guard<std::mutex> lock(mu_);
  return class_envelopes_locked(static_cast<int64_t>(s.depth()), stat_of(x_, s.x()),
                                stat_of(y_, s.y()));
}

}  // namespace detail

CoupledPair CoupledPair::create(ChainSpec chain_x, ChainSpec chain_y) {
  return create(std::move(chain_x), std::move(chain_y), Options{});
}

CoupledPair CoupledPair::create(ChainSpec chain_x, ChainSpec chain_y, Options opts) {
  CoupledPair p;
  p.order_ = check_order(chain_x, chain_y);
  if (p.order_.kind == OrderVerdict::Kind::Violated) {
    throw OrderViolationError("chains are not stochastically ordered: " + p.order_.detail);
  }
  if (p.order_.kind == OrderVerdict::Kind::Inconclusive) {
    throw OrderViolationError("ordering could not be certified: " + p.order_.detail);
  }
  p.cond3_ = check_condition3(chain_x, chain_y, opts.condition3_depth);
  if (!p.cond3_.satisfied()) {
    throw ConditionFailure("envelope mass product not certified positive: " +
                           p.cond3_.detail);
  }
  p.x_ = std::move(chain_x);
  p.y_ = std::move(chain_y);
  p.table_ = std::make_shared<detail::EnvelopeTable>(p.x_, p.y_);
  return p;
}

int64_t CoupledPair::clamp_warning_count() const { return table_->clamp_warnings(); }

namespace {

// The past pair must be jointly reachable from ordered full pasts.
void require_consistent_pasts(const ChainSpec& x, const PastSummary& px, const ChainSpec& y,
                              const PastSummary& py) {
  if (px.family != x.family() || py.family != y.family()) {
    throw UsageError("coupled_kernel: past summaries do not match the chain families");
  }
  if (x.is_renewal() && y.is_renewal() && px.ell < py.ell) {
    throw UsageError("coupled_kernel: ordered pasts require the x-lag >= y-lag");
  }
  if (x.is_markov() && y.is_markov()) {
    const size_t overlap = std::min(px.suffix.size(), py.suffix.size());
    if (!componentwise_leq(px.suffix.prefix(overlap), py.suffix.prefix(overlap))) {
      throw UsageError("coupled_kernel: markov suffixes are not ordered");
    }
  }
  if (x.is_markov() && y.is_renewal() && py.ell != kLagInfinity) {
    for (size_t i = 0; i + 1 < static_cast<size_t>(py.ell) && i < px.suffix.size(); ++i) {
      if (px.suffix.bit(i) != 0) {
        throw UsageError("coupled_kernel: x shows a 1 where the y past is still zero");
      }
    }
  }
  if (x.is_markov() && y.is_renewal() && py.ell == kLagInfinity) {
    if (px.suffix.first_one().has_value()) {
      throw UsageError("coupled_kernel: x shows a 1 against an all-zero y past");
    }
  }
  if (x.is_renewal() && y.is_markov() && px.ell != kLagInfinity) {
    const auto lag = static_cast<size_t>(px.ell);
    if (lag <= py.suffix.size() && py.suffix.bit(lag - 1) != 1) {
      throw UsageError("coupled_kernel: y shows a 0 where the x past has a 1");
    }
  }
}

}  // namespace

double coupled_kernel(const CoupledPair& pair, SymbolPair ab, const PastSummary& past_x,
                      const PastSummary& past_y) {
  require_consistent_pasts(pair.chain_x(), past_x, pair.chain_y(), past_y);
  const double px = eval_p1(pair.chain_x(), past_x);
  const double py = eval_p1(pair.chain_y(), past_y);
  switch (ab) {
    case SymbolPair::BothOne:
      return px;
    case SymbolPair::BothZero:
      return 1.0 - py;
    case SymbolPair::Discordant:
      return std::max(0.0, py - px);
  }
  throw std::logic_error("coupled_kernel: unreachable");
}

double lower_envelope(const CoupledPair& pair, int64_t k, SymbolPair ab,
                      const OrderedSuffix& s) {
  if (static_cast<int64_t>(s.depth()) != k) {
    throw UsageError("lower_envelope: suffix depth must equal k");
  }
  return pair.table().envelopes_at(s)[static_cast<int>(ab)];
}

std::array<double, 3> lower_envelopes(const CoupledPair& pair, int64_t k,
                                      const OrderedSuffix& s) {
  if (static_cast<int64_t>(s.depth()) != k) {
    throw UsageError("lower_envelopes: suffix depth must equal k");
  }
  return pair.table().envelopes_at(s);
}

double envelope_total(const CoupledPair& pair, int64_t k, const OrderedSuffix& s) {
  if (static_cast<int64_t>(s.depth()) != k) {
    throw UsageError("envelope_total: suffix depth must equal k");
  }
  const auto r = pair.table().envelopes_at(s);
  return r[0] + r[1] + r[2];
}

double envelope_floor(const CoupledPair& pair, int64_t k) { return pair.table().floor_at(k); }

double memory_weight(const CoupledPair& pair, int64_t k) { return pair.table().weight_at(k); }

Condition3Result check_condition3(const ChainSpec& x, const ChainSpec& y, int64_t k_max) {
  if (k_max < 1) throw UsageError("check_condition3: k_max must be >= 1");
  detail::EnvelopeTable table(x, y);
  double product = 1.0;
  const int64_t depth = std::min(k_max, detail::EnvelopeTable::kHardDepthCap - 1);
  for (int64_t k = 0; k <= depth; ++k) {
    const double a = table.floor_at(k);
    if (a <= 0.0) {
      std::ostringstream os;
      os << "envelope floor is " << a << " at depth " << k;
      return Condition3Result{Condition3Result::Kind::Failed, 0.0, os.str()};
    }
    product *= a;
    if (a == 1.0) break;  // floors are monotone; the rest of the product is 1
  }
  // Each floor sits above 1 - 2(beta_x(k) + beta_y(k)), so the tail of the
  // product is bounded below through the closed-form continuity tails.
  const double tail_sum = 2.0 * (continuity_tail_sum(x, depth) + continuity_tail_sum(y, depth));
  if (tail_sum >= 1.0) {
    std::ostringstream os;
    os << "tail bound " << tail_sum << " at depth " << depth << " is too weak to certify";
    return Condition3Result{Condition3Result::Kind::Inconclusive, 0.0, os.str()};
  }
  const double bound = product * (1.0 - tail_sum);
  if (bound <= 0.0) {
    return Condition3Result{Condition3Result::Kind::Failed, 0.0,
                            "certified lower bound is not positive"};
  }
  std::ostringstream os;
  os << "product over depths 0.." << depth << " with certified tail; bound " << bound;
  return Condition3Result{Condition3Result::Kind::Satisfied, bound, os.str()};
}

}  // namespace dbar
