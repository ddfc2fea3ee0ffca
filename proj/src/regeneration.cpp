#include "dbar/regeneration.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "dbar/decomposition.hpp"
#include "dbar/detail/envelope_table.hpp"

namespace dbar {

int64_t sample_memory_length(const CoupledPair& pair, const TimeKeyedRandomness& rng,
                             int64_t t) {
  const double u = rng.uniform_at(t);
  try {
    return pair.table().memory_length_from_uniform(u);
  } catch (const DiagnosticError&) {
    std::ostringstream os;
    os << "memory length hard cap reached at t=" << t << " with uniform " << u;
    throw DiagnosticError(os.str());
  }
}

BacktrackResult backtrack(const CoupledPair& pair, const TimeKeyedRandomness& rng,
                          int64_t m, int64_t n, BacktrackOptions opts) {
  if (m > n) throw UsageError("backtrack: window requires m <= n");
  std::unordered_map<int64_t, int64_t> memo;
  auto length_at = [&](int64_t s) {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    const int64_t len = sample_memory_length(pair, rng, s);
    memo.emplace(s, len);
    return len;
  };
  uint64_t checks = 0;
  int64_t t = m;
  while (true) {
    bool feasible = true;
    for (int64_t s = t; s <= n; ++s) {
      ++checks;
      if (length_at(s) > s - t) {
        feasible = false;
        break;
      }
    }
    if (feasible) return BacktrackResult{t, checks};
    if (static_cast<uint64_t>(m - t) >= opts.max_depth) {
      std::ostringstream os;
      os << "backtrack aborted " << opts.max_depth << " steps below m=" << m
         << "; the pair's envelope mass is impractically small";
      throw DiagnosticError(os.str());
    }
    --t;
  }
}

CoupledPath::CoupledPath(int64_t m, int64_t n, int64_t backtrack_time, uint64_t seed,
                         uint64_t replica, std::vector<SymbolPair> symbols,
                         std::vector<int64_t> memory_lengths, uint64_t backtrack_checks)
    : m_(m),
      n_(n),
      t0_(backtrack_time),
      seed_(seed),
      replica_(replica),
      checks_(backtrack_checks),
      symbols_(std::move(symbols)),
      lengths_(std::move(memory_lengths)) {
  const auto count = static_cast<size_t>(n_ - t0_ + 1);
  if (symbols_.size() != count || lengths_.size() != count) {
    throw UsageError("coupled path: inconsistent window bookkeeping");
  }
  if (!lengths_.empty() && lengths_.front() != 0) {
    throw UsageError("coupled path: the backtrack time must carry memory length 0");
  }
  for (size_t i = 0; i < lengths_.size(); ++i) {
    if (lengths_[i] > static_cast<int64_t>(i)) {
      throw UsageError("coupled path: memory length reaches past the backtrack time");
    }
  }
  flags_ = marks_from_lengths(lengths_, t0_, n_);
}

size_t CoupledPath::index(int64_t t) const {
  if (t < t0_ || t > n_) throw UsageError("coupled path: time outside the realized range");
  return static_cast<size_t>(t - t0_);
}

CoupledPath perfect_sample(const CoupledPair& pair, const TimeKeyedRandomness& rng,
                           int64_t m, int64_t n, BacktrackOptions opts) {
  const BacktrackResult bt = backtrack(pair, rng, m, n, opts);
  const int64_t t0 = bt.time;
  std::vector<SymbolPair> symbols;
  std::vector<int64_t> lengths;
  symbols.reserve(static_cast<size_t>(n - t0 + 1));
  lengths.reserve(static_cast<size_t>(n - t0 + 1));
  for (int64_t t = t0; t <= n; ++t) {
    const double u = rng.uniform_at(t);
    const auto draw = sample_symbol(pair, u, [&](int64_t depth) {
      OrderedSuffix s;
      for (int64_t j = 1; j <= depth; ++j) {
        s.push_older(symbols[static_cast<size_t>(t - j - t0)]);
      }
      return s;
    });
    symbols.push_back(draw.symbol);
    lengths.push_back(draw.memory_length);
  }
  return CoupledPath(m, n, t0, rng.seed, rng.replica, std::move(symbols), std::move(lengths),
                     bt.checks);
}

std::vector<uint8_t> marks_from_lengths(std::span<const int64_t> lengths, int64_t t0,
                                        int64_t n) {
  const size_t count = lengths.size();
  if (count != static_cast<size_t>(n - t0 + 1)) {
    throw UsageError("marks_from_lengths: size does not match the time range");
  }
  // t is flagged iff min over s >= t of (s - L_s) is still >= t.
  std::vector<uint8_t> flags(count, 0);
  int64_t running_min = std::numeric_limits<int64_t>::max();
  for (size_t i = count; i-- > 0;) {
    const int64_t s = t0 + static_cast<int64_t>(i);
    running_min = std::min(running_min, s - lengths[i]);
    flags[i] = running_min >= s ? 1 : 0;
  }
  return flags;
}

std::vector<int64_t> regen_marks(const CoupledPath& path) {
  std::vector<int64_t> out;
  for (int64_t t = path.backtrack_time(); t <= path.window_n(); ++t) {
    if (path.regen_flag(t)) out.push_back(t);
  }
  return out;
}

}  // namespace dbar
