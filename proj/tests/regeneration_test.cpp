#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <thread>

#include "dbar/regeneration.hpp"
#include "dbar/stats.hpp"
#include "test_helpers.hpp"

using namespace dbar;
using namespace dbar::testing;

namespace {

CoupledPair iid_pair() { return CoupledPair::create(ChainSpec::iid(0.3), ChainSpec::iid(0.5)); }

CoupledPair order1_pair() {
  return CoupledPair::create(ChainSpec::finite_markov(1, {{"0", 0.2}, {"1", 0.4}}),
                             ChainSpec::finite_markov(1, {{"0", 0.5}, {"1", 0.7}}));
}

CoupledPair renewal_pair() {
  return CoupledPair::create(
      ChainSpec::renewal(HazardSequence::geometric_approach(0.4, 0.2, 0.5)),
      ChainSpec::renewal(HazardSequence::geometric_approach(0.6, 0.2, 0.5)));
}

// Smallest seed whose time-keyed uniforms land in the given ranges at the
// given times; keeps the engineered-path tests deterministic.
uint64_t find_seed(std::initializer_list<std::pair<int64_t, std::pair<double, double>>> wants) {
  for (uint64_t seed = 0; seed < 100000; ++seed) {
    const TimeKeyedRandomness rng{seed, 0};
    bool ok = true;
    for (const auto& [t, range] : wants) {
      const double u = rng.uniform_at(t);
      if (!(u >= range.first && u < range.second)) {
        ok = false;
        break;
      }
    }
    if (ok) return seed;
  }
  FAIL("no seed found");
  return 0;
}

}  // namespace

TEST_CASE("time-keyed randomness is pure and key-sensitive") {
  const TimeKeyedRandomness a{42, 7};
  CHECK(a.uniform_at(-3) == a.uniform_at(-3));
  CHECK(a.word_at(10) == TimeKeyedRandomness{42, 7}.word_at(10));
  CHECK(a.word_at(10) != a.word_at(11));
  CHECK(a.word_at(10) != TimeKeyedRandomness{42, 8}.word_at(10));
  CHECK(a.word_at(10) != TimeKeyedRandomness{43, 7}.word_at(10));
  for (int64_t t = -100; t <= 100; ++t) {
    const double u = a.uniform_at(t);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("time-keyed uniforms look uniform (coarse chi-squared)") {
  const TimeKeyedRandomness rng{2024, 1};
  const int bins = 16;
  std::vector<int64_t> counts(bins, 0);
  const int64_t n = 100000;
  for (int64_t t = 0; t < n; ++t) {
    ++counts[static_cast<size_t>(rng.uniform_at(t) * bins)];
  }
  std::vector<double> probs(bins, 1.0 / bins);
  const auto fit = chi2_goodness_of_fit(counts, probs);
  CHECK(fit.p_value >= 1e-4);
}

TEST_CASE("memory length samples agree across the time axis") {
  const auto iid = iid_pair();
  const TimeKeyedRandomness rng{1, 0};
  for (int64_t t = -50; t <= 50; ++t) {
    CHECK(sample_memory_length(iid, rng, t) == 0);
  }
  const auto m1 = order1_pair();
  // weight split is 0.8 / 0.2, so lengths are 0 or 1 only
  for (int64_t t = -200; t <= 200; ++t) {
    const int64_t len = sample_memory_length(m1, rng, t);
    CHECK(len >= 0);
    CHECK(len <= 1);
    CHECK(len == (rng.uniform_at(t) >= 0.8 ? 1 : 0));
  }
}

TEST_CASE("backtrack worked examples") {
  const auto iid = iid_pair();
  const TimeKeyedRandomness rng{9, 0};
  for (const auto [m, n] : {std::pair<int64_t, int64_t>{0, 10}, {-5, 3}, {7, 7}}) {
    const auto bt = backtrack(iid, rng, m, n);
    CHECK(bt.time == m);  // all lengths are zero
    CHECK(bt.checks == static_cast<uint64_t>(n - m + 1));
  }

  // engineered realization: L_0 = 1, L_{-1} = 0 gives T[0,0] = -1
  const auto m1 = order1_pair();
  const uint64_t seed = find_seed({{0, {0.8, 1.0}}, {-1, {0.0, 0.8}}});
  const TimeKeyedRandomness rng2{seed, 0};
  REQUIRE(sample_memory_length(m1, rng2, 0) == 1);
  REQUIRE(sample_memory_length(m1, rng2, -1) == 0);
  const auto bt = backtrack(m1, rng2, 0, 0);
  CHECK(bt.time == -1);

  CHECK_THROWS_AS(backtrack(m1, rng2, 0, 0, BacktrackOptions{0}), DiagnosticError);
  CHECK_THROWS_AS(backtrack(m1, rng2, 3, 2), UsageError);
}

TEST_CASE("perfect sample: structure and determinism") {
  const auto pairs = {iid_pair(), order1_pair(), renewal_pair()};
  for (const auto& pair : pairs) {
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
      const TimeKeyedRandomness rng{seed, 0};
      const auto path = perfect_sample(pair, rng, -20, 150);
      CHECK(path.backtrack_time() <= -20);
      CHECK(path.memory_length(path.backtrack_time()) == 0);
      for (int64_t t = path.backtrack_time(); t <= path.window_n(); ++t) {
        CHECK(path.memory_length(t) <= t - path.backtrack_time());
        const SymbolPair s = path.at(t);
        CHECK(x_bit(s) <= y_bit(s));  // no (1,0) anywhere
      }
      // bitwise repeatability
      const auto again = perfect_sample(pair, rng, -20, 150);
      CHECK(again.backtrack_time() == path.backtrack_time());
      REQUIRE(again.symbols().size() == path.symbols().size());
      for (size_t i = 0; i < path.symbols().size(); ++i) {
        CHECK(again.symbols()[i] == path.symbols()[i]);
        CHECK(again.memory_lengths()[i] == path.memory_lengths()[i]);
      }
    }
  }
}

TEST_CASE("iid pair: discordant frequency matches q - p") {
  const auto pair = iid_pair();
  const int64_t n = 1'000'000;
  const auto path = perfect_sample(pair, TimeKeyedRandomness{77, 0}, 0, n - 1);
  int64_t mismatches = 0;
  for (int64_t t = 0; t < n; ++t) {
    if (path.at(t) == SymbolPair::Discordant) ++mismatches;
  }
  const double freq = static_cast<double>(mismatches) / static_cast<double>(n);
  const double sigma = std::sqrt(0.2 * 0.8 / static_cast<double>(n));
  CHECK(std::abs(freq - 0.2) <= 3.0 * sigma);
}

TEST_CASE("window coherence across nested windows") {
  std::mt19937 gen(13);
  const auto pairs = {order1_pair(), renewal_pair()};
  for (const auto& pair : pairs) {
    for (int rep = 0; rep < 50; ++rep) {
      std::uniform_int_distribution<int64_t> n_dist(-30, 120);
      const int64_t n = n_dist(gen);
      std::uniform_int_distribution<int64_t> m_dist(n - 60, n);
      const int64_t m_wide = m_dist(gen);
      std::uniform_int_distribution<int64_t> m2_dist(m_wide, n);
      const int64_t m_narrow = m2_dist(gen);
      const TimeKeyedRandomness rng{static_cast<uint64_t>(rep) + 1000, 3};
      const auto wide = perfect_sample(pair, rng, m_wide, n);
      const auto narrow = perfect_sample(pair, rng, m_narrow, n);
      CHECK(wide.backtrack_time() <= narrow.backtrack_time());
      for (int64_t t = narrow.backtrack_time(); t <= n; ++t) {
        CHECK(wide.at(t) == narrow.at(t));
        CHECK(wide.memory_length(t) == narrow.memory_length(t));
      }
    }
  }
}

TEST_CASE("marks from lengths: pure-function cases") {
  // all-zero lengths: every time is a regeneration point
  {
    const std::vector<int64_t> lengths(10, 0);
    const auto flags = marks_from_lengths(lengths, 0, 9);
    for (uint8_t f : flags) CHECK(f == 1);
  }
  // maximal lengths L_t = t - t0: only the start is flagged
  {
    std::vector<int64_t> lengths(10);
    for (size_t i = 0; i < lengths.size(); ++i) lengths[i] = static_cast<int64_t>(i);
    const auto flags = marks_from_lengths(lengths, 0, 9);
    CHECK(flags[0] == 1);
    for (size_t i = 1; i < flags.size(); ++i) CHECK(flags[i] == 0);
  }
  // a single late obstruction wipes out flags in its shadow
  {
    std::vector<int64_t> lengths = {0, 0, 0, 3, 0};
    const auto flags = marks_from_lengths(lengths, 0, 4);
    CHECK(flags[0] == 1);  // 3 <= 3 - 0
    CHECK(flags[1] == 0);  // L_3 = 3 > 3 - 1
    CHECK(flags[2] == 0);
    CHECK(flags[3] == 0);
    CHECK(flags[4] == 1);
  }
}

TEST_CASE("regen marks on realized paths") {
  const auto iid = iid_pair();
  const auto path = perfect_sample(iid, TimeKeyedRandomness{5, 0}, 0, 99);
  const auto marks = regen_marks(path);
  CHECK(marks.size() == 100);  // every time flagged for the iid pair

  const auto m1 = order1_pair();
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto p = perfect_sample(m1, TimeKeyedRandomness{seed, 0}, 0, 49);
    const auto mk = regen_marks(p);
    const std::set<int64_t> mark_set(mk.begin(), mk.end());
    CHECK(mark_set.count(p.backtrack_time()) == 1);  // T is always flagged
    for (int64_t t : mk) {
      for (int64_t s = t; s <= p.window_n(); ++s) {
        CHECK(p.memory_length(s) <= s - t);
      }
    }
  }
}

TEST_CASE("envelope table is safe under concurrent replica sampling") {
  // Same replicas sequentially on one pair, then concurrently on a fresh
  // pair whose memo starts cold; the paths must agree exactly.
  auto make = [] {
    return CoupledPair::create(
        ChainSpec::renewal(HazardSequence::geometric_approach(0.4, 0.2, 0.5)),
        ChainSpec::renewal(HazardSequence::geometric_approach(0.6, 0.2, 0.5)));
  };
  const auto pair_seq = make();
  std::vector<std::vector<SymbolPair>> sequential;
  for (uint64_t r = 0; r < 8; ++r) {
    const auto p = perfect_sample(pair_seq, TimeKeyedRandomness{99, r}, 0, 4000);
    sequential.emplace_back(p.symbols().begin(), p.symbols().end());
  }
  const auto pair_par = make();
  std::vector<std::vector<SymbolPair>> parallel(8);
  {
    std::vector<std::thread> threads;
    for (uint64_t r = 0; r < 8; ++r) {
      threads.emplace_back([&, r] {
        const auto p = perfect_sample(pair_par, TimeKeyedRandomness{99, r}, 0, 4000);
        parallel[r].assign(p.symbols().begin(), p.symbols().end());
      });
    }
    for (auto& t : threads) t.join();
  }
  for (size_t r = 0; r < 8; ++r) {
    CHECK(parallel[r] == sequential[r]);
  }
}

TEST_CASE("realized memory lengths follow the weight law (chi-squared)") {
  const auto pair = order1_pair();
  const TimeKeyedRandomness rng{31337, 0};
  const int64_t n = 200000;
  int64_t ones = 0;
  for (int64_t t = 0; t < n; ++t) {
    ones += sample_memory_length(pair, rng, t);
  }
  const double freq = static_cast<double>(ones) / static_cast<double>(n);
  const double sigma = std::sqrt(0.2 * 0.8 / static_cast<double>(n));
  CHECK(std::abs(freq - 0.2) <= 3.0 * sigma);
}
