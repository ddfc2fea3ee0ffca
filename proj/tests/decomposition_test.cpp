#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <map>
#include <random>

#include "dbar/decomposition.hpp"
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

OrderedSuffix suffix_1(SymbolPair s) {
  OrderedSuffix out;
  out.push_older(s);
  return out;
}

std::function<OrderedSuffix(int64_t)> fixed_suffix_provider(const OrderedSuffix& deep) {
  return [deep](int64_t depth) { return deep.prefix(static_cast<size_t>(depth)); };
}

}  // namespace

TEST_CASE("layout is contiguous, nonnegative, and block-aligned") {
  std::mt19937 gen(5);
  auto pairs = {iid_pair(), order1_pair(), renewal_pair()};
  for (const auto& pair : pairs) {
    for (int rep = 0; rep < 200; ++rep) {
      std::uniform_int_distribution<size_t> depth_dist(0, 8);
      const auto s = random_ordered_suffix(gen, depth_dist(gen));
      const auto layout = interval_layout(pair, s);
      double pos = 0.0;
      for (const auto& iv : layout) {
        CHECK(iv.lo == doctest::Approx(pos).epsilon(1e-15));
        CHECK(iv.hi >= iv.lo);  // nonnegative lengths after clamping
        pos = iv.hi;
        // no depth-j interval may start below the depth-(j-1) global floor
        if (iv.depth > 0) {
          CHECK(iv.lo >= envelope_floor(pair, iv.depth - 1) - 1e-12);
        }
      }
      // the layout through depth k covers exactly the suffix envelope total
      CHECK(pos == doctest::Approx(envelope_total(pair, static_cast<int64_t>(s.depth()), s))
                       .epsilon(1e-12));
    }
  }
}

TEST_CASE("mixture kernel worked examples") {
  const auto iid = iid_pair();
  const OrderedSuffix empty;
  CHECK(mixture_kernel(iid, 0, SymbolPair::Discordant, empty) == doctest::Approx(0.2));
  CHECK(mixture_kernel(iid, 0, SymbolPair::BothZero, empty) == doctest::Approx(0.5));

  const auto m1 = order1_pair();
  CHECK(mixture_kernel(m1, 0, SymbolPair::BothOne, empty) ==
        doctest::Approx(0.25).epsilon(1e-12));
  CHECK(mixture_kernel(m1, 0, SymbolPair::BothZero, empty) ==
        doctest::Approx(0.375).epsilon(1e-12));
  CHECK(mixture_kernel(m1, 0, SymbolPair::Discordant, empty) ==
        doctest::Approx(0.375).epsilon(1e-12));

  // depth-1 kernels per suffix: the window [0.8, 1) is owned by a single
  // symbol whose identity depends on the suffix
  CHECK(mixture_kernel(m1, 1, SymbolPair::BothZero, suffix_1(SymbolPair::BothZero)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mixture_kernel(m1, 1, SymbolPair::Discordant, suffix_1(SymbolPair::Discordant)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mixture_kernel(m1, 1, SymbolPair::BothOne, suffix_1(SymbolPair::BothOne)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // zero-weight orders are undefined
  CHECK_THROWS_AS(mixture_kernel(iid, 1, SymbolPair::BothZero, suffix_1(SymbolPair::BothZero)),
                  UsageError);
}

TEST_CASE("mixture kernels normalize at every reachable depth") {
  std::mt19937 gen(7);
  auto pairs = {order1_pair(), renewal_pair()};
  for (const auto& pair : pairs) {
    for (int64_t k = 0; k <= 8; ++k) {
      if (memory_weight(pair, k) <= 0.0) continue;
      for (int rep = 0; rep < 50; ++rep) {
        const auto s = random_ordered_suffix(gen, static_cast<size_t>(k));
        double sum = 0.0;
        for (SymbolPair ab : kSymbolsInLayoutOrder) sum += mixture_kernel(pair, k, ab, s);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("single-uniform sampler worked examples") {
  const auto iid = iid_pair();
  const auto provider_empty = fixed_suffix_provider(OrderedSuffix{});
  // layout order (0,0):[0,0.5) (0,1):[0.5,0.7) (1,1):[0.7,1)
  auto d = sample_symbol(iid, 0.95, provider_empty);
  CHECK(d.memory_length == 0);
  CHECK(d.symbol == SymbolPair::BothOne);
  d = sample_symbol(iid, 0.0, provider_empty);
  CHECK(d.memory_length == 0);
  CHECK(d.symbol == SymbolPair::BothZero);
  d = sample_symbol(iid, 0.6, provider_empty);
  CHECK(d.symbol == SymbolPair::Discordant);

  const auto m1 = order1_pair();
  auto deep = suffix_1(SymbolPair::BothZero);
  d = sample_symbol(m1, 0.1, fixed_suffix_provider(deep));
  CHECK(d.memory_length == 0);
  CHECK(d.symbol == SymbolPair::BothZero);
  d = sample_symbol(m1, 0.9, fixed_suffix_provider(deep));
  CHECK(d.memory_length == 1);
  CHECK(d.symbol == SymbolPair::BothZero);
  d = sample_symbol(m1, 0.9, fixed_suffix_provider(suffix_1(SymbolPair::BothOne)));
  CHECK(d.memory_length == 1);
  CHECK(d.symbol == SymbolPair::BothOne);

  CHECK_THROWS_AS(sample_symbol(m1, 1.0, provider_empty), UsageError);
  CHECK_THROWS_AS(sample_symbol(m1, -0.1, provider_empty), UsageError);
}

TEST_CASE("grid measure: equispaced uniforms reproduce the cell masses") {
  // Deterministic interval-arithmetic check, not a statistical one.
  const int64_t n = 1'000'000;
  auto run = [&](const CoupledPair& pair, const OrderedSuffix& deep) {
    std::map<std::pair<int64_t, SymbolPair>, int64_t> counts;
    const auto provider = fixed_suffix_provider(deep);
    for (int64_t i = 0; i < n; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
      const auto d = sample_symbol(pair, u, provider);
      ++counts[{d.memory_length, d.symbol}];
    }
    for (int64_t k = 0; k <= static_cast<int64_t>(deep.depth()); ++k) {
      const double w = memory_weight(pair, k);
      for (SymbolPair ab : kSymbolsInLayoutOrder) {
        const double expected =
            w <= 0.0 ? 0.0
                     : w * mixture_kernel(pair, k, ab, deep.prefix(static_cast<size_t>(k)));
        const auto it = counts.find({k, ab});
        const double got =
            it == counts.end() ? 0.0
                               : static_cast<double>(it->second) / static_cast<double>(n);
        CHECK(std::abs(got - expected) <= 2e-6);
      }
    }
  };
  run(iid_pair(), OrderedSuffix{});
  run(order1_pair(), suffix_1(SymbolPair::BothZero));
  run(order1_pair(), suffix_1(SymbolPair::Discordant));
}

TEST_CASE("decomposition identity: iid and worked order-1 pair") {
  const auto iid = iid_pair();
  CHECK(decomposition_identity_error(iid, OrderedSuffix{}) <= 1e-12);

  const auto m1 = order1_pair();
  for (SymbolPair s : kSymbolsInLayoutOrder) {
    CHECK(decomposition_identity_error(m1, suffix_1(s)) <= 1e-12);
  }

  // renewal components do not terminate, so the identity check refuses them
  CHECK_THROWS_AS(decomposition_identity_error(renewal_pair(), OrderedSuffix{}), UsageError);
}

TEST_CASE("decomposition identity: randomized ordered pairs up to order 3") {
  std::mt19937 gen(11);
  for (int rep = 0; rep < 30; ++rep) {
    std::uniform_int_distribution<int> ord(1, 3);
    auto [sx, sy] = ordered_markov_pair(gen, ord(gen));
    const auto pair = CoupledPair::create(sx, sy);
    for (int inner = 0; inner < 10; ++inner) {
      const auto s = random_ordered_suffix(gen, 3);
      CHECK(decomposition_identity_error(pair, s) <= 1e-12);
    }
  }
}

TEST_CASE("memory length from the sampler matches the floor intervals") {
  const auto m1 = order1_pair();
  // 0.5 sits inside [0, 0.8), 0.9 inside [0.8, 1)
  const auto deep = suffix_1(SymbolPair::BothZero);
  CHECK(sample_symbol(m1, 0.5, fixed_suffix_provider(deep)).memory_length == 0);
  CHECK(sample_symbol(m1, 0.9, fixed_suffix_provider(deep)).memory_length == 1);
  CHECK(sample_symbol(m1, 0.8, fixed_suffix_provider(deep)).memory_length == 1);  // half-open
}
