#ifndef DBAR_CONFIG_HPP
#define DBAR_CONFIG_HPP

#include <cstdint>
#include <string>

#include "dbar/chain_spec.hpp"

namespace dbar {

struct Tolerances {
  double dbar_abs = 1e-3;        // absolute slack on the mismatch target
  double chi2_p = 1e-3;          // goodness-of-fit acceptance level
  double cumulative = 1 - 1e-9;  // decompose: mass coverage target
};

/// Everything a run needs: the chain pair plus sampling parameters.
/// Loaded from a JSON file; CLI flags override individual fields.
struct RunConfig {
  ChainSpec chain_x = ChainSpec::iid(0.3);
  ChainSpec chain_y = ChainSpec::iid(0.5);
  uint64_t seed = 1;
  int64_t replicas = 100;
  int64_t window_m = 0;
  int64_t window_n = 999;
  int64_t regen_truncation = 64;
  int64_t kmax = 256;
  uint64_t max_backtrack = 1'000'000;
  std::string output_dir = "out";
  Tolerances tol;
};

/// Parses the JSON config; throws UsageError on malformed input
/// (including probabilities outside [0,1]).
RunConfig load_config(const std::string& path);

/// Parses a config from an in-memory JSON string (used by tests).
RunConfig parse_config(const std::string& json_text);

}  // namespace dbar

#endif  // DBAR_CONFIG_HPP
