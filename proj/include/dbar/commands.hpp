#ifndef DBAR_COMMANDS_HPP
#define DBAR_COMMANDS_HPP

#include <iosfwd>

#include "dbar/config.hpp"

namespace dbar {

/// Exit codes shared by every subcommand: 0 = pass, 1 = a condition or
/// acceptance indicator failed, 2 = usage/parse error (mapped by the CLI).
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

int cmd_check(const RunConfig& cfg, std::ostream& log);
int cmd_decompose(const RunConfig& cfg, std::ostream& log);
int cmd_sample(const RunConfig& cfg, std::ostream& log);
int cmd_estimate(const RunConfig& cfg, std::ostream& log);
int cmd_regen_stats(const RunConfig& cfg, std::ostream& log);

}  // namespace dbar

#endif  // DBAR_COMMANDS_HPP
