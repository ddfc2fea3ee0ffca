#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dbar/commands.hpp"
#include "dbar/errors.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<int64_t> replicas;
  std::optional<std::string> window;
  std::optional<int64_t> kmax;
  std::optional<std::string> out_dir;
};

void apply_overrides(dbar::RunConfig& cfg, const CliOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.replicas) cfg.replicas = *ov.replicas;
  if (ov.kmax) cfg.kmax = *ov.kmax;
  if (ov.out_dir) cfg.output_dir = *ov.out_dir;
  if (ov.window) {
    const auto sep = ov.window->find(':');
    if (sep == std::string::npos) {
      throw dbar::UsageError("--window expects M:N");
    }
    try {
      cfg.window_m = std::stoll(ov.window->substr(0, sep));
      cfg.window_n = std::stoll(ov.window->substr(sep + 1));
    } catch (const std::exception&) {
      throw dbar::UsageError("--window expects integers M:N");
    }
    if (cfg.window_m > cfg.window_n) throw dbar::UsageError("--window requires M <= N");
  }
  if (const char* env = std::getenv("DBAR_MAX_BACKTRACK")) {
    try {
      cfg.max_backtrack = std::stoull(env);
    } catch (const std::exception&) {
      throw dbar::UsageError("DBAR_MAX_BACKTRACK must be an unsigned integer");
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimal per-coordinate-mismatch coupling of ordered binary chains: "
               "condition checks, mixture decomposition, perfect sampling, and "
               "Monte Carlo certification"};
  app.require_subcommand(1);
  app.fallthrough();  // accept the shared flags after the subcommand too

  CliOverrides ov;
  app.add_option("--config", ov.config_path, "JSON run configuration")->required();
  app.add_option("--seed", ov.seed, "override the config seed");
  app.add_option("--replicas", ov.replicas, "override the replica count");
  app.add_option("--window", ov.window, "override the window as M:N");
  app.add_option("--kmax", ov.kmax, "override the decomposition depth");
  app.add_option("--out", ov.out_dir, "override the output directory");

  auto* c_check = app.add_subcommand("check", "verify ordering, continuity, mass product");
  auto* c_decomp = app.add_subcommand("decompose", "emit the mass floor / weight table");
  auto* c_sample = app.add_subcommand("sample", "perfect-sample one coupled window");
  auto* c_estimate = app.add_subcommand("estimate", "Monte Carlo mismatch certification");
  auto* c_regen = app.add_subcommand("regen-stats", "regeneration statistics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dbar::kExitUsage;
  }

  try {
    dbar::RunConfig cfg = dbar::load_config(ov.config_path);
    apply_overrides(cfg, ov);
    if (c_check->parsed()) return dbar::cmd_check(cfg, std::cout);
    if (c_decomp->parsed()) return dbar::cmd_decompose(cfg, std::cout);
    if (c_sample->parsed()) return dbar::cmd_sample(cfg, std::cout);
    if (c_estimate->parsed()) return dbar::cmd_estimate(cfg, std::cout);
    if (c_regen->parsed()) return dbar::cmd_regen_stats(cfg, std::cout);
    std::cerr << "no subcommand selected\n";
    return dbar::kExitUsage;
  } catch (const dbar::UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dbar::kExitUsage;
  } catch (const dbar::OrderViolationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dbar::kExitFail;
  } catch (const dbar::ConditionFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dbar::kExitFail;
  } catch (const dbar::DiagnosticError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return dbar::kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return dbar::kExitUsage;
  }
}
