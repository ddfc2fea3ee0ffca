#include "dbar/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dbar/errors.hpp"

namespace dbar {

namespace {

using nlohmann::json;

ChainSpec chain_from_json(const json& j) {
  const std::string family = j.at("family").get<std::string>();
  if (family == "iid") {
    return ChainSpec::iid(j.at("p").get<double>());
  }
  if (family == "finite_markov") {
    const int order = j.at("order").get<int>();
    std::map<std::string, double> table;
    for (const auto& [key, val] : j.at("table").items()) {
      table[key] = val.get<double>();
    }
    return ChainSpec::finite_markov(order, table);
  }
  if (family == "renewal") {
    const json& h = j.at("hazard");
    const std::string kind = h.at("kind").get<std::string>();
    if (kind == "geometric") {
      return ChainSpec::renewal(HazardSequence::geometric_approach(
          h.at("q_inf").get<double>(), h.at("amplitude").get<double>(),
          h.at("ratio").get<double>()));
    }
    if (kind == "explicit") {
      return ChainSpec::renewal(HazardSequence::explicit_values(
          h.at("values").get<std::vector<double>>(), h.at("q_inf").get<double>()));
    }
    throw UsageError("config: unknown hazard kind '" + kind + "'");
  }
  throw UsageError("config: unknown chain family '" + family + "'");
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: invalid JSON: ") + e.what());
  }
  try {
    RunConfig cfg;
    cfg.chain_x = chain_from_json(j.at("chain_x"));
    cfg.chain_y = chain_from_json(j.at("chain_y"));
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("replicas")) cfg.replicas = j["replicas"].get<int64_t>();
    if (j.contains("window")) {
      cfg.window_m = j["window"].at("m").get<int64_t>();
      cfg.window_n = j["window"].at("n").get<int64_t>();
    }
    if (j.contains("regen_truncation")) {
      cfg.regen_truncation = j["regen_truncation"].get<int64_t>();
    }
    if (j.contains("kmax")) cfg.kmax = j["kmax"].get<int64_t>();
    if (j.contains("max_backtrack")) cfg.max_backtrack = j["max_backtrack"].get<uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("tolerances")) {
      const json& t = j["tolerances"];
      if (t.contains("dbar_abs")) cfg.tol.dbar_abs = t["dbar_abs"].get<double>();
      if (t.contains("chi2_p")) cfg.tol.chi2_p = t["chi2_p"].get<double>();
      if (t.contains("cumulative")) cfg.tol.cumulative = t["cumulative"].get<double>();
    }
    if (cfg.window_m > cfg.window_n) {
      throw UsageError("config: window requires m <= n");
    }
    if (cfg.replicas < 1) throw UsageError("config: replicas must be >= 1");
    if (cfg.regen_truncation < 1) throw UsageError("config: regen_truncation must be >= 1");
    return cfg;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: missing or ill-typed field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    // Spec validation failures (bad probabilities etc.) are parse errors too.
    throw UsageError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace dbar
