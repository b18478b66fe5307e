#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "aris/driver.hpp"
#include "aris/scenario.hpp"

namespace aris {

/// Everything a run needs: the physical system and the optimizer settings.
struct RunConfig {
  SystemConfig system;
  OptimizerOptions optimizer;
};

/// Parses a JSON document. Top-level keys describe the system (powers in
/// dBm, gains in dB); an "optimizer" object holds solver settings. Unknown
/// keys, wrong types and invariant violations are all reported together as a
/// ConfigError.
RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);

/// Applies "key=value" overrides. Keys may be canonical names, short aliases
/// (M, N, Q, K, L, alpha, kappa_db, p_jam, epsilon, rho_max, ...) or
/// "optimizer.<name>"; values are parsed as JSON when possible, else as
/// strings.
RunConfig with_overrides(const RunConfig& base, const std::vector<std::string>& overrides);

/// Canonical JSON echo (sorted keys, dBm/dB units), stable across runs.
std::string config_json(const RunConfig& config);

/// Canonical key for a name or alias, or the input unchanged.
std::string canonical_key(std::string_view key);

/// Sets one numeric system parameter by (alias) name, e.g. for sweeps.
/// Throws ConfigError for unknown names or non-integral counts.
void set_parameter(RunConfig& config, std::string_view name, double value);

}  // namespace aris
