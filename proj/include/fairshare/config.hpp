#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "fairshare/model.hpp"

namespace fairshare {

/// Parameter file contents. prefs is present when the file gave Beta preferences
/// rather than a bare psi table; simulations need it.
struct ModelConfig {
    ModelParams params;
    std::optional<PreferenceTable> prefs;
    ValidationReport report;
};

/// JSON object with pi_A, q_A, q_B, T, and either "psi" as [[Aa, Ab], [Ba, Bb]] or
/// "preferences" as the same layout of {alpha, beta, cost, value} objects. Optional:
/// "M" (total mass) and "validation" ("strict" or "simulation", the default).
/// Throws ConfigError on malformed input; parameter violations propagate as thrown
/// by validate().
ModelConfig parse_config(std::string_view json_text);
ModelConfig load_config(const std::string& path);

/// Inverse of parse_config; writes preferences when given, psi otherwise.
std::string config_to_json(const ModelParams& params, const std::optional<PreferenceTable>& prefs,
                           int indent = 2);

}  // namespace fairshare
