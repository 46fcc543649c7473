#pragma once

#include <string>

#include <json.hpp>

#include "repeater/core_params.hpp"
#include "repeater/fock_sim.hpp"

namespace repeater {

/// Raised for malformed, unknown or out-of-range configuration entries.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    SystemParams params = preset_fig4();
    FockOptions fock;
};

/// Applies a flat JSON object on top of `base`. Accepted keys are the
/// SystemParams field names, plus lambda_m_db (alternative to lambda_m),
/// fock_cutoff and two_pair_amplitudes. Unknown keys are errors.
Config apply_config(const nlohmann::json& doc, Config base = {});

Config load_config_file(const std::string& path, Config base = {});

/// Flat object with exactly the keys apply_config accepts (lambda_m linear).
nlohmann::json config_to_json(const Config& cfg);

/// config_to_json plus the dB view of lossy quantities.
nlohmann::json resolved_params_json(const Config& cfg);

}  // namespace repeater
