#include "repeater/config.hpp"

#include <fstream>
#include <set>

namespace repeater {

namespace {

double get_number(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number");
    return v.get<double>();
}

int get_integer(const nlohmann::json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
    return v.get<int>();
}

}  // namespace

Config apply_config(const nlohmann::json& doc, Config base) {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    if (doc.contains("lambda_m") && doc.contains("lambda_m_db")) {
        throw ConfigError("config: give lambda_m or lambda_m_db, not both");
    }
    SystemParams& p = base.params;
    for (const auto& [key, v] : doc.items()) {
        if (key == "eta_e") p.eta_e = get_number(v, key);
        else if (key == "eta_r") p.eta_r = get_number(v, key);
        else if (key == "eta_d") p.eta_d = get_number(v, key);
        else if (key == "p_dark_e") p.p_dark_e = get_number(v, key);
        else if (key == "p_dark_r") p.p_dark_r = get_number(v, key);
        else if (key == "p_dark_d") p.p_dark_d = get_number(v, key);
        else if (key == "lambda_m") p.lambda_m = get_number(v, key);
        else if (key == "lambda_m_db") p.lambda_m = db_to_linear(get_number(v, key));
        else if (key == "alpha_db_per_km") p.alpha_db_per_km = get_number(v, key);
        else if (key == "m_modes") p.m_modes = get_integer(v, key);
        else if (key == "t_q_seconds") p.t_q_seconds = get_number(v, key);
        else if (key == "p1") p.p1 = get_number(v, key);
        else if (key == "p2") p.p2 = get_number(v, key);
        else if (key == "fock_cutoff") base.fock.cutoff = get_integer(v, key);
        else if (key == "two_pair_amplitudes") {
            if (!v.is_array() || v.size() != 3) {
                throw ConfigError(key + ": expected an array of three numbers");
            }
            for (int i = 0; i < 3; ++i) base.fock.two_pair[i] = get_number(v[i], key);
        } else {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    try {
        p.validate();
        effective_cutoff(p, base.fock);
    } catch (const ParamError& e) {
        throw ConfigError(e.what());
    }
    return base;
}

Config load_config_file(const std::string& path, Config base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return apply_config(doc, std::move(base));
}

nlohmann::json config_to_json(const Config& cfg) {
    const SystemParams& p = cfg.params;
    nlohmann::json j = {
        {"eta_e", p.eta_e},
        {"eta_r", p.eta_r},
        {"eta_d", p.eta_d},
        {"p_dark_e", p.p_dark_e},
        {"p_dark_r", p.p_dark_r},
        {"p_dark_d", p.p_dark_d},
        {"lambda_m", p.lambda_m},
        {"alpha_db_per_km", p.alpha_db_per_km},
        {"m_modes", p.m_modes},
        {"t_q_seconds", p.t_q_seconds},
        {"p1", p.p1},
        {"p2", p.p2},
        {"fock_cutoff", cfg.fock.cutoff},
        {"two_pair_amplitudes", cfg.fock.two_pair},
    };
    return j;
}

nlohmann::json resolved_params_json(const Config& cfg) {
    nlohmann::json j;
    j["params"] = config_to_json(cfg);
    j["db"] = {{"lambda_m_db", linear_to_db(cfg.params.lambda_m)},
               {"alpha_db_per_km", cfg.params.alpha_db_per_km}};
    j["derived"] = {{"q_threshold", q_threshold()},
                    {"effective_fock_cutoff", effective_cutoff(cfg.params, cfg.fock)}};
    return j;
}

}  // namespace repeater
