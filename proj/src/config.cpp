#include "fairshare/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fairshare/error.hpp"

namespace fairshare {

using nlohmann::json;

namespace {

const json& field(const json& obj, const char* key)
{
    if (!obj.contains(key)) throw Error(ErrorCode::ConfigError, std::string("config is missing '") + key + "'");
    return obj.at(key);
}

double number(const json& v, const std::string& what)
{
    if (!v.is_number()) throw Error(ErrorCode::ConfigError, what + " must be a number");
    return v.get<double>();
}

template <class F>
void for_each_cell(const json& table, const char* key, F f)
{
    if (!table.is_array() || table.size() != 2 || !table[0].is_array() || !table[1].is_array() ||
        table[0].size() != 2 || table[1].size() != 2)
        throw Error(ErrorCode::ConfigError, std::string(key) + " must be a 2x2 array [[Aa, Ab], [Ba, Bb]]");
    for (Group g : kGroups)
        for (Article s : kArticles) f(g, s, table[index(g)][index(s)]);
}

}  // namespace

ModelConfig parse_config(std::string_view json_text)
{
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw Error(ErrorCode::ConfigError, "config must be a JSON object");

    const double pi_A = number(field(root, "pi_A"), "pi_A");
    const double q_A = number(field(root, "q_A"), "q_A");
    const double q_B = number(field(root, "q_B"), "q_B");
    const json& horizon = field(root, "T");
    if (!horizon.is_number_integer()) throw Error(ErrorCode::ConfigError, "T must be an integer");

    ValidationMode mode = ValidationMode::Simulation;
    if (root.contains("validation")) {
        const auto text = root.at("validation").get<std::string>();
        if (text == "strict") mode = ValidationMode::Strict;
        else if (text != "simulation") throw Error(ErrorCode::ConfigError, "validation must be strict or simulation");
    }

    ModelConfig cfg;
    const bool has_psi = root.contains("psi");
    const bool has_prefs = root.contains("preferences");
    if (has_psi == has_prefs) throw Error(ErrorCode::ConfigError, "config needs exactly one of psi or preferences");

    if (has_prefs) {
        PreferenceTable prefs;
        for_each_cell(root.at("preferences"), "preferences", [&](Group g, Article s, const json& cell) {
            if (!cell.is_object()) throw Error(ErrorCode::ConfigError, "preference cells must be objects");
            prefs(g, s) = {number(field(cell, "alpha"), "alpha"), number(field(cell, "beta"), "beta"),
                           number(field(cell, "cost"), "cost"), number(field(cell, "value"), "value")};
        });
        auto built = params_from_preferences(prefs, pi_A, q_A, q_B, horizon.get<int>(), mode);
        cfg.params = built.params;
        cfg.report = std::move(built.report);
        cfg.prefs = prefs;
    } else {
        cfg.params.pi_A = pi_A;
        cfg.params.q_A = q_A;
        cfg.params.q_B = q_B;
        cfg.params.horizon = horizon.get<int>();
        for_each_cell(root.at("psi"), "psi",
                      [&](Group g, Article s, const json& cell) { cfg.params.psi(g, s) = number(cell, "psi"); });
    }
    if (root.contains("M")) cfg.params.total_mass = number(root.at("M"), "M");
    cfg.report = validate(cfg.params, mode);
    return cfg;
}

ModelConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_to_json(const ModelParams& params, const std::optional<PreferenceTable>& prefs, int indent)
{
    json root;
    root["pi_A"] = params.pi_A;
    root["q_A"] = params.q_A;
    root["q_B"] = params.q_B;
    root["T"] = params.horizon;
    if (params.total_mass) root["M"] = *params.total_mass;
    json table = json::array({json::array(), json::array()});
    for (Group g : kGroups)
        for (Article s : kArticles) {
            if (prefs) {
                const PreferenceSpec& p = (*prefs)(g, s);
                table[index(g)].push_back({{"alpha", p.alpha}, {"beta", p.beta}, {"cost", p.cost}, {"value", p.value}});
            } else {
                table[index(g)].push_back(params.psi(g, s));
            }
        }
    root[prefs ? "preferences" : "psi"] = table;
    return root.dump(indent);
}

}  // namespace fairshare
