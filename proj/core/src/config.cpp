#include "amodelay/config.hpp"

#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "amodelay/errors.hpp"

namespace amodelay {

namespace {

using json = nlohmann::json;

template <class F>
void for_each_field(PhysicalParams& p, F&& f) {
    f("h1", p.h1);
    f("h2", p.h2);
    f("h3", p.h3);
    f("H", p.H);
    f("W", p.W);
    f("L", p.L);
    f("Y", p.Y);
    f("kappa", p.kappa);
    f("g", p.g);
    f("f", p.f);
    f("beta", p.beta);
    f("alpha_T", p.alpha_T);
    f("alpha_S", p.alpha_S);
    f("dT", p.dT);
    f("dS", p.dS);
    f("u_bar", p.u_bar);
    f("C", p.C);
    f("v_bar", p.v_bar);
    f("w_bar", p.w_bar);
}

double number(const json& j, const std::string& key) {
    if (!j.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return j.get<double>();
}

}  // namespace

ModelConfig parse_model_config(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text.begin(), json_text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");

    ModelConfig cfg;
    std::size_t used = 0;
    for_each_field(cfg.physical, [&](const char* key, double& field) {
        if (auto it = j.find(key); it != j.end()) {
            field = number(*it, key);
            ++used;
        }
    });
    if (auto it = j.find("alpha"); it != j.end()) {
        cfg.alpha = number(*it, "alpha");
        ++used;
    }
    const char* bkeys[3] = {"beta1", "beta2", "beta3"};
    int nb = 0;
    std::array<double, 3> b{0.0, 0.0, 0.0};
    for (int i = 0; i < 3; ++i) {
        if (auto it = j.find(bkeys[i]); it != j.end()) {
            b[i] = number(*it, bkeys[i]);
            ++nb;
        }
    }
    if (nb != 0 && nb != 3) throw ConfigError("beta overrides need all of beta1, beta2, beta3");
    if (nb == 3) cfg.betas = b;
    used += nb;

    if (used != j.size()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool known = it.key() == "alpha" || it.key() == "beta1" || it.key() == "beta2" ||
                         it.key() == "beta3";
            for_each_field(cfg.physical, [&](const char* key, double&) { known |= it.key() == key; });
            if (!known) throw ConfigError("unknown config key '" + it.key() + "'");
        }
    }
    cfg.physical.validate();
    if (!(cfg.alpha >= 0.0)) throw ConfigError("alpha must be non-negative");
    return cfg;
}

ModelConfig load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_model_config(ss.str());
}

std::string model_config_to_json(const ModelConfig& cfg, int indent) {
    json j = json::object();
    PhysicalParams p = cfg.physical;
    for_each_field(p, [&](const char* key, double& field) { j[key] = field; });
    j["alpha"] = cfg.alpha;
    if (cfg.betas) {
        j["beta1"] = (*cfg.betas)[0];
        j["beta2"] = (*cfg.betas)[1];
        j["beta3"] = (*cfg.betas)[2];
    }
    return j.dump(indent);
}

ModelCoeffs coeffs_from_config(const ModelConfig& cfg) {
    ModelCoeffs c = derive_coeffs(cfg.physical, cfg.alpha);
    if (cfg.betas) c = with_betas(c, (*cfg.betas)[0], (*cfg.betas)[1], (*cfg.betas)[2]);
    return c;
}

}  // namespace amodelay
