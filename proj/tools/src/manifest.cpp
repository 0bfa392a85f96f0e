#include "amodelay_cli/manifest.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "amodelay/errors.hpp"

#ifndef AMODELAY_VERSION
#define AMODELAY_VERSION "unknown"
#endif

namespace amodelay::cli {

std::string tool_version() { return AMODELAY_VERSION; }

namespace {

double round_to(double v, int digits) {
    const double s = std::pow(10.0, digits);
    return std::round(v * s) / s;
}

}  // namespace

nlohmann::json derived_constants(const ModelCoeffs& c) {
    const WaveStructure ws = derive_wave_structure(c);
    nlohmann::json j;
    j["a1"] = c.a1;
    j["b1"] = c.b1;
    j["a2"] = c.a2;
    j["b2"] = c.b2;
    j["l_plus"] = ws.l_plus;
    j["l_minus"] = ws.l_minus;
    j["tau_plus"] = ws.tau_plus;
    j["tau_minus"] = ws.tau_minus;
    // quoted periods use rounded speeds; both conventions are recorded
    j["tau_minus_rounded"] = round_to(ws.tau_minus, 2);
    j["tau_minus_from_rounded_l_minus"] = round_to(1.0 / round_to(ws.l_minus, 4), 2);
    j["tau_plus_rounded"] = round_to(ws.tau_plus, 3);
    return j;
}

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["command"] = m.command;
    j["version"] = tool_version();
    j["config"] = nlohmann::json::parse(model_config_to_json(m.config));
    j["numerics"] = m.numerics;
    j["derived"] = m.derived;
    j["outputs"] = m.outputs;
    j["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json(nullptr);
    return j;
}

std::string write_manifest(const RunManifest& m, const std::string& dir) {
    std::string name = m.command;
    for (char& ch : name)
        if (ch == ' ') ch = '_';
    name += ".manifest.json";
    const auto path = std::filesystem::path(dir) / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << to_json(m).dump(2) << '\n';
    return name;
}

}  // namespace amodelay::cli
