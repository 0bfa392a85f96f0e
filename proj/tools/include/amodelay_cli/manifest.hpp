#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "amodelay/config.hpp"
#include "amodelay/params.hpp"

namespace amodelay::cli {

std::string tool_version();

/// Record written next to every command's outputs. Contains nothing that
/// varies between identical runs.
struct RunManifest {
    std::string command;
    ModelConfig config;
    /// Grid, step and run-length settings actually used.
    nlohmann::json numerics = nlohmann::json::object();
    nlohmann::json derived = nlohmann::json::object();
    /// File names relative to the output directory.
    std::vector<std::string> outputs;
    std::optional<std::uint64_t> seed;
};

/// tau±, l±, the rounded values quoted in the literature and 1/round(l-).
nlohmann::json derived_constants(const ModelCoeffs& c);

nlohmann::json to_json(const RunManifest& m);

/// Writes `<command>.manifest.json` into `dir` and returns its file name.
std::string write_manifest(const RunManifest& m, const std::string& dir);

}  // namespace amodelay::cli
