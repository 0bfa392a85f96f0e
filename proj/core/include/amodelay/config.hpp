#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "amodelay/params.hpp"

namespace amodelay {

/// Model configuration as read from a JSON key-value file. Keys mirror the
/// PhysicalParams field names plus `alpha` and optional `beta1..beta3`
/// overrides; unknown keys are rejected.
struct ModelConfig {
    PhysicalParams physical;
    double alpha = 0.0;
    std::optional<std::array<double, 3>> betas;

    bool operator==(const ModelConfig&) const = default;
};

ModelConfig parse_model_config(std::string_view json_text);
ModelConfig load_model_config(const std::string& path);
std::string model_config_to_json(const ModelConfig& cfg, int indent = 2);

/// derive_coeffs followed by the optional beta overrides.
ModelCoeffs coeffs_from_config(const ModelConfig& cfg);

}  // namespace amodelay
