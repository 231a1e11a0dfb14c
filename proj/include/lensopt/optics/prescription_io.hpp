#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "lensopt/optics/types.hpp"

namespace lensopt::optics {

/// Prescription files are JSON objects with one key per fixed field; the
/// curvature vector is supplied at evaluation time and is optional in the file.
Prescription prescription_from_json(const nlohmann::json& j);
nlohmann::json prescription_to_json(const Prescription& p);

/// Throws ConfigError if the file is missing or malformed.
Prescription load_prescription(const std::filesystem::path& path);

MeritWeights weights_from_json(const nlohmann::json& j);
nlohmann::json weights_to_json(const MeritWeights& w);

}  // namespace lensopt::optics
