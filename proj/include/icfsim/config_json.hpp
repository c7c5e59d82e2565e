#pragma once
// JSON (de)serialization of run configuration; the same document format is
// accepted by --config and echoed into CSV headers.

#include <string>

#include "json.hpp"

#include "icfsim/config.hpp"
#include "icfsim/sweep.hpp"

namespace icfsim {

nlohmann::json to_json(const WorldConfig& config);
nlohmann::json to_json(const SweepSpec& spec);

// Unknown keys are rejected; missing keys keep the values in `base`.
WorldConfig world_config_from_json(const nlohmann::json& j, const WorldConfig& base);
SweepSpec sweep_spec_from_json(const nlohmann::json& j, const SweepSpec& base);

std::string similarity_to_string(Similarity s);
Similarity similarity_from_string(const std::string& name);

}  // namespace icfsim
