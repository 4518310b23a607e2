#pragma once

#include <istream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "odtomo/estimator.hpp"
#include "odtomo/simulator.hpp"

namespace odtomo {

inline constexpr const char* kResultSchema = "odtomo.estimate/1";
inline constexpr const char* kTruthSchema = "odtomo.truth/1";

/// {"schema", "length", "support": [bitstrings], "means": [...],
///  "visited": [{"vector", "phi", "psi"}], "diagnostics": {...}}
nlohmann::json result_to_json(const EstimationResult& result, const std::vector<std::string>& column_names = {});

/// Ground-truth sidecar for a simulated instance: active paths, their means and
/// the quotient classes over the observed edges.
nlohmann::json truth_to_json(const Instance& inst, const std::string& network_label);

/// Reads the class list of a truth sidecar back as an exact model over the observed edges.
ExactModel truth_model_from_json(const nlohmann::json& doc, const std::string& source_name = "<json>");

nlohmann::json read_json_file(const std::string& path);

} // namespace odtomo
