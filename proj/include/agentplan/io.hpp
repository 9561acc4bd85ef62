#pragma once

/// @file io.hpp
/// JSON forms of catalogs, models, assignment problems and solutions.
/// Infinite capacities and hard slack penalties are written as null.

#include <string>

#include "agentplan/hw_catalog.hpp"
#include "agentplan/optimizer.hpp"
#include "agentplan/perf_model.hpp"
#include "json.hpp"

namespace agentplan {

void to_json(nlohmann::json& j, const DeviceClass& d);
void from_json(const nlohmann::json& j, DeviceClass& d);
void to_json(nlohmann::json& j, const CostModelParams& c);
void from_json(const nlohmann::json& j, CostModelParams& c);
/// {"classes": [...], "cost_params": {...}}; a bare array is accepted on input.
void to_json(nlohmann::json& j, const HardwareCatalog& c);
void from_json(const nlohmann::json& j, HardwareCatalog& c);

void to_json(nlohmann::json& j, const ModelSpec& m);
void from_json(const nlohmann::json& j, ModelSpec& m);
/// A bare array of models, or {"models": [...]}.
void to_json(nlohmann::json& j, const ModelCatalog& c);
void from_json(const nlohmann::json& j, ModelCatalog& c);

void to_json(nlohmann::json& j, const AssignmentProblem& p);
void from_json(const nlohmann::json& j, AssignmentProblem& p);
/// Includes a "choice" map of task -> class when x is integral.
nlohmann::json assignment_to_json(const AssignmentProblem& p, const Assignment& a);

void to_json(nlohmann::json& j, const LpStandardForm& lp);

nlohmann::json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

/// Numbers with non-finite values become null.
nlohmann::json finite_or_null(double v);
double number_or_inf(const nlohmann::json& j);

}  // namespace agentplan
