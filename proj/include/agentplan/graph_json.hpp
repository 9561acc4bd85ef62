#pragma once

#include "agentplan/graph.hpp"
#include "json.hpp"

namespace agentplan {

void to_json(nlohmann::json& j, const ResourceVector& r);
void from_json(const nlohmann::json& j, ResourceVector& r);
void to_json(nlohmann::json& j, const TaskNode& n);
void from_json(const nlohmann::json& j, TaskNode& n);
void to_json(nlohmann::json& j, const GraphEdge& e);
void from_json(const nlohmann::json& j, GraphEdge& e);
void to_json(nlohmann::json& j, const TaskGraph& g);
void from_json(const nlohmann::json& j, TaskGraph& g);
void to_json(nlohmann::json& j, const SlaSpec& s);
void from_json(const nlohmann::json& j, SlaSpec& s);
void to_json(nlohmann::json& j, const Diagnostic& d);

nlohmann::json attributes_to_json(const Attributes& attrs);
Attributes attributes_from_json(const nlohmann::json& j);

}  // namespace agentplan
