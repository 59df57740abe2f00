#pragma once

#include <string>

#include <json.hpp>

#include "bauc/gap.hpp"
#include "bauc/harness.hpp"
#include "bauc/mechanism.hpp"
#include "bauc/model.hpp"

namespace bauc {

// Instance JSON: {"n", "m", "values", "budgets", "multipliers", "virtual_values"}.
BavwmInstance<double> instanceFromJson(const nlohmann::json& j);
nlohmann::json instanceToJson(const BavwmInstance<double>& inst);

// Allocation JSON: {"assignment": [int|null]} with agents 1-indexed and null
// for unassigned items.
Allocation allocationFromJson(const nlohmann::json& j);
nlohmann::json allocationToJson(const Allocation& alloc);

// GAP JSON mirrors GapInstance: {"machines": [{"capacity": r}], "jobs",
// "processing", "cost"}.
GapInstance<double> gapFromJson(const nlohmann::json& j);
nlohmann::json gapToJson(const GapInstance<double>& gap);

// Prior JSON: {"m", "bidders": [{"types": [{"values", "budget", "probability"}]}]}.
Prior<double> priorFromJson(const nlohmann::json& j);
nlohmann::json priorToJson(const Prior<double>& prior);

// Mapping distribution JSON: {"entries": [{"weight", "bidders": [{"types":
// [{"multiplier", "virtual_values"}]}]}]}.
MappingDistribution<double> deltaFromJson(const nlohmann::json& j);
nlohmann::json deltaToJson(const MappingDistribution<double>& delta);

nlohmann::json benchReportToJson(const BenchReport& report);
nlohmann::json verifyReportToJson(const VerifyReport& report);

nlohmann::json readJsonFile(const std::string& path);
void writeJsonFile(const std::string& path, const nlohmann::json& j);

}  // namespace bauc
