#include "bauc/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace bauc {

namespace {

using nlohmann::json;

std::vector<double> vec(const json& j) { return j.get<std::vector<double>>(); }

std::vector<std::vector<double>> matrix(const json& j) {
  return j.get<std::vector<std::vector<double>>>();
}

}  // namespace

BavwmInstance<double> instanceFromJson(const json& j) {
  BavwmInstance<double> inst;
  inst.agents = j.at("n").get<int>();
  inst.items = j.at("m").get<int>();
  inst.values = matrix(j.at("values"));
  inst.budgets = vec(j.at("budgets"));
  inst.multipliers = vec(j.at("multipliers"));
  inst.virtualValues = matrix(j.at("virtual_values"));
  inst.normalized = j.value("normalized", false);
  return inst;
}

nlohmann::json instanceToJson(const BavwmInstance<double>& inst) {
  json j;
  j["n"] = inst.agents;
  j["m"] = inst.items;
  j["values"] = inst.values;
  j["budgets"] = inst.budgets;
  j["multipliers"] = inst.multipliers;
  j["virtual_values"] = inst.virtualValues;
  if (inst.normalized) j["normalized"] = true;
  return j;
}

Allocation allocationFromJson(const json& j) {
  Allocation alloc;
  for (const auto& entry : j.at("assignment")) {
    if (entry.is_null())
      alloc.assignment.push_back(kUnassigned);
    else
      alloc.assignment.push_back(entry.get<int>() - 1);
  }
  return alloc;
}

nlohmann::json allocationToJson(const Allocation& alloc) {
  json arr = json::array();
  for (int a : alloc.assignment) {
    if (a == kUnassigned)
      arr.push_back(nullptr);
    else
      arr.push_back(a + 1);
  }
  return json{{"assignment", arr}};
}

GapInstance<double> gapFromJson(const json& j) {
  GapInstance<double> gap;
  for (const auto& machine : j.at("machines"))
    gap.capacities.push_back(machine.at("capacity").get<double>());
  gap.jobs = j.at("jobs").get<int>();
  gap.processing = matrix(j.at("processing"));
  gap.cost = matrix(j.at("cost"));
  return gap;
}

nlohmann::json gapToJson(const GapInstance<double>& gap) {
  json machines = json::array();
  for (double t : gap.capacities) machines.push_back(json{{"capacity", t}});
  return json{{"machines", machines},
              {"jobs", gap.jobs},
              {"processing", gap.processing},
              {"cost", gap.cost}};
}

Prior<double> priorFromJson(const json& j) {
  Prior<double> prior;
  prior.items = j.at("m").get<int>();
  for (const auto& bidder : j.at("bidders")) {
    std::vector<BidderType<double>> types;
    for (const auto& ty : bidder.at("types")) {
      BidderType<double> t;
      t.values = vec(ty.at("values"));
      t.budget = ty.at("budget").get<double>();
      t.probability = ty.at("probability").get<double>();
      types.push_back(std::move(t));
    }
    prior.bidders.push_back(std::move(types));
  }
  return prior;
}

nlohmann::json priorToJson(const Prior<double>& prior) {
  json bidders = json::array();
  for (const auto& bidder : prior.bidders) {
    json types = json::array();
    for (const auto& t : bidder)
      types.push_back(json{{"values", t.values},
                           {"budget", t.budget},
                           {"probability", t.probability}});
    bidders.push_back(json{{"types", types}});
  }
  return json{{"m", prior.items}, {"bidders", bidders}};
}

MappingDistribution<double> deltaFromJson(const json& j) {
  MappingDistribution<double> delta;
  for (const auto& entry : j.at("entries")) {
    MappingDistribution<double>::Entry e;
    e.weight = entry.at("weight").get<double>();
    for (const auto& bidder : entry.at("bidders")) {
      std::vector<double> mults;
      std::vector<std::vector<double>> ws;
      for (const auto& ty : bidder.at("types")) {
        mults.push_back(ty.at("multiplier").get<double>());
        ws.push_back(vec(ty.at("virtual_values")));
      }
      e.mapping.multipliers.push_back(std::move(mults));
      e.mapping.virtualValues.push_back(std::move(ws));
    }
    delta.entries.push_back(std::move(e));
  }
  return delta;
}

nlohmann::json deltaToJson(const MappingDistribution<double>& delta) {
  json entries = json::array();
  for (const auto& e : delta.entries) {
    json bidders = json::array();
    for (std::size_t i = 0; i < e.mapping.multipliers.size(); ++i) {
      json types = json::array();
      for (std::size_t t = 0; t < e.mapping.multipliers[i].size(); ++t)
        types.push_back(json{{"multiplier", e.mapping.multipliers[i][t]},
                             {"virtual_values", e.mapping.virtualValues[i][t]}});
      bidders.push_back(json{{"types", types}});
    }
    entries.push_back(json{{"weight", e.weight}, {"bidders", bidders}});
  }
  return json{{"entries", entries}};
}

nlohmann::json benchReportToJson(const BenchReport& report) {
  json entries = json::array();
  for (const auto& e : report.entries) {
    json je{{"n", e.agents},
            {"m", e.items},
            {"exact_objective", e.exactObjective},
            {"approx_objective", e.approxObjective},
            {"ratio", e.ratio},
            {"lp_certificate", e.lpCertificate},
            {"exact_ms", e.exactMillis},
            {"approx_ms", e.approxMillis},
            {"size_limited", e.sizeLimited}};
    if (!e.note.empty()) je["note"] = e.note;
    entries.push_back(std::move(je));
  }
  return json{{"entries", entries},
              {"aggregates",
               {{"completed", report.completed},
                {"skipped", report.skipped},
                {"violations", report.violations},
                {"min_ratio", report.minRatio},
                {"mean_ratio", report.meanRatio}}}};
}

nlohmann::json verifyReportToJson(const VerifyReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks)
    checks.push_back(json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return json{{"checks", checks}, {"all_passed", report.allPassed}};
}

nlohmann::json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

void writeJsonFile(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace bauc
