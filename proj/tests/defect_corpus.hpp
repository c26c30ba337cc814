#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaffold/recipe.hpp"

namespace scaffold::test_support {

// A recipe document with one seeded defect and the finding it must produce.
struct DefectCase {
  std::string name;
  std::string document;
  std::string expected_code;
  bool is_warning = false;
};

inline std::vector<DefectCase> defect_corpus() {
  using nlohmann::json;
  std::vector<DefectCase> out;
  auto add = [&](std::string name, std::string code, bool warning, const std::function<void(json&)>& mutate) {
    json doc = to_json(default_recipe());
    mutate(doc);
    out.push_back({std::move(name), doc.dump(2), std::move(code), warning});
  };

  add("missing_band", "missing_band", false, [](json& d) { d["knowledge_levels"].erase("developing"); });
  add("unordered_breakpoints", "unordered_breakpoints", false,
      [](json& d) { d["knowledge_levels"]["emerging"]["membership"] = {0.5, 0.4, 0.6, 0.8}; });
  add("orphan_support", "orphan_support", false,
      [](json& d) { d["knowledge_levels"]["developing"]["default_support"] = "extreme"; });
  add("cyclic_rules", "cyclic_rules", false, [](json& d) {
    d["adaptation_rules"].push_back({{"id", "down"}, {"when", {{"support", "high"}, {"consecutive_correct", 1}}},
                                     {"action", "lower_support"}, {"priority", 50}});
    d["adaptation_rules"].push_back({{"id", "up"}, {"when", {{"support", "medium"}, {"consecutive_correct", 1}}},
                                     {"action", "raise_support"}, {"priority", 45}});
  });
  add("coverage_gap", "score_gap", true,
      [](json& d) { d["knowledge_levels"]["advanced"]["membership"] = {0.8, 0.9, 0.95, 0.97}; });
  add("duplicate_priorities", "duplicate_priority", false, [](json& d) { d["adaptation_rules"][3]["priority"] = 40; });
  add("five_bands", "unknown_band", false, [](json& d) {
    d["knowledge_levels"]["expert"] = {{"description", "Beyond advanced."},
                                       {"trigger_phrases", {"teach me more"}},
                                       {"membership", {0.95, 1.0, 1.0, 1.0}},
                                       {"default_support", "low"}};
  });
  add("empty_tactics", "empty_tactics", false, [](json& d) { d["scaffolding_types"]["low"]["tactics"] = json::array(); });
  add("unresolved_strategy", "unresolved_strategy", false,
      [](json& d) { d["task_types"]["recall"]["strategies"].erase("advanced"); });
  add("fallback_strategy", "strategy_fallback", true, [](json& d) {
    d["task_types"]["reasoning"]["strategies"].erase("proficient");
    d["task_types"]["reasoning"]["fallback"] = "Ask the student to explain their reasoning.";
  });
  add("inverted_readability", "readability_range", false, [](json& d) {
    d["readability_targets"]["6"]["fk_min"] = 7.0;
    d["readability_targets"]["6"]["fk_max"] = 5.0;
  });
  add("silent_emerging_band", "missing_trigger_phrases", false,
      [](json& d) { d["knowledge_levels"]["emerging"]["trigger_phrases"] = json::array(); });
  return out;
}

}  // namespace scaffold::test_support
