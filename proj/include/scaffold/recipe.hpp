#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaffold/common.hpp"
#include "scaffold/membership.hpp"

namespace scaffold {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Errors raised while reading a recipe document.
// ---------------------------------------------------------------------------
class RecipeError : public Error {
 public:
  RecipeError(std::string code, std::string path, const std::string& message)
      : Error(message), code_(std::move(code)), path_(std::move(path)) {}
  const std::string& code() const { return code_; }
  const std::string& path() const { return path_; }

 private:
  std::string code_;
  std::string path_;
};

// Malformed JSON text.
class SyntaxError : public RecipeError {
 public:
  explicit SyntaxError(const std::string& message) : RecipeError("syntax", "", message) {}
};

// Missing section or wrongly typed value; path names the offending location.
class SchemaError : public RecipeError {
 public:
  SchemaError(std::string path, const std::string& message)
      : RecipeError("schema", path, path + ": " + message) {}
};

// A value that parses but violates a recipe invariant; code names the invariant.
class ConstraintError : public RecipeError {
 public:
  ConstraintError(std::string code, std::string path, const std::string& message)
      : RecipeError(code, path, path + ": " + message + " [" + code + "]") {}
};

// ---------------------------------------------------------------------------
// Recipe model
// ---------------------------------------------------------------------------
inline constexpr std::array<const char*, 4> kBands = {"emerging", "developing", "proficient", "advanced"};
inline constexpr std::array<const char*, 3> kCoreSupports = {"high", "medium", "low"};

// Position of a canonical band on the knowledge axis, or -1.
inline int band_index(std::string_view band) {
  for (std::size_t i = 0; i < kBands.size(); ++i) {
    if (band == kBands[i]) return static_cast<int>(i);
  }
  return -1;
}

struct KnowledgeBandDef {
  std::string description;
  std::vector<std::string> trigger_phrases;
  MembershipShape membership;
  std::string default_support;
  bool operator==(const KnowledgeBandDef&) const = default;
};

struct SupportLevelDef {
  std::string description;
  std::vector<std::string> tactics;
  int level = 0;  // intensity on the support ladder; larger means more support
  bool operator==(const SupportLevelDef&) const = default;
};

struct TaskTypeDef {
  std::string id;
  std::string description;
  std::map<std::string, std::string> strategies;  // band-id -> strategy
  std::optional<std::string> fallback;
  bool operator==(const TaskTypeDef&) const = default;
};

struct ReadabilityTarget {
  int grade = 0;
  double fk_min = 0.0;
  double fk_max = 0.0;
  bool operator==(const ReadabilityTarget&) const = default;
};

enum class RuleAction { raise_support, lower_support, hold, advance_band, regress_band };

inline std::string to_string(RuleAction a) {
  switch (a) {
    case RuleAction::raise_support: return "raise_support";
    case RuleAction::lower_support: return "lower_support";
    case RuleAction::hold: return "hold";
    case RuleAction::advance_band: return "advance_band";
    case RuleAction::regress_band: return "regress_band";
  }
  return "hold";
}

inline std::optional<RuleAction> parse_rule_action(std::string_view s) {
  if (s == "raise_support") return RuleAction::raise_support;
  if (s == "lower_support") return RuleAction::lower_support;
  if (s == "hold") return RuleAction::hold;
  if (s == "advance_band") return RuleAction::advance_band;
  if (s == "regress_band") return RuleAction::regress_band;
  return std::nullopt;
}

// Conjunction of predicates over session facts. Count predicates are
// thresholds (fact >= value); an empty condition always holds.
struct RuleCondition {
  std::optional<int> consecutive_correct;
  std::optional<int> consecutive_confused;
  std::optional<int> turns_at_support;
  std::optional<std::string> explicit_signal;  // band-id
  std::optional<std::string> support;          // current support-id
  bool operator==(const RuleCondition&) const = default;
};

struct AdaptationRule {
  std::string id;
  RuleCondition when;
  RuleAction action = RuleAction::hold;
  int priority = 0;  // higher wins
  bool operator==(const AdaptationRule&) const = default;
};

struct ScaffoldingRecipe {
  std::string version = "1.0.0";
  std::map<std::string, TaskTypeDef> task_types;
  std::map<std::string, KnowledgeBandDef> knowledge_levels;
  std::map<std::string, SupportLevelDef> scaffolding_types;
  std::map<int, ReadabilityTarget> readability_targets;
  std::vector<AdaptationRule> adaptation_rules;

  bool operator==(const ScaffoldingRecipe&) const = default;

  // Support ids ordered from least to most support.
  std::vector<std::string> support_ladder() const {
    std::vector<std::pair<int, std::string>> items;
    for (const auto& [id, def] : scaffolding_types) items.emplace_back(def.level, id);
    std::sort(items.begin(), items.end());
    std::vector<std::string> out;
    for (auto& [lvl, id] : items) out.push_back(id);
    return out;
  }

  int support_level(const std::string& id) const {
    auto it = scaffolding_types.find(id);
    return it == scaffolding_types.end() ? 0 : it->second.level;
  }

  // Bands present in the recipe, canonical ones first in axis order.
  std::vector<std::string> band_ids() const {
    std::vector<std::string> out;
    for (const char* b : kBands) {
      if (knowledge_levels.count(b)) out.emplace_back(b);
    }
    for (const auto& [id, def] : knowledge_levels) {
      if (band_index(id) < 0) out.push_back(id);
    }
    return out;
  }

  const KnowledgeBandDef& band(const std::string& id) const {
    auto it = knowledge_levels.find(id);
    if (it == knowledge_levels.end()) throw Error("recipe has no band '" + id + "'");
    return it->second;
  }

  std::optional<std::string> resolve_strategy(const std::string& task_type, const std::string& band_id) const {
    auto t = task_types.find(task_type);
    if (t == task_types.end()) return std::nullopt;
    auto s = t->second.strategies.find(band_id);
    if (s != t->second.strategies.end() && !s->second.empty()) return s->second;
    if (t->second.fallback && !t->second.fallback->empty()) return t->second.fallback;
    return std::nullopt;
  }

  const ReadabilityTarget* readability_for(int grade) const {
    auto it = readability_targets.find(grade);
    return it == readability_targets.end() ? nullptr : &it->second;
  }
};

// ---------------------------------------------------------------------------
// Canonical defaults
// ---------------------------------------------------------------------------
namespace detail {

inline KnowledgeBandDef canonical_band(std::string_view id) {
  if (id == "emerging") {
    return {"Low prior knowledge. Triggered by phrases like 'I'm not sure'.",
            {"i'm not sure", "im not sure", "i don't know", "i dont know", "i don't understand", "i'm confused",
             "no idea"},
            {0.0, 0.0, 0.20, 0.35},
            "high"};
  }
  if (id == "developing") {
    return {"Partial understanding with gaps or misconceptions. Triggered by hedged attempts like 'I think'.",
            {"i think", "maybe", "kind of", "sort of"},
            {0.20, 0.35, 0.50, 0.65},
            "medium"};
  }
  if (id == "proficient") {
    return {"Solid grasp of the core idea; needs practice and light prompting.",
            {"got it", "i know", "that makes sense"},
            {0.50, 0.65, 0.80, 0.90},
            "low"};
  }
  if (id == "advanced") {
    return {"Secure understanding; ready for extension and transfer.",
            {"too easy", "something harder", "challenge me"},
            {0.80, 0.90, 1.0, 1.0},
            "low"};
  }
  return {};
}

inline std::optional<SupportLevelDef> canonical_support(std::string_view id) {
  if (id == "high") {
    return SupportLevelDef{"Break down tasks, provide guided examples.",
                           {"task-breakdown", "guided-example", "worked-step", "comprehension-check"},
                           3};
  }
  if (id == "medium") {
    return SupportLevelDef{"Offer hints and partial steps; let the student finish the reasoning.",
                           {"hint", "partial-step", "rephrase"},
                           2};
  }
  if (id == "low") {
    return SupportLevelDef{"Minimal prompting; pose extension questions and let the student lead.",
                           {"prompt-question", "extension"},
                           1};
  }
  return std::nullopt;
}

inline std::map<std::string, TaskTypeDef> canonical_task_types() {
  std::map<std::string, TaskTypeDef> out;
  auto add = [&](std::string id, std::string desc, std::array<std::string, 4> s) {
    TaskTypeDef t;
    t.id = id;
    t.description = std::move(desc);
    for (std::size_t i = 0; i < kBands.size(); ++i) t.strategies[kBands[i]] = std::move(s[i]);
    out.emplace(std::move(id), std::move(t));
  };
  add("recall", "Retrieve a fact, term or definition.",
      {"Give a memory cue and one guided example, then ask for a single fact.",
       "Offer a partial cue and ask the student to complete the definition.",
       "Ask for the fact and one example of where it applies.",
       "Ask the student to connect the fact to a related idea."});
  add("comprehension", "Explain or interpret a concept in one's own words.",
      {"Explain the idea in small pieces with an everyday analogy, checking each piece.",
       "Rephrase the concept and ask the student to fill in the missing link.",
       "Ask the student to explain the idea back and correct small gaps.",
       "Ask the student to compare the concept with a contrasting case."});
  add("computation", "Carry out a numeric procedure.",
      {"Break the procedure into numbered steps and work the first step together.",
       "Give a hint for the next step and let the student compute it.",
       "Let the student compute, then ask them to check the result another way.",
       "Pose a variant that requires choosing the method."});
  add("reasoning", "Draw a conclusion from evidence or rules.",
      {"Model the reasoning chain on a simpler case before the real one.",
       "Ask a guiding question that exposes the next inference.",
       "Ask the student to justify each inference briefly.",
       "Ask the student to find a counterexample or generalize the rule."});
  return out;
}

inline std::map<int, ReadabilityTarget> canonical_readability() {
  std::map<int, ReadabilityTarget> out;
  for (int g : {6, 8}) out[g] = ReadabilityTarget{g, g - 1.0, g + 1.0};
  return out;
}

inline std::vector<AdaptationRule> canonical_rules() {
  std::vector<AdaptationRule> rules;
  {
    AdaptationRule r{"p1", {}, RuleAction::raise_support, 40};
    r.when.explicit_signal = "emerging";
    rules.push_back(r);
  }
  {
    AdaptationRule r{"p2", {}, RuleAction::raise_support, 30};
    r.when.consecutive_confused = 2;
    rules.push_back(r);
  }
  {
    // Ranked above p3: at the lowest support p3 is a no-op and would mask it.
    AdaptationRule r{"p4", {}, RuleAction::advance_band, 20};
    r.when.consecutive_correct = 3;
    r.when.support = "low";
    rules.push_back(r);
  }
  {
    AdaptationRule r{"p3", {}, RuleAction::lower_support, 10};
    r.when.consecutive_correct = 2;
    rules.push_back(r);
  }
  return rules;
}

}  // namespace detail

inline ScaffoldingRecipe default_recipe() {
  ScaffoldingRecipe r;
  r.version = "1.0.0";
  r.task_types = detail::canonical_task_types();
  for (const char* b : kBands) r.knowledge_levels[b] = detail::canonical_band(b);
  for (const char* s : kCoreSupports) r.scaffolding_types[s] = *detail::canonical_support(s);
  r.readability_targets = detail::canonical_readability();
  r.adaptation_rules = detail::canonical_rules();
  return r;
}

// ---------------------------------------------------------------------------
// Serialization (canonical form: sorted map keys, rules in declared order)
// ---------------------------------------------------------------------------
inline json to_json(const ScaffoldingRecipe& r) {
  json doc = json::object();
  doc["version"] = r.version;

  json tasks = json::object();
  for (const auto& [id, t] : r.task_types) {
    json jt = {{"description", t.description}, {"strategies", json(t.strategies)}};
    if (t.fallback) jt["fallback"] = *t.fallback;
    tasks[id] = std::move(jt);
  }
  doc["task_types"] = std::move(tasks);

  json bands = json::object();
  for (const auto& [id, b] : r.knowledge_levels) {
    const auto& m = b.membership;
    bands[id] = {{"description", b.description},
                 {"trigger_phrases", b.trigger_phrases},
                 {"membership", {m.a, m.b, m.c, m.d}},
                 {"default_support", b.default_support}};
  }
  doc["knowledge_levels"] = std::move(bands);

  json supports = json::object();
  for (const auto& [id, s] : r.scaffolding_types) {
    supports[id] = {{"description", s.description}, {"tactics", s.tactics}, {"level", s.level}};
  }
  doc["scaffolding_types"] = std::move(supports);

  json targets = json::object();
  for (const auto& [g, t] : r.readability_targets) {
    targets[std::to_string(g)] = {{"fk_min", t.fk_min}, {"fk_max", t.fk_max}};
  }
  doc["readability_targets"] = std::move(targets);

  json rules = json::array();
  for (const auto& rule : r.adaptation_rules) {
    json when = json::object();
    if (rule.when.consecutive_correct) when["consecutive_correct"] = *rule.when.consecutive_correct;
    if (rule.when.consecutive_confused) when["consecutive_confused"] = *rule.when.consecutive_confused;
    if (rule.when.turns_at_support) when["turns_at_support"] = *rule.when.turns_at_support;
    if (rule.when.explicit_signal) when["explicit_signal"] = *rule.when.explicit_signal;
    if (rule.when.support) when["support"] = *rule.when.support;
    rules.push_back({{"id", rule.id}, {"when", when}, {"action", to_string(rule.action)}, {"priority", rule.priority}});
  }
  doc["adaptation_rules"] = std::move(rules);
  return doc;
}

// Minified canonical text; this is what gets embedded in prompts and hashed.
inline std::string serialize_recipe(const ScaffoldingRecipe& r) { return to_json(r).dump(); }

inline std::string serialize_recipe_pretty(const ScaffoldingRecipe& r) { return to_json(r).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Validation report
// ---------------------------------------------------------------------------
struct Finding {
  std::string code;
  std::string path;  // JSON pointer into the recipe document
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;

  bool ok() const { return errors.empty(); }
  bool has_error(std::string_view code) const {
    return std::any_of(errors.begin(), errors.end(), [&](const Finding& f) { return f.code == code; });
  }
  bool has_warning(std::string_view code) const {
    return std::any_of(warnings.begin(), warnings.end(), [&](const Finding& f) { return f.code == code; });
  }
  void merge(const ValidationReport& other) {
    errors.insert(errors.end(), other.errors.begin(), other.errors.end());
    warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
  }
};

inline json to_json(const ValidationReport& report) {
  auto list = [](const std::vector<Finding>& fs) {
    json arr = json::array();
    for (const auto& f : fs) arr.push_back({{"code", f.code}, {"path", f.path}, {"message", f.message}});
    return arr;
  };
  return {{"ok", report.ok()}, {"errors", list(report.errors)}, {"warnings", list(report.warnings)}};
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------
namespace detail {

inline std::string escape_pointer(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

class RecipeReader {
 public:
  explicit RecipeReader(std::vector<Finding>* warnings) : warnings_(warnings) {}

  ScaffoldingRecipe read(const json& doc) {
    if (!doc.is_object()) throw SchemaError("", "recipe document must be a JSON object");
    check_keys(doc, "", {"version", "task_types", "knowledge_levels", "scaffolding_types", "readability_targets",
                         "adaptation_rules"});
    ScaffoldingRecipe r;

    if (doc.contains("version")) {
      r.version = string_at(doc["version"], "/version");
      static const std::regex semver(R"(^\d+\.\d+\.\d+([-+][0-9A-Za-z.-]+)?$)");
      if (!std::regex_match(r.version, semver)) {
        throw ConstraintError("version_format", "/version", "version '" + r.version + "' is not a semantic version");
      }
    }

    if (!doc.contains("knowledge_levels")) throw SchemaError("/knowledge_levels", "required section knowledge_levels is missing");
    if (!doc.contains("scaffolding_types")) throw SchemaError("/scaffolding_types", "required section scaffolding_types is missing");

    const auto& levels = object_at(doc["knowledge_levels"], "/knowledge_levels");
    for (const auto& [id, jb] : levels.items()) r.knowledge_levels[id] = read_band(id, jb);

    const auto& supports = object_at(doc["scaffolding_types"], "/scaffolding_types");
    for (const auto& [id, js] : supports.items()) r.scaffolding_types[id] = read_support(id, js);
    for (const char* core : kCoreSupports) {
      if (!r.scaffolding_types.count(core)) r.scaffolding_types[core] = *canonical_support(core);
    }

    if (doc.contains("task_types")) {
      const auto& tasks = object_at(doc["task_types"], "/task_types");
      for (const auto& [id, jt] : tasks.items()) r.task_types[id] = read_task(id, jt);
    } else {
      r.task_types = canonical_task_types();
    }

    if (doc.contains("readability_targets")) {
      const auto& targets = object_at(doc["readability_targets"], "/readability_targets");
      for (const auto& [key, jt] : targets.items()) {
        auto t = read_target(key, jt);
        r.readability_targets[t.grade] = t;
      }
    } else {
      r.readability_targets = canonical_readability();
    }

    if (doc.contains("adaptation_rules")) {
      const auto& rules = doc["adaptation_rules"];
      if (!rules.is_array()) throw SchemaError("/adaptation_rules", "expected an array");
      for (std::size_t i = 0; i < rules.size(); ++i) r.adaptation_rules.push_back(read_rule(i, rules[i]));
    } else {
      r.adaptation_rules = canonical_rules();
    }
    return r;
  }

 private:
  std::vector<Finding>* warnings_;

  void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    for (const auto& [key, value] : obj.items()) {
      bool found = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
      if (!found && warnings_) {
        std::string p = path + "/" + escape_pointer(key);
        warnings_->push_back({"unknown_key", p, "unknown key '" + key + "' ignored"});
      }
    }
  }

  static const json& object_at(const json& j, const std::string& path) {
    if (!j.is_object()) throw SchemaError(path, "expected an object");
    return j;
  }

  static std::string string_at(const json& j, const std::string& path) {
    if (!j.is_string()) throw SchemaError(path, "expected a string");
    return j.get<std::string>();
  }

  static double number_at(const json& j, const std::string& path) {
    if (!j.is_number()) throw SchemaError(path, "expected a number");
    return j.get<double>();
  }

  static int int_at(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
    return j.get<int>();
  }

  static std::vector<std::string> strings_at(const json& j, const std::string& path) {
    if (!j.is_array()) throw SchemaError(path, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string_at(j[i], path + "/" + std::to_string(i)));
    return out;
  }

  KnowledgeBandDef read_band(const std::string& id, const json& jb) {
    const std::string path = "/knowledge_levels/" + escape_pointer(id);
    object_at(jb, path);
    check_keys(jb, path, {"description", "trigger_phrases", "membership", "default_support"});
    KnowledgeBandDef band = canonical_band(id);
    const bool canonical = band_index(id) >= 0;
    band.description = jb.contains("description") ? string_at(jb["description"], path + "/description") : "";
    if (jb.contains("trigger_phrases")) band.trigger_phrases = strings_at(jb["trigger_phrases"], path + "/trigger_phrases");

    if (jb.contains("membership")) {
      const auto& jm = jb["membership"];
      const std::string mp = path + "/membership";
      if (!jm.is_array() || jm.size() != 4) throw SchemaError(mp, "expected [a, b, c, d]");
      band.membership = {number_at(jm[0], mp + "/0"), number_at(jm[1], mp + "/1"), number_at(jm[2], mp + "/2"),
                         number_at(jm[3], mp + "/3")};
    } else if (!canonical) {
      throw SchemaError(path + "/membership", "membership breakpoints required for band '" + id + "'");
    }
    check_shape(band.membership, path + "/membership");

    if (jb.contains("default_support")) {
      band.default_support = string_at(jb["default_support"], path + "/default_support");
    } else if (!canonical) {
      throw SchemaError(path + "/default_support", "default_support required for band '" + id + "'");
    }
    return band;
  }

  static void check_shape(const MembershipShape& m, const std::string& path) {
    if (!m.in_unit_range()) throw ConstraintError("breakpoint_range", path, "breakpoints must lie in [0,1]");
    if (!(m.a <= m.b)) throw ConstraintError("unordered_breakpoints", path, "breakpoints violate a<=b");
    if (!(m.b <= m.c)) throw ConstraintError("unordered_breakpoints", path, "breakpoints violate b<=c");
    if (!(m.c <= m.d)) throw ConstraintError("unordered_breakpoints", path, "breakpoints violate c<=d");
  }

  SupportLevelDef read_support(const std::string& id, const json& js) {
    const std::string path = "/scaffolding_types/" + escape_pointer(id);
    object_at(js, path);
    check_keys(js, path, {"description", "tactics", "level"});
    auto canonical = canonical_support(id);
    SupportLevelDef s = canonical.value_or(SupportLevelDef{});
    s.description = js.contains("description") ? string_at(js["description"], path + "/description") : "";
    if (js.contains("tactics")) s.tactics = strings_at(js["tactics"], path + "/tactics");
    if (js.contains("level")) {
      s.level = int_at(js["level"], path + "/level");
    } else if (!canonical) {
      throw SchemaError(path + "/level", "level required for support '" + id + "'");
    }
    return s;
  }

  TaskTypeDef read_task(const std::string& id, const json& jt) {
    const std::string path = "/task_types/" + escape_pointer(id);
    object_at(jt, path);
    check_keys(jt, path, {"id", "description", "strategies", "fallback"});
    TaskTypeDef t;
    t.id = id;
    if (jt.contains("id") && string_at(jt["id"], path + "/id") != id) {
      throw ConstraintError("task_id_mismatch", path + "/id", "id must equal its key '" + id + "'");
    }
    if (jt.contains("description")) t.description = string_at(jt["description"], path + "/description");
    if (jt.contains("strategies")) {
      const auto& js = object_at(jt["strategies"], path + "/strategies");
      for (const auto& [band, text] : js.items()) {
        t.strategies[band] = string_at(text, path + "/strategies/" + escape_pointer(band));
      }
    }
    if (jt.contains("fallback")) t.fallback = string_at(jt["fallback"], path + "/fallback");
    return t;
  }

  ReadabilityTarget read_target(const std::string& key, const json& jt) {
    const std::string path = "/readability_targets/" + escape_pointer(key);
    object_at(jt, path);
    check_keys(jt, path, {"grade", "fk_min", "fk_max"});
    ReadabilityTarget t;
    try {
      std::size_t used = 0;
      t.grade = std::stoi(key, &used);
      if (used != key.size()) throw std::invalid_argument(key);
    } catch (const std::exception&) {
      throw SchemaError(path, "readability target keys must be integer grades");
    }
    if (jt.contains("grade") && int_at(jt["grade"], path + "/grade") != t.grade) {
      throw SchemaError(path + "/grade", "grade must equal its key");
    }
    if (!jt.contains("fk_min") || !jt.contains("fk_max")) throw SchemaError(path, "fk_min and fk_max are required");
    t.fk_min = number_at(jt["fk_min"], path + "/fk_min");
    t.fk_max = number_at(jt["fk_max"], path + "/fk_max");
    if (!(t.fk_min < t.fk_max)) throw ConstraintError("readability_range", path, "fk_min must be below fk_max");
    if (!(t.fk_min >= -4.0)) throw ConstraintError("readability_range", path + "/fk_min", "fk_min must be >= -4");
    return t;
  }

  AdaptationRule read_rule(std::size_t index, const json& jr) {
    const std::string path = "/adaptation_rules/" + std::to_string(index);
    object_at(jr, path);
    check_keys(jr, path, {"id", "when", "action", "priority"});
    AdaptationRule rule;
    if (!jr.contains("id")) throw SchemaError(path + "/id", "rule id is required");
    rule.id = string_at(jr["id"], path + "/id");
    if (!jr.contains("action")) throw SchemaError(path + "/action", "rule action is required");
    auto action = parse_rule_action(string_at(jr["action"], path + "/action"));
    if (!action) throw SchemaError(path + "/action", "unknown action");
    rule.action = *action;
    if (!jr.contains("priority")) throw SchemaError(path + "/priority", "rule priority is required");
    rule.priority = int_at(jr["priority"], path + "/priority");
    if (jr.contains("when")) {
      const std::string wp = path + "/when";
      const auto& jw = object_at(jr["when"], wp);
      check_keys(jw, wp, {"consecutive_correct", "consecutive_confused", "turns_at_support", "explicit_signal", "support"});
      if (jw.contains("consecutive_correct")) rule.when.consecutive_correct = int_at(jw["consecutive_correct"], wp + "/consecutive_correct");
      if (jw.contains("consecutive_confused")) rule.when.consecutive_confused = int_at(jw["consecutive_confused"], wp + "/consecutive_confused");
      if (jw.contains("turns_at_support")) rule.when.turns_at_support = int_at(jw["turns_at_support"], wp + "/turns_at_support");
      if (jw.contains("explicit_signal")) rule.when.explicit_signal = string_at(jw["explicit_signal"], wp + "/explicit_signal");
      if (jw.contains("support")) rule.when.support = string_at(jw["support"], wp + "/support");
    }
    return rule;
  }
};

}  // namespace detail

// Parses a recipe document, filling defaults. Unknown keys are reported into
// `warnings` when given.
inline ScaffoldingRecipe parse_recipe(std::string_view document, std::vector<Finding>* warnings = nullptr) {
  json doc;
  try {
    doc = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw SyntaxError(std::string("malformed recipe document: ") + e.what());
  }
  return detail::RecipeReader(warnings).read(doc);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------
namespace detail {

// Steady fact patterns under which support transitions are evaluated when
// looking for cycles.
struct FactPattern {
  int consecutive_correct = 0;
  int consecutive_confused = 0;
  int turns_at_support = 0;
  std::optional<std::string> explicit_signal;
};

inline bool condition_holds(const RuleCondition& c, const FactPattern& f, const std::string& support) {
  if (c.consecutive_correct && f.consecutive_correct < *c.consecutive_correct) return false;
  if (c.consecutive_confused && f.consecutive_confused < *c.consecutive_confused) return false;
  if (c.turns_at_support && f.turns_at_support < *c.turns_at_support) return false;
  if (c.explicit_signal && f.explicit_signal != c.explicit_signal) return false;
  if (c.support && *c.support != support) return false;
  return true;
}

// A rule set is cyclic if some steady fact pattern drives the support level
// around a loop of two or more states.
inline std::optional<std::string> find_rule_cycle(const ScaffoldingRecipe& r) {
  const auto ladder = r.support_ladder();
  if (ladder.empty() || r.adaptation_rules.empty()) return std::nullopt;

  auto values = [&](auto member) {
    std::set<int> vs{0};
    for (const auto& rule : r.adaptation_rules) {
      if (auto v = rule.when.*member) vs.insert(*v);
    }
    return vs;
  };
  const auto corrects = values(&RuleCondition::consecutive_correct);
  const auto confused = values(&RuleCondition::consecutive_confused);
  const auto dwell = values(&RuleCondition::turns_at_support);
  std::vector<std::optional<std::string>> signals{std::nullopt};
  for (const auto& [id, def] : r.knowledge_levels) signals.emplace_back(id);

  auto sorted = r.adaptation_rules;
  std::stable_sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) { return x.priority > y.priority; });

  const int n = static_cast<int>(ladder.size());
  for (int cc : corrects) {
    for (int cf : confused) {
      for (int tw : dwell) {
        for (const auto& sig : signals) {
          FactPattern f{cc, cf, tw, sig};
          std::vector<int> next(static_cast<std::size_t>(n));
          for (int s = 0; s < n; ++s) {
            int to = s;
            for (const auto& rule : sorted) {
              if (!condition_holds(rule.when, f, ladder[static_cast<std::size_t>(s)])) continue;
              if (rule.action == RuleAction::raise_support) to = std::min(n - 1, s + 1);
              if (rule.action == RuleAction::lower_support) to = std::max(0, s - 1);
              break;
            }
            next[static_cast<std::size_t>(s)] = to;
          }
          for (int start = 0; start < n; ++start) {
            int s = start;
            for (int step = 0; step < n; ++step) {
              s = next[static_cast<std::size_t>(s)];
              if (s == start && next[static_cast<std::size_t>(start)] != start) {
                return "support cycles through '" + ladder[static_cast<std::size_t>(start)] +
                       "' when consecutive_correct=" + std::to_string(cc) +
                       ", consecutive_confused=" + std::to_string(cf);
              }
            }
          }
        }
      }
    }
  }
  return std::nullopt;
}

// Uncovered sub-intervals of [0,1], sampled on a 1e-3 grid.
inline std::vector<std::pair<double, double>> coverage_gaps(const ScaffoldingRecipe& r) {
  std::vector<std::pair<double, double>> gaps;
  bool open = false;
  double start = 0.0;
  double last = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x = i / 1000.0;
    bool covered = false;
    for (const auto& [id, band] : r.knowledge_levels) {
      if (band.membership.ordered() && band.membership.in_unit_range() && membership(x, band.membership) > 0.0) {
        covered = true;
        break;
      }
    }
    if (!covered && !open) {
      open = true;
      start = x;
    }
    if (!covered) last = x;
    if (covered && open) {
      gaps.emplace_back(start, last);
      open = false;
    }
  }
  if (open) gaps.emplace_back(start, last);
  return gaps;
}

}  // namespace detail

inline ValidationReport validate_recipe(const ScaffoldingRecipe& r) {
  ValidationReport rep;
  auto error = [&](std::string code, std::string path, std::string msg) {
    rep.errors.push_back({std::move(code), std::move(path), std::move(msg)});
  };
  auto warning = [&](std::string code, std::string path, std::string msg) {
    rep.warnings.push_back({std::move(code), std::move(path), std::move(msg)});
  };
  using detail::escape_pointer;

  if (!std::regex_match(r.version, std::regex(R"(^\d+\.\d+\.\d+([-+][0-9A-Za-z.-]+)?$)"))) {
    error("version_format", "/version", "version is not a semantic version");
  }

  // Bands: closed set of exactly four.
  for (const char* b : kBands) {
    if (!r.knowledge_levels.count(b)) error("missing_band", "/knowledge_levels", std::string("missing band '") + b + "'");
  }
  for (const auto& [id, band] : r.knowledge_levels) {
    const std::string path = "/knowledge_levels/" + escape_pointer(id);
    if (band_index(id) < 0) error("unknown_band", path, "unknown band '" + id + "'");
    const auto& m = band.membership;
    if (!m.in_unit_range()) error("breakpoint_range", path + "/membership", "breakpoints must lie in [0,1]");
    if (!m.ordered()) error("unordered_breakpoints", path + "/membership", "breakpoints must satisfy a<=b<=c<=d");
    if (!r.scaffolding_types.count(band.default_support)) {
      error("orphan_support", path + "/default_support",
            "band '" + id + "' refers to unknown support '" + band.default_support + "'");
    }
    if (id == "emerging" && band.trigger_phrases.empty()) {
      error("missing_trigger_phrases", path + "/trigger_phrases", "emerging band needs at least one trigger phrase");
    }
  }

  // Supports.
  for (const char* s : kCoreSupports) {
    if (!r.scaffolding_types.count(s)) error("missing_support", "/scaffolding_types", std::string("missing support '") + s + "'");
  }
  std::map<int, std::string> levels;
  for (const auto& [id, s] : r.scaffolding_types) {
    const std::string path = "/scaffolding_types/" + escape_pointer(id);
    if (s.tactics.empty()) error("empty_tactics", path + "/tactics", "support '" + id + "' lists no tactics");
    auto [it, inserted] = levels.emplace(s.level, id);
    if (!inserted) error("duplicate_support_level", path + "/level", "support '" + id + "' shares level with '" + it->second + "'");
  }

  // Task types x bands.
  if (r.task_types.empty()) error("no_task_types", "/task_types", "recipe declares no task types");
  for (const auto& [tid, t] : r.task_types) {
    const std::string path = "/task_types/" + escape_pointer(tid);
    for (const char* b : kBands) {
      if (!r.knowledge_levels.count(b)) continue;
      auto direct = t.strategies.find(b);
      if (direct != t.strategies.end() && !direct->second.empty()) continue;
      if (t.fallback && !t.fallback->empty()) {
        warning("strategy_fallback", path, "task '" + tid + "' x band '" + b + "' resolved by fallback");
      } else {
        error("unresolved_strategy", path, "task '" + tid + "' has no strategy for band '" + b + "'");
      }
    }
    for (const auto& [band, text] : t.strategies) {
      if (!r.knowledge_levels.count(band)) {
        error("unknown_band", path + "/strategies/" + escape_pointer(band), "strategy for unknown band '" + band + "'");
      }
    }
  }

  // Readability.
  for (const auto& [g, t] : r.readability_targets) {
    const std::string path = "/readability_targets/" + std::to_string(g);
    if (!(t.fk_min < t.fk_max) || !(t.fk_min >= -4.0)) {
      error("readability_range", path, "require fk_min < fk_max and fk_min >= -4");
    }
  }

  // Adaptation rules.
  std::map<int, std::size_t> priorities;
  std::set<std::string> rule_ids;
  for (std::size_t i = 0; i < r.adaptation_rules.size(); ++i) {
    const auto& rule = r.adaptation_rules[i];
    const std::string path = "/adaptation_rules/" + std::to_string(i);
    auto [it, inserted] = priorities.emplace(rule.priority, i);
    if (!inserted) {
      error("duplicate_priority", path + "/priority",
            "rule '" + rule.id + "' shares priority " + std::to_string(rule.priority) + " with rule #" + std::to_string(it->second));
    }
    if (!rule_ids.insert(rule.id).second) error("duplicate_rule_id", path + "/id", "rule id '" + rule.id + "' repeated");
    if (rule.when.explicit_signal && !r.knowledge_levels.count(*rule.when.explicit_signal)) {
      error("unknown_rule_band", path + "/when/explicit_signal", "rule refers to unknown band '" + *rule.when.explicit_signal + "'");
    }
    if (rule.when.support && !r.scaffolding_types.count(*rule.when.support)) {
      error("unknown_rule_support", path + "/when/support", "rule refers to unknown support '" + *rule.when.support + "'");
    }
    for (auto [name, v] : {std::pair{"consecutive_correct", rule.when.consecutive_correct},
                           std::pair{"consecutive_confused", rule.when.consecutive_confused},
                           std::pair{"turns_at_support", rule.when.turns_at_support}}) {
      if (v && *v < 0) error("invalid_threshold", path + "/when/" + name, std::string(name) + " must be >= 0");
    }
  }
  if (auto cycle = detail::find_rule_cycle(r)) error("cyclic_rules", "/adaptation_rules", *cycle);

  // Coverage of the knowledge axis.
  for (auto [lo, hi] : detail::coverage_gaps(r)) {
    warning("score_gap", "/knowledge_levels",
            "score gap: no band covers [" + format_fixed(lo, 3) + ", " + format_fixed(hi, 3) + "]");
  }
  return rep;
}

// Parse + validate in one pass. Parse failures become report errors; the
// recipe is empty when parsing failed.
struct RecipeCheck {
  std::optional<ScaffoldingRecipe> recipe;
  ValidationReport report;
  bool syntax_failure = false;  // SyntaxError or SchemaError
};

inline RecipeCheck check_recipe_document(std::string_view document) {
  RecipeCheck out;
  std::vector<Finding> unknown;
  try {
    out.recipe = parse_recipe(document, &unknown);
  } catch (const SyntaxError& e) {
    out.syntax_failure = true;
    out.report.errors.push_back({e.code(), e.path(), e.what()});
    return out;
  } catch (const SchemaError& e) {
    out.syntax_failure = true;
    out.report.errors.push_back({e.code(), e.path(), e.what()});
    return out;
  } catch (const ConstraintError& e) {
    out.report.errors.push_back({e.code(), e.path(), e.what()});
    return out;
  }
  out.report = validate_recipe(*out.recipe);
  out.report.warnings.insert(out.report.warnings.begin(), unknown.begin(), unknown.end());
  return out;
}

}  // namespace scaffold
