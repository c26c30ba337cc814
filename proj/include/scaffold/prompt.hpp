#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "scaffold/assets.hpp"
#include "scaffold/common.hpp"
#include "scaffold/recipe.hpp"
#include "scaffold/scenario.hpp"

namespace scaffold {

class UnknownGrade : public Error {
 public:
  explicit UnknownGrade(int grade) : Error("no readability target for grade " + std::to_string(grade)) {}
};

class ExemplarBankEmpty : public Error {
 public:
  using Error::Error;
};

class UnknownCondition : public Error {
 public:
  using Error::Error;
};

enum class ConditionKind { scaffolded, flat, cot, few_shot };
enum class Variant { full, prompt_only, scaffold_only };

inline std::string to_string(ConditionKind k) {
  switch (k) {
    case ConditionKind::scaffolded: return "scaffolded";
    case ConditionKind::flat: return "flat";
    case ConditionKind::cot: return "cot";
    case ConditionKind::few_shot: return "few_shot";
  }
  return "flat";
}

inline std::string to_string(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::prompt_only: return "prompt_only";
    case Variant::scaffold_only: return "scaffold_only";
  }
  return "full";
}

struct PromptCondition {
  ConditionKind kind = ConditionKind::scaffolded;
  Variant variant = Variant::full;  // only meaningful for scaffolded

  bool operator==(const PromptCondition& o) const {
    return kind == o.kind && (kind != ConditionKind::scaffolded || variant == o.variant);
  }

  bool carries_schema() const {
    return kind == ConditionKind::scaffolded && variant != Variant::prompt_only;
  }

  // Column value used in CSVs; empty for non-scaffolded kinds.
  std::string variant_column() const { return kind == ConditionKind::scaffolded ? to_string(variant) : ""; }

  // Short label used in reports: recipe, prompt_only, scaffold_only, flat, cot, few_shot.
  std::string label() const {
    if (kind != ConditionKind::scaffolded) return to_string(kind);
    return variant == Variant::full ? "recipe" : to_string(variant);
  }

  // Round-trips through parse_condition.
  std::string id() const {
    return kind == ConditionKind::scaffolded ? "scaffolded/" + to_string(variant) : to_string(kind);
  }
};

// Accepts "flat", "cot", "few_shot", "scaffolded", "scaffolded/<variant>",
// and the report labels "recipe", "prompt_only", "scaffold_only".
inline PromptCondition parse_condition(std::string_view s) {
  if (s == "flat") return {ConditionKind::flat, Variant::full};
  if (s == "cot") return {ConditionKind::cot, Variant::full};
  if (s == "few_shot") return {ConditionKind::few_shot, Variant::full};
  if (s == "scaffolded" || s == "scaffolded/full" || s == "recipe" || s == "full")
    return {ConditionKind::scaffolded, Variant::full};
  if (s == "scaffolded/prompt_only" || s == "prompt_only") return {ConditionKind::scaffolded, Variant::prompt_only};
  if (s == "scaffolded/scaffold_only" || s == "scaffold_only")
    return {ConditionKind::scaffolded, Variant::scaffold_only};
  throw UnknownCondition("unknown prompting condition '" + std::string(s) + "'");
}

inline constexpr std::string_view kRecipeFileName = "scaffolding_recipe.json";
inline constexpr std::string_view kFlatPrompt = "You are a helpful assistant.";
inline constexpr std::string_view kCotPrompt = "You are a tutor. Think step by step";
inline constexpr std::string_view kScaffoldOnlyPrefix = "Follow this scaffolding control schema when tutoring.";
inline constexpr std::string_view kComprehensionDirective = "Always ask if the student understood before moving on.";

inline std::string render_boundary(std::string_view recipe_name) {
  std::string out = "You are a tutor that adapts to a student's grade, task, and knowledge level.\n\n";
  out += "Use `" + std::string(recipe_name) + "` to:\n";
  out += "1. Match the task type.\n";
  out += "2. Apply a strategy based on knowledge level.\n";
  out += "3. Choose scaffolding support.\n";
  out += "4. Adjust vocabulary to grade level.\n";
  out += "5. Monitor learning using update rules.\n\n";
  out += kComprehensionDirective;
  return out;
}

inline std::string readability_directive(int grade, const ScaffoldingRecipe& recipe) {
  auto it = recipe.readability_targets.find(grade);
  if (it == recipe.readability_targets.end()) throw UnknownGrade(grade);
  return "Write so that your replies score between " + format_g9(it->second.fk_min) + " and " +
         format_g9(it->second.fk_max) + " on the Flesch-Kincaid grade scale.";
}

// ---------------------------------------------------------------------------
// Few-shot exemplars
// ---------------------------------------------------------------------------
struct Exemplar {
  std::string subject;
  std::string band;
  std::string student;
  std::string tutor;
  bool operator==(const Exemplar&) const = default;
};

inline std::vector<Exemplar> parse_exemplar_bank(std::string_view jsonl) {
  std::vector<Exemplar> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < jsonl.size()) {
    auto end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    ++line_no;
    const auto line = trim(jsonl.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("subject").get<std::string>(), j.at("band").get<std::string>(),
                     j.at("student").get<std::string>(), j.at("tutor").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

inline const std::vector<Exemplar>& default_exemplar_bank() {
  static const std::vector<Exemplar> bank = parse_exemplar_bank(assets::kExemplarBank);
  return bank;
}

// The k exemplars for `subject` whose band is nearest to `band`; ties keep
// bank order.
inline std::vector<Exemplar> select_exemplars(const std::vector<Exemplar>& bank, const std::string& subject,
                                              const std::string& band, std::size_t k = 3) {
  std::vector<std::pair<int, std::size_t>> ranked;
  const int target = band_index(band);
  for (std::size_t i = 0; i < bank.size(); ++i) {
    if (bank[i].subject != subject) continue;
    ranked.emplace_back(std::abs(band_index(bank[i].band) - target), i);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<Exemplar> out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) out.push_back(bank[ranked[i].second]);
  return out;
}

// ---------------------------------------------------------------------------
// Compilation
// ---------------------------------------------------------------------------
struct CompiledPrompt {
  std::string system_text;
  std::optional<std::string> schema_payload;
  std::vector<std::pair<std::string, std::string>> exemplars;  // (student, tutor)
  std::uint64_t content_hash = 0;

  // Text of the system message sent to the model.
  std::string system_message() const {
    if (!schema_payload) return system_text;
    return system_text + "\n\n" + *schema_payload;
  }
};

inline std::uint64_t compute_content_hash(const CompiledPrompt& p) {
  Fnv1a h;
  h.field(p.system_text);
  h.add_u64(p.schema_payload ? 1 : 0);
  if (p.schema_payload) h.field(*p.schema_payload);
  h.add_u64(p.exemplars.size());
  for (const auto& [s, t] : p.exemplars) h.field(s).field(t);
  return h.value();
}

inline std::string profile_line(const LearnerProfile& profile, const Scenario& scenario) {
  return "Student profile: grade " + std::to_string(profile.grade) + ", subject " + profile.subject +
         ", knowledge level " + profile.band + ". Task type: " + scenario.task_type + ".";
}

inline CompiledPrompt compile(const PromptCondition& condition, const ScaffoldingRecipe& recipe,
                              const LearnerProfile& profile, const Scenario& scenario,
                              const std::vector<Exemplar>& exemplar_bank = default_exemplar_bank()) {
  CompiledPrompt p;
  switch (condition.kind) {
    case ConditionKind::flat:
      p.system_text = kFlatPrompt;
      break;
    case ConditionKind::cot:
      p.system_text = kCotPrompt;
      break;
    case ConditionKind::few_shot: {
      auto chosen = select_exemplars(exemplar_bank, profile.subject, profile.band, 3);
      if (chosen.empty()) throw ExemplarBankEmpty("no exemplars for subject '" + profile.subject + "'");
      p.system_text = "You are a tutor for a grade " + std::to_string(profile.grade) + " " + profile.subject +
                      " student. Here are examples of good tutoring.";
      for (const auto& e : chosen) {
        p.system_text += "\n\nStudent: " + e.student + "\nTutor: " + e.tutor;
        p.exemplars.emplace_back(e.student, e.tutor);
      }
      break;
    }
    case ConditionKind::scaffolded: {
      const std::string boundary = render_boundary(kRecipeFileName) + "\n\n" + profile_line(profile, scenario) +
                                   "\n" + readability_directive(profile.grade, recipe);
      if (condition.variant == Variant::scaffold_only) {
        p.system_text = kScaffoldOnlyPrefix;
      } else {
        p.system_text = boundary;
      }
      if (condition.variant != Variant::prompt_only) p.schema_payload = serialize_recipe(recipe);
      break;
    }
  }
  p.content_hash = compute_content_hash(p);
  return p;
}

}  // namespace scaffold
