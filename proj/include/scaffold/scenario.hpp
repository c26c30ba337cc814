#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaffold/assets.hpp"
#include "scaffold/common.hpp"
#include "scaffold/gateway.hpp"
#include "scaffold/recipe.hpp"

namespace scaffold {

using nlohmann::json;

class SpecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

inline constexpr std::array<const char*, 2> kSubjects = {"math", "science"};

struct LearnerProfile {
  int grade = 6;
  std::string subject = "math";
  std::string band = "emerging";
  std::string profile_id;
  bool operator==(const LearnerProfile&) const = default;
};

struct Scenario {
  std::string scenario_id;
  std::string subject;
  int grade = 6;
  std::string task_type;
  std::string band;
  std::string task_text;
  std::uint64_t seed = 0;
  std::string template_id;
  std::optional<std::string> template_text;  // set once the task has been rephrased
  bool operator==(const Scenario&) const = default;

  LearnerProfile profile() const { return {grade, subject, band, scenario_id + "-learner"}; }
};

inline json to_json(const LearnerProfile& p) {
  return {{"grade", p.grade}, {"subject", p.subject}, {"band", p.band}, {"profile_id", p.profile_id}};
}

inline json to_json(const Scenario& s) {
  json j{{"scenario_id", s.scenario_id}, {"subject", s.subject},   {"grade", s.grade},
         {"task_type", s.task_type},     {"band", s.band},         {"task_text", s.task_text},
         {"seed", s.seed},               {"template_id", s.template_id}};
  if (s.template_text) j["template_text"] = *s.template_text;
  return j;
}

inline Scenario scenario_from_json(const json& j) {
  Scenario s;
  s.scenario_id = j.at("scenario_id").get<std::string>();
  s.subject = j.at("subject").get<std::string>();
  s.grade = j.at("grade").get<int>();
  s.task_type = j.at("task_type").get<std::string>();
  s.band = j.at("band").get<std::string>();
  s.task_text = j.at("task_text").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.template_id = j.value("template_id", "");
  if (j.contains("template_text")) s.template_text = j["template_text"].get<std::string>();
  return s;
}

struct ScenarioSetSpec {
  int total = 200;
  std::map<std::string, int> per_subject{{"math", 100}, {"science", 100}};
  std::vector<int> grades{6, 8};
  std::vector<std::string> bands{"emerging", "developing", "proficient", "advanced"};
  std::uint64_t seed = 42;
};

inline json to_json(const ScenarioSetSpec& s) {
  return {{"total", s.total}, {"per_subject", s.per_subject}, {"grades", s.grades}, {"bands", s.bands}, {"seed", s.seed}};
}

inline ScenarioSetSpec scenario_spec_from_json(const json& j) {
  ScenarioSetSpec s;
  s.total = j.value("total", s.total);
  if (j.contains("per_subject")) s.per_subject = j["per_subject"].get<std::map<std::string, int>>();
  if (j.contains("grades")) s.grades = j["grades"].get<std::vector<int>>();
  if (j.contains("bands")) s.bands = j["bands"].get<std::vector<std::string>>();
  s.seed = j.value("seed", s.seed);
  return s;
}

// ---------------------------------------------------------------------------
// Template bank
// ---------------------------------------------------------------------------
struct TaskTemplate {
  std::string id;
  std::string subject;
  std::string task_type;
  std::string text;
  json params;  // name -> {"<grade>": [lo, hi]} or {"choices": {"<grade>": [...]}}
};

struct TemplateBank {
  std::string version;
  std::vector<TaskTemplate> templates;

  std::vector<const TaskTemplate*> matching(const std::string& subject, const std::string& task_type) const {
    std::vector<const TaskTemplate*> out;
    for (const auto& t : templates) {
      if (t.subject == subject && t.task_type == task_type) out.push_back(&t);
    }
    return out;
  }
};

inline TemplateBank parse_template_bank(std::string_view text) {
  TemplateBank bank;
  const json j = json::parse(text);
  bank.version = j.at("version").get<std::string>();
  for (const auto& t : j.at("templates")) {
    bank.templates.push_back({t.at("id").get<std::string>(), t.at("subject").get<std::string>(),
                              t.at("task_type").get<std::string>(), t.at("text").get<std::string>(),
                              t.value("params", json::object())});
  }
  return bank;
}

inline const TemplateBank& default_template_bank() {
  static const TemplateBank bank = parse_template_bank(assets::kScenarioTemplates);
  return bank;
}

namespace detail {

// Grade-conditioned value table entry; grades without an entry use the
// nearest listed grade.
inline const json& grade_entry(const json& table, int grade) {
  const json* best = nullptr;
  int best_dist = 0;
  for (auto it = table.begin(); it != table.end(); ++it) {
    const int g = std::stoi(it.key());
    const int dist = std::abs(g - grade);
    if (!best || dist < best_dist) {
      best = &it.value();
      best_dist = dist;
    }
  }
  if (!best) throw SpecError("template parameter has no grade entries");
  return *best;
}

inline std::string instantiate(const TaskTemplate& t, int grade, Rng& rng) {
  std::string text = t.text;
  for (auto it = t.params.begin(); it != t.params.end(); ++it) {
    const json& spec = it.value();
    std::string value;
    if (spec.contains("choices")) {
      const json& options = grade_entry(spec["choices"], grade);
      value = options.at(static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(options.size()) - 1)))
                  .get<std::string>();
    } else {
      const json& range = grade_entry(spec, grade);
      value = std::to_string(rng.uniform_int(range.at(0).get<std::int64_t>(), range.at(1).get<std::int64_t>()));
    }
    text = replace_all(std::move(text), "{" + it.key() + "}", value);
  }
  return text;
}

}  // namespace detail

// Balanced over subject x grade x band cells: each cell of a subject gets
// floor(n / cells) scenarios and the remainder goes to cells picked by a
// seeded shuffle. Task types rotate through the recipe's task types.
inline std::vector<Scenario> generate_set(const ScenarioSetSpec& spec, const ScaffoldingRecipe& recipe,
                                          const TemplateBank& bank = default_template_bank()) {
  int sum = 0;
  for (const auto& [subject, n] : spec.per_subject) {
    if (n < 0) throw SpecError("negative count for subject " + subject);
    sum += n;
  }
  if (sum != spec.total)
    throw SpecError("per-subject counts sum to " + std::to_string(sum) + " but total is " + std::to_string(spec.total));
  if (spec.total == 0) return {};
  if (spec.grades.empty() || spec.bands.empty()) throw SpecError("grades and bands must be non-empty");
  for (const auto& b : spec.bands) {
    if (!recipe.knowledge_levels.count(b)) throw SpecError("band '" + b + "' is not in the recipe");
  }
  std::vector<std::string> task_types;
  for (const auto& [id, t] : recipe.task_types) task_types.push_back(id);
  if (task_types.empty()) throw SpecError("recipe has no task types");

  std::vector<Scenario> out;
  for (const auto& [subject, n] : spec.per_subject) {
    if (n == 0) continue;
    for (const auto& tt : task_types) {
      if (bank.matching(subject, tt).empty())
        throw SpecError("no templates for subject '" + subject + "' and task type '" + tt + "'");
    }
    struct Cell {
      int grade;
      std::string band;
      int count;
    };
    std::vector<Cell> cells;
    for (int g : spec.grades)
      for (const auto& b : spec.bands) cells.push_back({g, b, 0});
    const int base = n / static_cast<int>(cells.size());
    int remainder = n % static_cast<int>(cells.size());
    std::vector<std::size_t> order(cells.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng rng(derive_seed(spec.seed, "cells:" + subject));
    rng.shuffle(order);
    for (auto& c : cells) c.count = base;
    for (int i = 0; i < remainder; ++i) ++cells[order[static_cast<std::size_t>(i)]].count;

    Rng tt_rng(derive_seed(spec.seed, "task-types:" + subject));
    auto rotation = task_types;
    tt_rng.shuffle(rotation);
    std::size_t next_tt = 0;
    for (const auto& c : cells) {
      for (int k = 0; k < c.count; ++k) {
        Scenario s;
        s.subject = subject;
        s.grade = c.grade;
        s.band = c.band;
        char id[96];
        std::snprintf(id, sizeof id, "%s-g%d-%s-%02d", subject.c_str(), c.grade, c.band.c_str(), k + 1);
        s.scenario_id = id;
        s.task_type = rotation[next_tt++ % rotation.size()];
        s.seed = derive_seed(spec.seed, s.scenario_id);
        Rng srng(s.seed);
        const auto candidates = bank.matching(subject, s.task_type);
        const auto* tmpl = candidates[static_cast<std::size_t>(srng.uniform_int(0, static_cast<std::int64_t>(candidates.size()) - 1))];
        s.template_id = tmpl->id;
        s.task_text = detail::instantiate(*tmpl, c.grade, srng);
        out.push_back(std::move(s));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Scenario& a, const Scenario& b) { return a.scenario_id < b.scenario_id; });
  return out;
}

// Rephrases each task through `writer`; failures keep the template text.
inline std::vector<Scenario> augment_with_llm(std::vector<Scenario> scenarios, Provider& writer,
                                              const std::string& model_id = "task-writer") {
  for (auto& s : scenarios) {
    ChatRequest req;
    req.model_id = model_id;
    req.messages = {{"system", "You rewrite tutoring tasks for a grade " + std::to_string(s.grade) + " " + s.subject +
                                   " student. Keep the meaning and the numbers. Reply with the task only."},
                    {"user", "Task: " + s.task_text}};
    try {
      auto resp = writer.complete(req);
      const std::string text(trim(resp.content));
      if (text.empty()) throw MalformedResponse("empty rephrasing");
      if (!s.template_text) s.template_text = s.task_text;
      s.task_text = text;
    } catch (const GatewayError& e) {
      warn("scenario " + s.scenario_id + ": keeping template text (" + e.what() + ")");
    }
  }
  return scenarios;
}

inline void save_set(const std::vector<Scenario>& scenarios, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& s : scenarios) out << to_json(s).dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

inline std::vector<Scenario> parse_set(std::string_view text) {
  std::vector<Scenario> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const auto line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    try {
      out.push_back(scenario_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

inline std::vector<Scenario> load_set(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_set(ss.str());
}

}  // namespace scaffold
