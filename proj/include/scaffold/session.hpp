#pragma once

#include <chrono>
#include <ctime>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaffold/common.hpp"
#include "scaffold/fuzzy.hpp"
#include "scaffold/gateway.hpp"
#include "scaffold/prompt.hpp"
#include "scaffold/readability.hpp"
#include "scaffold/recipe.hpp"
#include "scaffold/scenario.hpp"

namespace scaffold {

using nlohmann::json;

class SessionClosed : public Error {
 public:
  explicit SessionClosed(const std::string& id) : Error("session " + id + " is closed") {}
};

class InvalidProfile : public Error {
 public:
  InvalidProfile(std::string field, const std::string& msg) : Error(msg), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class RecipeInvalid : public Error {
 public:
  explicit RecipeInvalid(ValidationReport report)
      : Error("recipe failed validation: " + (report.errors.empty() ? std::string("?") : report.errors.front().message)),
        report_(std::move(report)) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

inline constexpr std::string_view kComprehensionCheck = "Did that make sense to you?";

// Interrogative means the final non-whitespace character is '?'.
inline bool ends_interrogative(std::string_view text) {
  auto t = trim_right(text);
  return !t.empty() && t.back() == '?';
}

inline std::string enforce_comprehension_check(std::string_view tutor_text) {
  if (ends_interrogative(tutor_text)) return std::string(tutor_text);
  const auto body = trim(tutor_text);
  if (body.empty()) return std::string(kComprehensionCheck);
  return std::string(trim_right(tutor_text)) + " " + std::string(kComprehensionCheck);
}

// UTC ISO-8601 with milliseconds.
using Clock = std::function<std::string()>;

inline std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

struct Turn {
  int index = 0;
  std::string role;  // task | learner | tutor
  std::string text;
  std::string timestamp;
  // learner turns
  std::vector<Evidence> evidence;
  std::optional<bool> correctness;
  // tutor turns
  std::optional<FollowUp> follow_up;
  std::optional<double> fk_grade;
  std::optional<std::string> support;
  std::uint64_t prompt_hash = 0;
  double latency_ms = 0.0;
};

struct SessionFacts {
  int consecutive_correct = 0;
  int consecutive_confused = 0;
  int turns_at_support = 0;
  bool operator==(const SessionFacts&) const = default;
};

// Everything a session needs besides its state. Shared by value; the recipe
// and provider are immutable or thread-safe.
struct SessionContext {
  std::shared_ptr<const ScaffoldingRecipe> recipe;
  std::shared_ptr<Provider> provider;
  std::string model_id = "mock-tutor";
  GenerationParams params;
  Clock clock = utc_now_iso8601;
  const std::vector<Exemplar>* exemplars = &default_exemplar_bank();
};

struct SessionState {
  std::string session_id;
  LearnerProfile profile;
  PromptCondition condition;
  Scenario scenario;
  KnowledgeEstimate estimate;
  std::string support;
  std::vector<Turn> transcript;
  SessionFacts facts;
  bool closed = false;
  SupportDecision last_decision;
  std::optional<std::string> last_rule;
};

inline void check_profile(const LearnerProfile& p, const ScaffoldingRecipe& recipe, const PromptCondition& condition) {
  if (!recipe.knowledge_levels.count(p.band)) throw InvalidProfile("band", "unknown band '" + p.band + "'");
  if (p.subject.empty()) throw InvalidProfile("subject", "subject is empty");
  if (condition.kind == ConditionKind::scaffolded && !recipe.readability_targets.count(p.grade))
    throw InvalidProfile("grade", "no readability target for grade " + std::to_string(p.grade));
  if (p.grade < 1 || p.grade > 12) throw InvalidProfile("grade", "grade must be between 1 and 12");
}

inline SessionState start_session(const LearnerProfile& profile, const PromptCondition& condition,
                                  const Scenario& scenario, const SessionContext& ctx,
                                  std::optional<std::string> session_id = std::nullopt) {
  const auto& recipe = *ctx.recipe;
  auto report = validate_recipe(recipe);
  if (!report.ok()) throw RecipeInvalid(std::move(report));
  check_profile(profile, recipe, condition);
  if (!recipe.task_types.count(scenario.task_type))
    throw InvalidProfile("task_type", "unknown task type '" + scenario.task_type + "'");

  SessionState s;
  s.session_id = session_id.value_or(
      "s-" + to_hex(Fnv1a{}.field(profile.profile_id).field(scenario.scenario_id).field(condition.id()).value()));
  s.profile = profile;
  s.condition = condition;
  s.scenario = scenario;
  s.estimate = initial_estimate(profile.band, recipe);
  s.support = recipe.band(profile.band).default_support;
  s.last_decision = infer_support(s.estimate, recipe);
  Turn seed;
  seed.index = 0;
  seed.role = "task";
  seed.text = scenario.task_text;
  seed.timestamp = ctx.clock();
  s.transcript.push_back(std::move(seed));
  return s;
}

// Controller state handed to schema-bearing prompts on every turn.
inline std::string controller_state_line(const SessionState& s, const ScaffoldingRecipe& recipe) {
  const auto band = s.estimate.dominant_band();
  std::string line = std::string(kSupportLinePrefix) + s.support + ". Knowledge band: " + band + ".";
  if (auto strategy = recipe.resolve_strategy(s.scenario.task_type, band)) line += " Strategy: " + *strategy;
  return line;
}

inline ChatRequest build_request(const SessionState& s, const std::string& utterance, const SessionContext& ctx) {
  const auto& recipe = *ctx.recipe;
  const auto compiled = compile(s.condition, recipe, s.profile, s.scenario, *ctx.exemplars);
  std::string system = compiled.system_message();
  if (s.condition.carries_schema()) system += "\n\n" + controller_state_line(s, recipe);
  ChatRequest req;
  req.model_id = ctx.model_id;
  req.params = ctx.params;
  req.messages.push_back({"system", system});
  for (const auto& t : s.transcript) {
    if (t.role == "tutor") req.messages.push_back({"assistant", t.text});
    else req.messages.push_back({"user", t.text});
  }
  req.messages.push_back({"user", utterance.empty() ? std::string("(no reply)") : utterance});
  return req;
}

struct TurnResult {
  Turn tutor;
  SessionState state;
};

// One learner/tutor exchange. The input state is never modified; on a
// gateway failure the exception propagates and the caller keeps its state.
inline TurnResult next_turn(const SessionState& state, const std::string& utterance, std::optional<bool> correctness,
                            const SessionContext& ctx) {
  if (state.closed) throw SessionClosed(state.session_id);
  const auto& recipe = *ctx.recipe;
  SessionState s = state;

  const auto evidence = detect_evidence(utterance, recipe, correctness);
  s.estimate = update_estimate(s.estimate, evidence, recipe);

  const auto bands = recipe.band_ids();
  const std::string lowest_band = bands.empty() ? std::string() : bands.front();
  std::optional<std::string> signal;
  for (const auto& e : evidence) {
    if (e.kind != EvidenceKind::trigger_phrase && e.kind != EvidenceKind::explicit_self_report) continue;
    if (!signal || band_index(e.band) < band_index(*signal)) signal = e.band;
  }
  const bool correct = correctness.value_or(false);
  const bool confused = (correctness && !*correctness) || (signal && *signal == lowest_band);
  s.facts.consecutive_correct = correct ? s.facts.consecutive_correct + 1 : 0;
  s.facts.consecutive_confused = confused ? s.facts.consecutive_confused + 1 : 0;
  s.facts.turns_at_support += 1;

  AdaptationFacts facts{s.facts.consecutive_correct, s.facts.consecutive_confused, s.facts.turns_at_support, signal,
                        s.support};
  const auto outcome = apply_adaptation_rules(facts, recipe.adaptation_rules);
  s.last_rule = outcome.rule_id;
  std::string next_support = s.support;
  switch (outcome.action) {
    case RuleAction::raise_support:
      next_support = step_support(s.support, +1, recipe);
      s.last_decision = infer_support(s.estimate, recipe, s.support);
      break;
    case RuleAction::lower_support:
      next_support = step_support(s.support, -1, recipe);
      s.last_decision = infer_support(s.estimate, recipe, s.support);
      break;
    case RuleAction::advance_band:
    case RuleAction::regress_band:
      s.estimate = shift_band(s.estimate, outcome.action == RuleAction::advance_band ? +1 : -1, recipe);
      [[fallthrough]];
    case RuleAction::hold:
      s.last_decision = infer_support(s.estimate, recipe, s.support);
      next_support = step_toward(s.support, s.last_decision.support, recipe);
      break;
  }
  if (next_support != s.support) s.facts.turns_at_support = 0;
  s.support = next_support;

  const auto request = build_request(s, utterance, ctx);
  const auto response = ctx.provider->complete(request);

  Turn learner;
  learner.index = static_cast<int>(s.transcript.size());
  learner.role = "learner";
  learner.text = utterance;
  learner.timestamp = ctx.clock();
  learner.evidence = evidence;
  learner.correctness = correctness;
  s.transcript.push_back(learner);

  Turn tutor;
  tutor.index = static_cast<int>(s.transcript.size());
  tutor.role = "tutor";
  tutor.text = enforce_comprehension_check(response.content);
  tutor.timestamp = ctx.clock();
  tutor.follow_up = select_follow_up(s.estimate, turn_outcome(evidence), s.support, recipe);
  tutor.fk_grade = flesch_kincaid(tutor.text).fk_grade;
  tutor.support = s.support;
  tutor.prompt_hash = request_hash(request);
  tutor.latency_ms = response.latency_ms;
  s.transcript.push_back(tutor);
  return {tutor, std::move(s)};
}

inline SessionState close_session(SessionState s) {
  s.closed = true;
  return s;
}

struct ScriptStep {
  std::string utterance;
  std::optional<bool> correctness;
};

// Thrown by run_scripted_session; carries the transcript up to the failure.
class SessionAborted : public GatewayError {
 public:
  SessionAborted(SessionState partial, const std::string& cause)
      : GatewayError("session aborted: " + cause), partial_(std::move(partial)) {}
  const SessionState& partial() const { return partial_; }

 private:
  SessionState partial_;
};

inline SessionState run_scripted_session(SessionState state, const std::vector<ScriptStep>& script,
                                         const SessionContext& ctx) {
  if (script.empty()) throw Error("script must contain at least one step");
  for (const auto& step : script) {
    try {
      state = next_turn(state, step.utterance, step.correctness, ctx).state;
    } catch (const GatewayError& e) {
      throw SessionAborted(std::move(state), e.what());
    }
  }
  return state;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------
inline json to_json(const Evidence& e) {
  json j{{"kind", to_string(e.kind)}, {"weight", e.weight}};
  if (!e.band.empty()) j["band"] = e.band;
  return j;
}

inline json to_json(const Turn& t) {
  json j{{"index", t.index}, {"role", t.role}, {"text", t.text}, {"timestamp", t.timestamp}};
  if (t.role == "learner") {
    j["evidence"] = json::array();
    for (const auto& e : t.evidence) j["evidence"].push_back(to_json(e));
    j["correctness"] = t.correctness ? json(*t.correctness) : json(nullptr);
  }
  if (t.role == "tutor") {
    j["follow_up"] = t.follow_up ? to_string(*t.follow_up) : "";
    j["fk_grade"] = t.fk_grade.value_or(0.0);
    j["support"] = t.support.value_or("");
    j["prompt_hash"] = to_hex(t.prompt_hash);
  }
  return j;
}

// One Turn record per line.
inline std::string export_transcript_jsonl(const SessionState& s) {
  std::string out;
  for (const auto& t : s.transcript) out += to_json(t).dump() + "\n";
  return out;
}

inline json fuzzy_state_json(const SessionState& s) {
  return {{"score", s.estimate.score},
          {"memberships", s.estimate.memberships},
          {"confidence", s.estimate.confidence},
          {"dominant_band", s.estimate.dominant_band()},
          {"support", s.support},
          {"activation", s.last_decision.activation},
          {"hysteresis_applied", s.last_decision.hysteresis_applied},
          {"rule_fired", s.last_rule ? json(*s.last_rule) : json(nullptr)}};
}

inline json to_json(const SessionState& s) {
  json transcript = json::array();
  for (const auto& t : s.transcript) transcript.push_back(to_json(t));
  return {{"session_id", s.session_id},
          {"profile", to_json(s.profile)},
          {"condition", {{"kind", to_string(s.condition.kind)}, {"variant", to_string(s.condition.variant)}}},
          {"scenario", to_json(s.scenario)},
          {"support", s.support},
          {"fuzzy_state", fuzzy_state_json(s)},
          {"facts",
           {{"consecutive_correct", s.facts.consecutive_correct},
            {"consecutive_confused", s.facts.consecutive_confused},
            {"turns_at_support", s.facts.turns_at_support}}},
          {"closed", s.closed},
          {"transcript", transcript}};
}

}  // namespace scaffold
