#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scaffold/assets.hpp"
#include "scaffold/gateway.hpp"
#include "scaffold/readability.hpp"
#include "scaffold/session.hpp"

namespace scaffold {

using nlohmann::json;

class JudgeUnparseable : public Error {
 public:
  JudgeUnparseable(const std::string& msg, std::vector<std::string> replies)
      : Error(msg), replies_(std::move(replies)) {}
  const std::vector<std::string>& replies() const { return replies_; }

 private:
  std::vector<std::string> replies_;
};

inline constexpr std::string_view kJudgeTemplateVersion = "v1";
inline constexpr int kJudgeReasks = 2;

struct RubricScore {
  int grade_appropriateness = 0;
  int scaffolding_quality = 0;
  int adaptivity = 0;
  std::string judge_model;
  std::string raw_judge_text;
  std::string rationale;
};

struct VerdictParse {
  std::optional<RubricScore> score;
  std::string problem;
};

// Accepts a single JSON object, optionally wrapped in prose or a code fence.
// Scores must be integers in [1, 5]; anything else is rejected.
inline VerdictParse parse_verdict(const std::string& text) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string::npos || close == std::string::npos || close < open) return {std::nullopt, "no JSON object"};
  json j;
  try {
    j = json::parse(text.substr(open, close - open + 1));
  } catch (const json::parse_error&) {
    return {std::nullopt, "malformed JSON"};
  }
  if (!j.is_object()) return {std::nullopt, "verdict is not an object"};
  RubricScore s;
  const std::pair<const char*, int*> fields[] = {
      {"grade", &s.grade_appropriateness}, {"scaffolding", &s.scaffolding_quality}, {"adaptivity", &s.adaptivity}};
  for (const auto& [name, slot] : fields) {
    if (!j.contains(name)) return {std::nullopt, std::string("missing field '") + name + "'"};
    const auto& v = j[name];
    if (!v.is_number_integer()) return {std::nullopt, std::string("field '") + name + "' is not an integer"};
    const auto n = v.get<long long>();
    if (n < 1 || n > 5) return {std::nullopt, std::string("field '") + name + "' out of range: " + std::to_string(n)};
    *slot = static_cast<int>(n);
  }
  if (j.contains("rationale") && j["rationale"].is_string()) s.rationale = j["rationale"].get<std::string>();
  s.raw_judge_text = text;
  return {s, ""};
}

inline std::string render_transcript(const std::vector<Turn>& transcript) {
  std::string out;
  for (const auto& t : transcript) {
    const char* who = t.role == "tutor" ? "Tutor" : (t.role == "learner" ? "Student" : "Task");
    if (!out.empty()) out += "\n";
    out += std::string(who) + ": " + t.text;
  }
  return out;
}

inline std::string render_profile(const LearnerProfile& p, const PromptCondition& c) {
  return "Grade " + std::to_string(p.grade) + ", subject " + p.subject + ", knowledge level " + p.band +
         ". Prompting condition: " + c.id() + ".";
}

// The template wants the student profile, the tutor's prompt and the model's
// responses.
inline std::string build_judge_prompt(const LearnerProfile& profile, const PromptCondition& condition,
                                      const std::string& tutor_prompt, const std::vector<Turn>& transcript,
                                      std::string_view judge_template = assets::kJudgePromptV1) {
  std::string out(judge_template);
  out = replace_all(std::move(out), "{{profile}}", render_profile(profile, condition));
  out = replace_all(std::move(out), "{{prompt}}", tutor_prompt);
  out = replace_all(std::move(out), "{{transcript}}", render_transcript(transcript));
  return out;
}

inline RubricScore grade_response(const std::vector<Turn>& transcript, const LearnerProfile& profile,
                                  const PromptCondition& condition, const std::string& tutor_prompt,
                                  Provider& judge, const std::string& judge_model) {
  const bool has_tutor =
      std::any_of(transcript.begin(), transcript.end(), [](const Turn& t) { return t.role == "tutor"; });
  if (!has_tutor) throw Error("transcript has no tutor turns to grade");
  ChatRequest req;
  req.model_id = judge_model;
  req.params.temperature = 0.0;
  req.params.max_tokens = 300;
  req.messages = {{"system", "You are a strict grader. Answer only with the requested JSON object."},
                  {"user", build_judge_prompt(profile, condition, tutor_prompt, transcript)}};
  std::vector<std::string> replies;
  for (int attempt = 0; attempt <= kJudgeReasks; ++attempt) {
    const auto resp = judge.complete(req);
    replies.push_back(resp.content);
    auto parsed = parse_verdict(resp.content);
    if (parsed.score) {
      parsed.score->judge_model = judge_model;
      return *parsed.score;
    }
    req.messages.push_back({"assistant", resp.content.empty() ? std::string("(empty)") : resp.content});
    req.messages.push_back({"user", "That reply could not be used (" + parsed.problem +
                                        "). Reply with only the JSON object with integer fields grade, "
                                        "scaffolding and adaptivity between 1 and 5, and a rationale."});
  }
  throw JudgeUnparseable("judge reply unparseable after " + std::to_string(kJudgeReasks) + " re-asks", replies);
}

}  // namespace scaffold
