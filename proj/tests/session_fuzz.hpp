#pragma once

// Randomized sessions against the mock tutor. Shared by the unit and
// acceptance suites.

#include <cmath>
#include <string>
#include <vector>

#include "scaffold/session.hpp"

namespace scaffold::test_support {

struct FuzzStats {
  int sessions = 0;
  int tutor_turns = 0;
  int interrogative = 0;
  int max_ladder_step = 0;
  int score_out_of_range = 0;
  std::string first_problem;
};

inline const std::vector<std::string>& fuzz_utterances() {
  static const std::vector<std::string> pool = {
      "I'm not sure",       "I don't know what to do.", "maybe it is 12",     "I think so",
      "got it",             "that makes sense",         "too easy",           "challenge me please",
      "no idea",            "It is 42.",                "kind of",            "I know this one",
      "sort of, I guess",   "something harder?",        "I'm confused!",      "Is the answer seven",
      "ok",                 "What?",                    "i dont understand",  "Because the light is used."};
  return pool;
}

inline std::string random_utterance(Rng& rng) {
  const auto& pool = fuzz_utterances();
  std::string u = pool[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pool.size()) - 1))];
  if (rng.bernoulli(0.3)) u += " " + pool[static_cast<std::size_t>(rng.uniform_int(0, 19))];
  if (rng.bernoulli(0.1)) u = std::string(static_cast<std::size_t>(rng.uniform_int(1, 30)), 'x');
  return u;
}

inline int ladder_rank(const ScaffoldingRecipe& recipe, const std::string& support) {
  const auto ladder = recipe.support_ladder();
  for (std::size_t i = 0; i < ladder.size(); ++i)
    if (ladder[i] == support) return static_cast<int>(i);
  return -100;
}

inline FuzzStats fuzz_sessions(int sessions, std::uint64_t seed) {
  static const char* conditions[] = {"scaffolded/full", "scaffolded/prompt_only", "scaffolded/scaffold_only",
                                     "flat", "cot", "few_shot"};
  FuzzStats st;
  Rng rng(seed);
  SessionContext ctx;
  ctx.recipe = std::make_shared<const ScaffoldingRecipe>(default_recipe());
  ctx.clock = [] { return std::string("2000-01-01T00:00:00.000Z"); };
  const auto& recipe = *ctx.recipe;
  std::vector<std::string> task_types;
  for (const auto& [id, def] : recipe.task_types) task_types.push_back(id);
  const auto bands = recipe.band_ids();

  for (int s = 0; s < sessions; ++s) {
    ctx.provider = std::make_shared<MockProvider>(MockPersona::tutor, rng.next());
    Scenario sc;
    sc.scenario_id = "fuzz-" + std::to_string(s);
    sc.subject = rng.bernoulli(0.5) ? "math" : "science";
    sc.grade = rng.bernoulli(0.5) ? 6 : 8;
    sc.band = bands[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(bands.size()) - 1))];
    sc.task_type =
        task_types[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(task_types.size()) - 1))];
    sc.task_text = "Solve the task.";
    const auto condition = parse_condition(conditions[rng.uniform_int(0, 5)]);
    auto state = start_session(sc.profile(), condition, sc, ctx);
    ++st.sessions;
    const int turns = static_cast<int>(rng.uniform_int(1, 8));
    for (int t = 0; t < turns; ++t) {
      std::optional<bool> correctness;
      const auto pick = rng.uniform_int(0, 2);
      if (pick == 1) correctness = true;
      if (pick == 2) correctness = false;
      const auto before = state.support;
      auto r = next_turn(state, random_utterance(rng), correctness, ctx);
      state = std::move(r.state);
      ++st.tutor_turns;
      if (ends_interrogative(r.tutor.text)) {
        ++st.interrogative;
      } else if (st.first_problem.empty()) {
        st.first_problem = "not interrogative: " + r.tutor.text;
      }
      const int step = std::abs(ladder_rank(recipe, state.support) - ladder_rank(recipe, before));
      if (step > st.max_ladder_step) {
        st.max_ladder_step = step;
        if (step > 1 && st.first_problem.empty()) st.first_problem = "ladder jump " + before + " -> " + state.support;
      }
      const double score = state.estimate.score;
      if (!(score >= 0.0 && score <= 1.0)) {
        ++st.score_out_of_range;
        if (st.first_problem.empty()) st.first_problem = "score out of range: " + std::to_string(score);
      }
    }
  }
  return st;
}

}  // namespace scaffold::test_support
