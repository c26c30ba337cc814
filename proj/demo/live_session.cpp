// Walks one emerging grade-6 learner through a short scripted session with
// the mock tutor and prints the controller state after each exchange.

#include <algorithm>
#include <iostream>

#include "scaffold/session.hpp"

using namespace scaffold;

int main() {
  SessionContext ctx;
  ctx.recipe = std::make_shared<const ScaffoldingRecipe>(default_recipe());
  ctx.provider = std::make_shared<MockProvider>(MockPersona::tutor, 7);

  ScenarioSetSpec spec;
  const auto scenarios = generate_set(spec, *ctx.recipe);
  const auto& sc = *std::find_if(scenarios.begin(), scenarios.end(),
                                 [](const Scenario& s) { return s.band == "emerging" && s.grade == 6; });

  auto state = start_session(sc.profile(), parse_condition("scaffolded/full"), sc, ctx);
  std::cout << "task: " << sc.task_text << "\n";
  std::cout << "start: support=" << state.support << " score=" << state.estimate.score << "\n\n";

  const std::vector<ScriptStep> script = {
      {"I'm not sure how to start.", std::nullopt},
      {"Is it this answer?", true},
      {"I tried the next one too.", true},
      {"Got it, that makes sense.", true},
  };
  for (const auto& step : script) {
    auto r = next_turn(state, step.utterance, step.correctness, ctx);
    state = std::move(r.state);
    std::cout << "learner: " << step.utterance << "\n";
    std::cout << "tutor:   " << r.tutor.text << "\n";
    std::cout << "state:   " << fuzzy_state_json(state).dump() << "\n\n";
  }
}
