#include <gtest/gtest.h>

#include <set>

#include "scaffold/assets.hpp"
#include "scaffold/prompt.hpp"
#include "test_util.hpp"

using namespace scaffold;

namespace {

const char* kBoundary =
    "You are a tutor that adapts to a student's grade, task, and knowledge level.\n"
    "\n"
    "Use `scaffolding_recipe.json` to:\n"
    "1. Match the task type.\n"
    "2. Apply a strategy based on knowledge level.\n"
    "3. Choose scaffolding support.\n"
    "4. Adjust vocabulary to grade level.\n"
    "5. Monitor learning using update rules.\n"
    "\n"
    "Always ask if the student understood before moving on.";

Scenario make_scenario(const std::string& subject = "math", int grade = 6, const std::string& band = "emerging") {
  Scenario s;
  s.scenario_id = subject + "-test";
  s.subject = subject;
  s.grade = grade;
  s.band = band;
  s.task_type = "computation";
  s.task_text = "What is 12 times 4? Show your work.";
  return s;
}

}  // namespace

TEST(Prompt, BoundaryIsVerbatim) {
  EXPECT_EQ(render_boundary("scaffolding_recipe.json"), kBoundary);
  EXPECT_EQ(render_boundary("scaffolding_recipe.json"), render_boundary("scaffolding_recipe.json"));
  const auto b = render_boundary("scaffolding_recipe.json");
  EXPECT_NE(b.find("Always ask if the student understood"), std::string::npos);
  const std::string last = "Always ask if the student understood before moving on.";
  EXPECT_EQ(b.substr(b.size() - last.size()), last);
}

TEST(Prompt, BaselinesAreExact) {
  const auto recipe = default_recipe();
  const auto sc = make_scenario();
  EXPECT_EQ(compile(parse_condition("flat"), recipe, sc.profile(), sc).system_text, "You are a helpful assistant.");
  EXPECT_EQ(compile(parse_condition("cot"), recipe, sc.profile(), sc).system_text,
            "You are a tutor. Think step by step");
  EXPECT_FALSE(compile(parse_condition("flat"), recipe, sc.profile(), sc).schema_payload);
  EXPECT_EQ(compile(parse_condition("flat"), recipe, sc.profile(), sc).system_message(),
            "You are a helpful assistant.");
}

TEST(Prompt, FullCarriesSchema) {
  const auto recipe = default_recipe();
  const auto sc = make_scenario();
  const auto p = compile(parse_condition("scaffolded/full"), recipe, sc.profile(), sc);
  ASSERT_TRUE(p.schema_payload);
  EXPECT_FALSE(p.schema_payload->empty());
  EXPECT_NE(p.schema_payload->find("knowledge_levels"), std::string::npos);
  EXPECT_EQ(*p.schema_payload, serialize_recipe(recipe));
  EXPECT_EQ(p.system_text.rfind(kBoundary, 0), 0u);
}

TEST(Prompt, AblationContainment) {
  const auto recipe = default_recipe();
  for (const std::string band : {"emerging", "advanced"}) {
    for (const std::string subject : {"math", "science"}) {
      const auto sc = make_scenario(subject, 8, band);
      const auto full = compile(parse_condition("scaffolded/full"), recipe, sc.profile(), sc).system_message();
      const auto po = compile(parse_condition("scaffolded/prompt_only"), recipe, sc.profile(), sc);
      const auto so = compile(parse_condition("scaffolded/scaffold_only"), recipe, sc.profile(), sc);
      EXPECT_FALSE(po.schema_payload);
      ASSERT_TRUE(so.schema_payload);
      EXPECT_EQ(so.system_text, kScaffoldOnlyPrefix);
      EXPECT_NE(full.find(po.system_message()), std::string::npos);
      EXPECT_NE(full.find(*so.schema_payload), std::string::npos);
      EXPECT_GT(full.size(), po.system_message().size());
      EXPECT_GT(full.size(), so.schema_payload->size());
    }
  }
}

TEST(Prompt, ReadabilityDirective) {
  const auto recipe = default_recipe();
  const auto g6 = readability_directive(6, recipe);
  EXPECT_NE(g6.find("between 5 and 7"), std::string::npos);
  EXPECT_NE(readability_directive(8, recipe).find("between 7 and 9"), std::string::npos);
  EXPECT_THROW(readability_directive(12, recipe), UnknownGrade);
  const auto sc = make_scenario("math", 12);
  EXPECT_THROW(compile(parse_condition("scaffolded/full"), recipe, sc.profile(), sc), UnknownGrade);
}

TEST(Prompt, HashIsPureAndSensitive) {
  const auto recipe = default_recipe();
  const auto sc = make_scenario();
  std::set<std::uint64_t> hashes;
  for (const char* c : {"scaffolded/full", "scaffolded/prompt_only", "scaffolded/scaffold_only", "flat", "cot",
                        "few_shot"}) {
    const auto a = compile(parse_condition(c), recipe, sc.profile(), sc);
    const auto b = compile(parse_condition(c), recipe, sc.profile(), sc);
    EXPECT_EQ(a.content_hash, b.content_hash) << c;
    EXPECT_EQ(a.system_message(), b.system_message()) << c;
    hashes.insert(a.content_hash);
  }
  EXPECT_EQ(hashes.size(), 6u);
  const auto other = make_scenario("math", 8);
  EXPECT_NE(compile(parse_condition("scaffolded/full"), recipe, sc.profile(), sc).content_hash,
            compile(parse_condition("scaffolded/full"), recipe, other.profile(), other).content_hash);
}

TEST(Prompt, FewShotSelection) {
  const auto recipe = default_recipe();
  const auto& bank = default_exemplar_bank();
  ASSERT_EQ(bank.size(), 8u);
  const auto sc = make_scenario("science", 6, "developing");
  const auto p = compile(parse_condition("few_shot"), recipe, sc.profile(), sc);
  ASSERT_EQ(p.exemplars.size(), 3u);
  const auto chosen = select_exemplars(bank, "science", "developing");
  ASSERT_EQ(chosen.size(), 3u);
  EXPECT_EQ(chosen[0].band, "developing");
  for (const auto& e : chosen) {
    EXPECT_EQ(e.subject, "science");
    EXPECT_LE(std::abs(band_index(e.band) - band_index("developing")), 1);
  }
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(p.exemplars[i].first, chosen[i].student);
  EXPECT_THROW(compile(parse_condition("few_shot"), recipe, sc.profile(), sc, {}), ExemplarBankEmpty);
}

TEST(Prompt, NoUtteranceLeaksIntoSystemText) {
  const auto recipe = default_recipe();
  auto sc = make_scenario();
  sc.task_text = "UNIQUE-TASK-TEXT-42";
  for (const char* c : {"scaffolded/full", "scaffolded/prompt_only", "scaffolded/scaffold_only", "flat", "cot",
                        "few_shot"}) {
    const auto p = compile(parse_condition(c), recipe, sc.profile(), sc);
    EXPECT_EQ(p.system_message().find("UNIQUE-TASK-TEXT-42"), std::string::npos) << c;
  }
}

TEST(Prompt, ConditionIdsRoundTrip) {
  for (const char* c : {"scaffolded/full", "scaffolded/prompt_only", "scaffolded/scaffold_only", "flat", "cot",
                        "few_shot"}) {
    EXPECT_EQ(parse_condition(c).id(), c);
    EXPECT_EQ(parse_condition(parse_condition(c).label()), parse_condition(c));
  }
  EXPECT_THROW(parse_condition("socratic"), UnknownCondition);
}

TEST(Prompt, EmbeddedAssetsMatchDataFiles) {
  using test_support::read_file;
  using test_support::source_path;
  EXPECT_EQ(assets::kExemplarBank, read_file(source_path("data/exemplars.jsonl")));
  EXPECT_EQ(assets::kScenarioTemplates, read_file(source_path("data/scenario_templates.json")));
  EXPECT_EQ(assets::kJudgePromptV1, read_file(source_path("data/judge_prompt_v1.txt")));
}
