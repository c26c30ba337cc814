#include <gtest/gtest.h>

#include <json.hpp>

#include "defect_corpus.hpp"
#include "scaffold/common.hpp"
#include "scaffold/fuzzy.hpp"
#include "scaffold/recipe.hpp"
#include "test_util.hpp"

using namespace scaffold;
using nlohmann::json;

namespace {

// The two schema fragments from the design write-up, with the remaining bands
// filled in by name only.
const char* kFragmentDocument = R"({
  "knowledge_levels": {
    "emerging": {
      "description": "Low prior knowledge. Triggered by phrases like 'I'm not sure'."
    },
    "developing": { "description": "Some prior knowledge." },
    "proficient": { "description": "Good prior knowledge." },
    "advanced": { "description": "Strong prior knowledge." }
  },
  "scaffolding_types": {
    "high": {
      "description": "Break down tasks, provide guided examples."
    }
  }
})";

}  // namespace

TEST(DefaultRecipe, HasCanonicalContent) {
  const auto r = default_recipe();
  EXPECT_EQ(r.knowledge_levels.size(), 4u);
  const auto& tactics = r.scaffolding_types.at("high").tactics;
  EXPECT_NE(std::find(tactics.begin(), tactics.end(), "task-breakdown"), tactics.end());
  for (const char* t : {"recall", "comprehension", "computation", "reasoning"}) EXPECT_TRUE(r.task_types.count(t)) << t;
  EXPECT_EQ(r.knowledge_levels.at("emerging").membership, (MembershipShape{0, 0, 0.20, 0.35}));
  EXPECT_EQ(r.knowledge_levels.at("developing").membership, (MembershipShape{0.20, 0.35, 0.50, 0.65}));
  EXPECT_EQ(r.knowledge_levels.at("proficient").membership, (MembershipShape{0.50, 0.65, 0.80, 0.90}));
  EXPECT_EQ(r.knowledge_levels.at("advanced").membership, (MembershipShape{0.80, 0.90, 1, 1}));
  EXPECT_EQ(r.readability_targets.at(6).fk_min, 5.0);
  EXPECT_EQ(r.readability_targets.at(6).fk_max, 7.0);
  EXPECT_EQ(r.readability_targets.at(8).fk_min, 7.0);
  EXPECT_EQ(r.readability_targets.at(8).fk_max, 9.0);
  EXPECT_EQ(r.support_ladder(), (std::vector<std::string>{"low", "medium", "high"}));
}

TEST(DefaultRecipe, ValidatesCleanly) {
  const auto rep = validate_recipe(default_recipe());
  EXPECT_TRUE(rep.errors.empty());
  EXPECT_TRUE(rep.warnings.empty());
}

TEST(DefaultRecipe, ShippedDataFileMatches) {
  const auto shipped = test_support::read_file(test_support::source_path("data/default_recipe.json"));
  EXPECT_EQ(shipped, serialize_recipe_pretty(default_recipe()));
}

TEST(ParseRecipe, FragmentCompletesToValidRecipe) {
  const auto r = parse_recipe(kFragmentDocument);
  EXPECT_TRUE(validate_recipe(r).ok());
  EXPECT_EQ(r.knowledge_levels.at("emerging").description,
            "Low prior knowledge. Triggered by phrases like 'I'm not sure'.");
  EXPECT_FALSE(r.knowledge_levels.at("emerging").trigger_phrases.empty());
  EXPECT_EQ(r.knowledge_levels.at("emerging").default_support, "high");
  EXPECT_EQ(r.scaffolding_types.at("high").description, "Break down tasks, provide guided examples.");
  EXPECT_TRUE(r.scaffolding_types.count("medium"));
  EXPECT_TRUE(r.scaffolding_types.count("low"));
}

TEST(ParseRecipe, EmptyDocumentNamesKnowledgeLevels) {
  try {
    parse_recipe("{}");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.path(), "/knowledge_levels");
    EXPECT_NE(std::string(e.what()).find("knowledge_levels"), std::string::npos);
  }
}

TEST(ParseRecipe, UnorderedBreakpointsRaiseConstraintError) {
  json doc = to_json(default_recipe());
  doc["knowledge_levels"]["emerging"]["membership"] = {0.5, 0.4, 0.6, 0.8};
  try {
    parse_recipe(doc.dump());
    FAIL() << "expected ConstraintError";
  } catch (const ConstraintError& e) {
    EXPECT_EQ(e.code(), "unordered_breakpoints");
    EXPECT_NE(std::string(e.what()).find("a<=b"), std::string::npos);
    EXPECT_EQ(e.path(), "/knowledge_levels/emerging/membership");
  }
}

TEST(ParseRecipe, MalformedTextIsSyntaxError) {
  EXPECT_THROW(parse_recipe("{"), SyntaxError);
  EXPECT_THROW(parse_recipe("[1, 2"), SyntaxError);
}

TEST(ParseRecipe, WrongTypesAreSchemaErrors) {
  json doc = to_json(default_recipe());
  doc["knowledge_levels"]["emerging"]["membership"] = "wide";
  EXPECT_THROW(parse_recipe(doc.dump()), SchemaError);
  doc = to_json(default_recipe());
  doc["adaptation_rules"][0]["action"] = "teleport";
  EXPECT_THROW(parse_recipe(doc.dump()), SchemaError);
  EXPECT_THROW(parse_recipe("[]"), SchemaError);
}

TEST(ParseRecipe, UnknownKeysAreWarnings) {
  json doc = to_json(default_recipe());
  doc["colour_scheme"] = "blue";
  doc["knowledge_levels"]["emerging"]["icon"] = "seedling";
  auto check = check_recipe_document(doc.dump());
  ASSERT_TRUE(check.recipe.has_value());
  EXPECT_TRUE(check.report.ok());
  ASSERT_EQ(check.report.warnings.size(), 2u);
  EXPECT_EQ(check.report.warnings[0].code, "unknown_key");
}

TEST(ParseRecipe, RoundTripOfDefaultIsExact) {
  const auto r = default_recipe();
  EXPECT_EQ(parse_recipe(serialize_recipe(r)), r);
  EXPECT_EQ(serialize_recipe(parse_recipe(serialize_recipe(r))), serialize_recipe(r));
}

// parse(serialize(r)) == r over randomly perturbed valid recipes.
TEST(ParseRecipe, RoundTripProperty) {
  Rng rng(17);
  for (int t = 0; t < 200; ++t) {
    auto r = default_recipe();
    for (auto& [id, band] : r.knowledge_levels) {
      double pts[4];
      for (double& p : pts) p = rng.uniform();
      std::sort(pts, pts + 4);
      band.membership = {pts[0], pts[1], pts[2], pts[3]};
      if (rng.bernoulli(0.5)) band.trigger_phrases.push_back("phrase " + std::to_string(rng.next() % 1000));
    }
    r.scaffolding_types["scaffold-" + std::to_string(t)] =
        SupportLevelDef{"extra", {"tactic-x"}, static_cast<int>(10 + t)};
    r.task_types["custom"] = TaskTypeDef{"custom", "custom task", {{"emerging", "go slow"}}, "fallback text"};
    r.readability_targets[7] = ReadabilityTarget{7, 5.5 + rng.uniform(), 8.25};
    AdaptationRule extra{"x" + std::to_string(t), {}, RuleAction::hold, 100 + t};
    extra.when.turns_at_support = static_cast<int>(rng.uniform_int(0, 5));
    r.adaptation_rules.push_back(extra);
    const auto text = serialize_recipe(r);
    const auto back = parse_recipe(text);
    EXPECT_EQ(back, r);
    EXPECT_EQ(serialize_recipe(back), text);
  }
}

// Every (task_type, band) pair of a valid recipe resolves to a strategy.
TEST(ValidateRecipe, ClosureOfStrategies) {
  auto r = default_recipe();
  r.task_types["recall"].strategies.erase("advanced");
  r.task_types["recall"].fallback = "Ask a follow-up question.";
  auto rep = validate_recipe(r);
  ASSERT_TRUE(rep.ok());
  for (const auto& [tid, t] : r.task_types) {
    for (const auto& band : r.band_ids()) {
      auto s = r.resolve_strategy(tid, band);
      ASSERT_TRUE(s.has_value());
      EXPECT_FALSE(s->empty());
    }
  }
}

TEST(ValidateRecipe, FiveBandsIsUnknownBand) {
  auto r = default_recipe();
  r.knowledge_levels["expert"] = KnowledgeBandDef{"x", {"wow"}, {0.9, 1, 1, 1}, "low"};
  auto rep = validate_recipe(r);
  EXPECT_TRUE(rep.has_error("unknown_band"));
  EXPECT_NE(rep.errors.front().message.find("unknown band"), std::string::npos);
}

TEST(ValidateRecipe, ScoreGapWarning) {
  auto r = default_recipe();
  r.knowledge_levels["advanced"].membership = {0.8, 0.9, 0.95, 0.97};
  auto rep = validate_recipe(r);
  EXPECT_TRUE(rep.ok());
  ASSERT_TRUE(rep.has_warning("score_gap"));
  // Brute-force the uncovered grid points independently of the validator.
  int first_gap = -1;
  for (int i = 0; i <= 1000; ++i) {
    bool covered = false;
    for (const auto& [id, b] : r.knowledge_levels) covered |= membership(i / 1000.0, b.membership) > 0.0;
    if (!covered) {
      first_gap = i;
      break;
    }
  }
  EXPECT_EQ(first_gap, 970);
  EXPECT_NE(rep.warnings.front().message.find("[0.970, 1.000]"), std::string::npos);
}

TEST(ValidateRecipe, MissingSupportOnProgrammaticRecipe) {
  auto r = default_recipe();
  r.scaffolding_types.erase("medium");
  r.knowledge_levels["developing"].default_support = "high";
  EXPECT_TRUE(validate_recipe(r).has_error("missing_support"));
}

TEST(ValidateRecipe, DefaultRulesAreAcyclic) {
  EXPECT_FALSE(detail::find_rule_cycle(default_recipe()).has_value());
}

TEST(DefectCorpus, EachDefectProducesItsFinding) {
  const auto corpus = test_support::defect_corpus();
  ASSERT_EQ(corpus.size(), 12u);
  for (const auto& c : corpus) {
    auto check = check_recipe_document(c.document);
    if (c.is_warning) {
      EXPECT_TRUE(check.report.ok()) << c.name;
      EXPECT_TRUE(check.report.has_warning(c.expected_code)) << c.name;
    } else {
      EXPECT_TRUE(check.report.has_error(c.expected_code)) << c.name;
    }
  }
}

// Every error path resolves to a location present in the input document.
TEST(DefectCorpus, ErrorPathsExistInInput) {
  for (const auto& c : test_support::defect_corpus()) {
    const auto doc = json::parse(c.document);
    auto check = check_recipe_document(c.document);
    for (const auto& f : check.report.errors) {
      EXPECT_TRUE(doc.contains(json::json_pointer(f.path))) << c.name << " " << f.path;
    }
  }
}
