#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "scaffold/assets.hpp"
#include "scaffold/csv.hpp"
#include "scaffold/evaluation.hpp"
#include "scaffold/gateway.hpp"
#include "scaffold/prompt.hpp"
#include "scaffold/recipe.hpp"
#include "scaffold/scenario.hpp"
#include "scaffold/session.hpp"

namespace scaffold {

using nlohmann::json;

inline constexpr std::string_view kToolVersion = "1.0.0";

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ModelSpec {
  std::string model_id;
  ProviderConfig provider;
};

struct RunConfig {
  std::vector<ModelSpec> models;
  std::vector<PromptCondition> conditions;
  std::optional<std::filesystem::path> scenario_path;
  ScenarioSetSpec scenario_spec;
  bool augment_scenarios = false;
  int turns = 3;
  ModelSpec judge{"mock-judge", {}};
  std::optional<std::uint64_t> seed;
  std::string seed_source = "config";
  std::filesystem::path out_dir = "run";
  int parallelism = 4;
  GenerationParams params;
  std::optional<std::filesystem::path> recipe_path;
  std::optional<int> request_limit;
};

inline std::vector<PromptCondition> default_conditions() {
  return {parse_condition("scaffolded/full"), parse_condition("flat"), parse_condition("cot"),
          parse_condition("few_shot")};
}

inline std::vector<PromptCondition> ablation_conditions() {
  return {parse_condition("scaffolded/full"), parse_condition("scaffolded/prompt_only"),
          parse_condition("scaffolded/scaffold_only")};
}

// Relative paths inside the config resolve against the config's directory.
inline RunConfig run_config_from_json(const json& j, const std::filesystem::path& base_dir = ".") {
  RunConfig c;
  try {
    for (const auto& m : j.at("models")) c.models.push_back({m.at("model_id").get<std::string>(),
                                                             provider_config_from_json(m.value("provider", json::object()))});
    if (j.contains("conditions")) {
      for (const auto& s : j["conditions"]) c.conditions.push_back(parse_condition(s.get<std::string>()));
    } else {
      c.conditions = default_conditions();
    }
    if (j.contains("scenario_set")) {
      const auto& s = j["scenario_set"];
      if (s.contains("path")) c.scenario_path = base_dir / s["path"].get<std::string>();
      if (s.contains("spec")) c.scenario_spec = scenario_spec_from_json(s["spec"]);
      c.augment_scenarios = s.value("augment", false);
    }
    c.turns = j.value("turns", 3);
    if (j.contains("judge")) {
      const auto& jd = j["judge"];
      c.judge = {jd.value("model_id", "mock-judge"), provider_config_from_json(jd.value("provider", json::object()))};
    }
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
    c.parallelism = j.value("parallelism", 4);
    if (j.contains("params")) c.params = generation_params_from_json(j["params"]);
    if (j.contains("recipe")) c.recipe_path = base_dir / j["recipe"].get<std::string>();
    if (j.contains("request_limit")) c.request_limit = j["request_limit"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const GatewayError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const UnknownCondition& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.models.empty()) throw ConfigError("config: models must be non-empty");
  if (c.conditions.empty()) throw ConfigError("config: conditions must be non-empty");
  if (c.turns < 1) throw ConfigError("config: turns must be >= 1");
  if (c.parallelism < 1) throw ConfigError("config: parallelism must be >= 1");
  return c;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

// Swaps every provider for the deterministic mock.
inline void force_mock(RunConfig& c) {
  for (auto& m : c.models) m.provider = ProviderConfig{};
  c.judge.provider = ProviderConfig{};
}

// ---------------------------------------------------------------------------
// Scripted learner
// ---------------------------------------------------------------------------
inline double correctness_probability(const std::string& band) {
  if (band == "emerging") return 0.3;
  if (band == "developing") return 0.5;
  if (band == "proficient") return 0.7;
  return 0.85;
}

// Turn 1 is a band-conditioned confusion or attempt; later turns sample
// correctness from the band's probability.
inline std::vector<ScriptStep> scripted_learner(const Scenario& s, int turns, std::uint64_t run_seed) {
  Rng rng(derive_seed(run_seed, "learner:" + s.scenario_id));
  std::vector<ScriptStep> out;
  if (s.band == "emerging") {
    out.push_back({"I'm not sure how to start this one.", std::nullopt});
  } else if (s.band == "developing") {
    out.push_back({"I think it has something to do with the numbers, maybe?", std::nullopt});
  } else if (s.band == "proficient") {
    const bool ok = rng.bernoulli(correctness_probability(s.band));
    out.push_back({"Here is my answer. I worked it out step by step.", ok});
  } else {
    const bool ok = rng.bernoulli(correctness_probability(s.band));
    out.push_back({"I know this one. My answer is below, with my reasons.", ok});
  }
  for (int t = 1; t < turns; ++t) {
    const bool ok = rng.bernoulli(correctness_probability(s.band));
    out.push_back({ok ? "Okay, I tried it again and wrote my answer." : "I tried again but got a different answer.",
                   ok});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Records
// ---------------------------------------------------------------------------
struct TurnRecord {
  std::string run_id;
  std::string model;
  std::string condition;
  std::string variant;
  std::string scenario_id;
  std::string subject;
  int grade = 0;
  std::string band;
  int turn_index = 0;
  std::string prompt_hash;
  std::string tutor_text;
  double fk_grade = 0.0;
  std::string support_at_turn;
  std::string follow_up;
  double latency_ms = 0.0;
  std::string timestamp;
};

struct ScoreRecord {
  std::string run_id;
  std::string model;
  std::string condition;
  std::string variant;
  std::string scenario_id;
  int grade_appropriateness = 0;
  int scaffolding_quality = 0;
  int adaptivity = 0;
  std::string judge_model;
  std::string judge_template_version;
};

struct FailureRecord {
  std::string model;
  std::string condition;
  std::string variant;
  std::string scenario_id;
  std::string stage;  // session | judge
  std::string error;
};

inline const std::vector<std::string>& turn_columns() {
  static const std::vector<std::string> cols = {
      "run_id",      "model",      "condition", "variant",    "scenario_id",     "subject",
      "grade",       "band",       "turn_index", "prompt_hash", "tutor_text",     "fk_grade",
      "support_at_turn", "follow_up", "latency_ms", "timestamp"};
  return cols;
}

inline const std::vector<std::string>& score_columns() {
  static const std::vector<std::string> cols = {"run_id",
                                                "model",
                                                "condition",
                                                "variant",
                                                "scenario_id",
                                                "grade_appropriateness",
                                                "scaffolding_quality",
                                                "adaptivity",
                                                "judge_model",
                                                "judge_template_version"};
  return cols;
}

inline const std::vector<std::string>& failure_columns() {
  static const std::vector<std::string> cols = {"model", "condition", "variant", "scenario_id", "stage", "error"};
  return cols;
}

inline std::string condition_label(const std::string& condition, const std::string& variant) {
  if (condition != "scaffolded") return condition;
  return variant.empty() || variant == "full" ? "recipe" : variant;
}

inline void sort_rows(std::vector<TurnRecord>& rows) {
  std::sort(rows.begin(), rows.end(), [](const TurnRecord& a, const TurnRecord& b) {
    return std::tie(a.model, a.condition, a.variant, a.scenario_id, a.turn_index) <
           std::tie(b.model, b.condition, b.variant, b.scenario_id, b.turn_index);
  });
}

inline void sort_rows(std::vector<ScoreRecord>& rows) {
  std::sort(rows.begin(), rows.end(), [](const ScoreRecord& a, const ScoreRecord& b) {
    return std::tie(a.model, a.condition, a.variant, a.scenario_id) <
           std::tie(b.model, b.condition, b.variant, b.scenario_id);
  });
}

inline std::string turns_csv(const std::vector<TurnRecord>& rows) {
  using namespace csv;
  std::string out = encode_header(turn_columns());
  for (const auto& r : rows) {
    out += encode_row({text(r.run_id), text(r.model), text(r.condition), text(r.variant), text(r.scenario_id),
                       text(r.subject), integer(r.grade), text(r.band), integer(r.turn_index), text(r.prompt_hash),
                       text(r.tutor_text), number(r.fk_grade), text(r.support_at_turn), text(r.follow_up),
                       number(r.latency_ms), text(r.timestamp)});
  }
  return out;
}

inline std::string scores_csv(const std::vector<ScoreRecord>& rows) {
  using namespace csv;
  std::string out = encode_header(score_columns());
  for (const auto& r : rows) {
    out += encode_row({text(r.run_id), text(r.model), text(r.condition), text(r.variant), text(r.scenario_id),
                       integer(r.grade_appropriateness), integer(r.scaffolding_quality), integer(r.adaptivity),
                       text(r.judge_model), text(r.judge_template_version)});
  }
  return out;
}

inline std::string failures_csv(const std::vector<FailureRecord>& rows) {
  using namespace csv;
  std::string out = encode_header(failure_columns());
  for (const auto& r : rows) {
    out += encode_row({text(r.model), text(r.condition), text(r.variant), text(r.scenario_id), text(r.stage),
                       text(r.error)});
  }
  return out;
}

namespace detail {
inline int to_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw csv::CsvError(std::string("bad integer in column ") + what + ": '" + s + "'");
  }
}
inline double to_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw csv::CsvError(std::string("bad number in column ") + what + ": '" + s + "'");
  }
}
}  // namespace detail

inline std::vector<TurnRecord> parse_turns_csv(const csv::Table& table) {
  if (table.empty()) throw csv::CsvError("turns.csv is empty");
  const auto& h = table.front();
  auto col = [&](const char* n) { return csv::column(h, n); };
  const std::size_t c_run = col("run_id"), c_model = col("model"), c_cond = col("condition"), c_var = col("variant"),
                    c_sid = col("scenario_id"), c_subj = col("subject"), c_grade = col("grade"), c_band = col("band"),
                    c_turn = col("turn_index"), c_hash = col("prompt_hash"), c_text = col("tutor_text"),
                    c_fk = col("fk_grade"), c_sup = col("support_at_turn"), c_fu = col("follow_up"),
                    c_lat = col("latency_ms"), c_ts = col("timestamp");
  std::vector<TurnRecord> out;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& r = table[i];
    if (r.size() != h.size()) throw csv::CsvError("turns.csv row " + std::to_string(i) + " has wrong field count");
    TurnRecord t;
    t.run_id = r[c_run];
    t.model = r[c_model];
    t.condition = r[c_cond];
    t.variant = r[c_var];
    t.scenario_id = r[c_sid];
    t.subject = r[c_subj];
    t.grade = detail::to_int(r[c_grade], "grade");
    t.band = r[c_band];
    t.turn_index = detail::to_int(r[c_turn], "turn_index");
    t.prompt_hash = r[c_hash];
    t.tutor_text = r[c_text];
    t.fk_grade = detail::to_double(r[c_fk], "fk_grade");
    t.support_at_turn = r[c_sup];
    t.follow_up = r[c_fu];
    t.latency_ms = detail::to_double(r[c_lat], "latency_ms");
    t.timestamp = r[c_ts];
    out.push_back(std::move(t));
  }
  return out;
}

inline std::vector<ScoreRecord> parse_scores_csv(const csv::Table& table) {
  if (table.empty()) throw csv::CsvError("scores.csv is empty");
  const auto& h = table.front();
  auto col = [&](const char* n) { return csv::column(h, n); };
  const std::size_t c_run = col("run_id"), c_model = col("model"), c_cond = col("condition"), c_var = col("variant"),
                    c_sid = col("scenario_id"), c_g = col("grade_appropriateness"), c_s = col("scaffolding_quality"),
                    c_a = col("adaptivity"), c_jm = col("judge_model"), c_jv = col("judge_template_version");
  std::vector<ScoreRecord> out;
  for (std::size_t i = 1; i < table.size(); ++i) {
    const auto& r = table[i];
    if (r.size() != h.size()) throw csv::CsvError("scores.csv row " + std::to_string(i) + " has wrong field count");
    ScoreRecord s;
    s.run_id = r[c_run];
    s.model = r[c_model];
    s.condition = r[c_cond];
    s.variant = r[c_var];
    s.scenario_id = r[c_sid];
    s.grade_appropriateness = detail::to_int(r[c_g], "grade_appropriateness");
    s.scaffolding_quality = detail::to_int(r[c_s], "scaffolding_quality");
    s.adaptivity = detail::to_int(r[c_a], "adaptivity");
    s.judge_model = r[c_jm];
    s.judge_template_version = r[c_jv];
    for (int v : {s.grade_appropriateness, s.scaffolding_quality, s.adaptivity}) {
      if (v < 1 || v > 5) throw csv::CsvError("scores.csv row " + std::to_string(i) + " has a score outside [1,5]");
    }
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------
struct RunArtifacts {
  std::string run_id;
  std::uint64_t seed = 0;
  std::vector<TurnRecord> turns;
  std::vector<ScoreRecord> scores;
  std::vector<FailureRecord> failures;
  std::vector<Scenario> scenarios;
  json manifest;
};

inline std::string make_run_id(const RunConfig& c, std::uint64_t seed, const std::string& kind) {
  Fnv1a h;
  h.field(kind).add_u64(seed).add_u64(static_cast<std::uint64_t>(c.turns));
  for (const auto& m : c.models) h.field(m.model_id).field(to_json(m.provider).dump());
  for (const auto& cond : c.conditions) h.field(cond.id());
  h.field(c.judge.model_id).field(to_json(c.params).dump());
  return "run-" + to_hex(h.value()).substr(0, 12);
}

inline std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

namespace detail {

struct CellResult {
  std::vector<TurnRecord> turns;
  std::optional<ScoreRecord> score;
  std::optional<FailureRecord> failure;
};

}  // namespace detail

inline std::shared_ptr<const ScaffoldingRecipe> load_recipe_or_default(const std::optional<std::filesystem::path>& p) {
  if (!p) return std::make_shared<const ScaffoldingRecipe>(default_recipe());
  std::ifstream in(*p, std::ios::binary);
  if (!in) throw IoError("cannot read recipe " + p->string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto r = parse_recipe(ss.str());
  auto report = validate_recipe(r);
  if (!report.ok()) throw RecipeInvalid(std::move(report));
  return std::make_shared<const ScaffoldingRecipe>(std::move(r));
}

// Runs every model x condition x scenario cell. Cell failures are recorded and
// the run continues; only configuration problems abort.
inline RunArtifacts run_experiment(const RunConfig& config, const std::string& kind = "experiment") {
  RunArtifacts art;
  art.seed = config.seed.value_or(entropy_seed());
  const std::string seed_source = config.seed ? config.seed_source : "entropy";
  art.run_id = make_run_id(config, art.seed, kind);
  if (config.request_limit) RequestLimiter::global().set_limit(*config.request_limit);

  auto recipe = load_recipe_or_default(config.recipe_path);
  if (config.scenario_path) {
    art.scenarios = load_set(*config.scenario_path);
  } else {
    art.scenarios = generate_set(config.scenario_spec, *recipe);
  }

  std::map<std::string, std::shared_ptr<Provider>> tutors;
  for (const auto& m : config.models) {
    if (tutors.count(m.model_id)) throw ConfigError("duplicate model_id '" + m.model_id + "'");
    tutors[m.model_id] = make_provider(m.provider, MockPersona::tutor, derive_seed(art.seed, "model:" + m.model_id));
  }
  auto judge = make_provider(config.judge.provider, MockPersona::judge, derive_seed(art.seed, "judge"));

  if (config.augment_scenarios) {
    auto writer = make_provider(config.judge.provider, MockPersona::task_writer, derive_seed(art.seed, "task-writer"));
    art.scenarios = augment_with_llm(std::move(art.scenarios), *writer, config.judge.model_id);
  }

  struct Cell {
    const ModelSpec* model;
    PromptCondition condition;
    const Scenario* scenario;
  };
  std::vector<Cell> cells;
  for (const auto& m : config.models)
    for (const auto& c : config.conditions)
      for (const auto& s : art.scenarios) cells.push_back({&m, c, &s});

  std::vector<detail::CellResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const auto& cell = cells[i];
      auto& out = results[i];
      const auto& sc = *cell.scenario;
      SessionContext ctx;
      ctx.recipe = recipe;
      ctx.provider = tutors.at(cell.model->model_id);
      ctx.model_id = cell.model->model_id;
      ctx.params = config.params;
      FailureRecord fail{cell.model->model_id, to_string(cell.condition.kind), cell.condition.variant_column(),
                         sc.scenario_id, "session", ""};
      SessionState state;
      try {
        state = start_session(sc.profile(), cell.condition, sc, ctx);
        state = run_scripted_session(state, scripted_learner(sc, config.turns, art.seed), ctx);
      } catch (const std::exception& e) {
        fail.error = e.what();
        out.failure = fail;
        continue;
      }
      int exchange = 0;
      for (const auto& t : state.transcript) {
        if (t.role != "tutor") continue;
        TurnRecord r;
        r.run_id = art.run_id;
        r.model = cell.model->model_id;
        r.condition = to_string(cell.condition.kind);
        r.variant = cell.condition.variant_column();
        r.scenario_id = sc.scenario_id;
        r.subject = sc.subject;
        r.grade = sc.grade;
        r.band = sc.band;
        r.turn_index = ++exchange;
        r.prompt_hash = to_hex(t.prompt_hash);
        r.tutor_text = t.text;
        r.fk_grade = t.fk_grade.value_or(0.0);
        r.support_at_turn = t.support.value_or("");
        r.follow_up = t.follow_up ? to_string(*t.follow_up) : "";
        r.latency_ms = t.latency_ms;
        r.timestamp = t.timestamp;
        out.turns.push_back(std::move(r));
      }
      try {
        const auto compiled = compile(cell.condition, *recipe, state.profile, sc);
        const auto verdict = grade_response(state.transcript, state.profile, cell.condition,
                                            compiled.system_message(), *judge, config.judge.model_id);
        out.score = ScoreRecord{art.run_id,
                                cell.model->model_id,
                                to_string(cell.condition.kind),
                                cell.condition.variant_column(),
                                sc.scenario_id,
                                verdict.grade_appropriateness,
                                verdict.scaffolding_quality,
                                verdict.adaptivity,
                                config.judge.model_id,
                                std::string(kJudgeTemplateVersion)};
      } catch (const std::exception& e) {
        fail.stage = "judge";
        fail.error = e.what();
        out.failure = fail;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(config.parallelism, static_cast<int>(cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (auto& r : results) {
    for (auto& t : r.turns) art.turns.push_back(std::move(t));
    if (r.score) art.scores.push_back(std::move(*r.score));
    if (r.failure) art.failures.push_back(std::move(*r.failure));
  }
  sort_rows(art.turns);
  sort_rows(art.scores);
  std::sort(art.failures.begin(), art.failures.end(), [](const FailureRecord& a, const FailureRecord& b) {
    return std::tie(a.model, a.condition, a.variant, a.scenario_id) <
           std::tie(b.model, b.condition, b.variant, b.scenario_id);
  });

  // Manifest: everything needed to trace a row back to its inputs.
  json models = json::array();
  for (const auto& m : config.models) models.push_back({{"model_id", m.model_id}, {"provider", to_json(m.provider)}});
  json conditions = json::array();
  for (const auto& c : config.conditions) conditions.push_back(c.id());
  json failures = json::array();
  for (const auto& f : art.failures)
    failures.push_back({{"model", f.model},
                        {"condition", f.condition},
                        {"variant", f.variant},
                        {"scenario_id", f.scenario_id},
                        {"stage", f.stage},
                        {"error", f.error}});
  const auto expected_cells = cells.size();
  art.manifest = {
      {"run_id", art.run_id},
      {"kind", kind},
      {"tool_version", kToolVersion},
      {"created_at", utc_now_iso8601()},
      {"seed", art.seed},
      {"seed_source", seed_source},
      {"models", models},
      {"conditions", conditions},
      {"turns", config.turns},
      {"turn_convention",
       "each turn is one learner/tutor exchange; the seeded scenario task is turn 0 and not counted"},
      {"generation_params", to_json(config.params)},
      {"judge",
       {{"model_id", config.judge.model_id},
        {"provider", to_json(config.judge.provider)},
        {"template_version", kJudgeTemplateVersion},
        {"template_hash", to_hex(fnv1a(assets::kJudgePromptV1))},
        {"temperature", 0.0},
        {"max_tokens", 300},
        {"reasks", kJudgeReasks}}},
      {"recipe",
       {{"source", config.recipe_path ? config.recipe_path->string() : std::string("default")},
        {"version", recipe->version},
        {"hash", to_hex(fnv1a(serialize_recipe(*recipe)))}}},
      {"scenarios",
       {{"source", config.scenario_path ? config.scenario_path->string() : std::string("generated")},
        {"spec", to_json(config.scenario_spec)},
        {"template_bank_version", default_template_bank().version},
        {"template_bank_hash", to_hex(fnv1a(assets::kScenarioTemplates))},
        {"augmented", config.augment_scenarios},
        {"count", art.scenarios.size()}}},
      {"exemplar_bank_hash", to_hex(fnv1a(assets::kExemplarBank))},
      {"learner_script",
       {{"correctness_probability",
         {{"emerging", 0.3}, {"developing", 0.5}, {"proficient", 0.7}, {"advanced", 0.85}}}}},
      {"parallelism", config.parallelism},
      {"counts",
       {{"cells", expected_cells},
        {"expected_turn_rows", expected_cells * static_cast<std::size_t>(config.turns)},
        {"expected_score_rows", expected_cells},
        {"turn_rows", art.turns.size()},
        {"score_rows", art.scores.size()},
        {"failures", art.failures.size()}}},
      {"failures", failures}};
  return art;
}

inline RunArtifacts run_ablation(RunConfig config) {
  config.conditions = ablation_conditions();
  return run_experiment(config, "ablation");
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

inline void write_run_artifacts(const RunArtifacts& art, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / "turns.csv", turns_csv(art.turns));
  write_text_file(out_dir / "scores.csv", scores_csv(art.scores));
  write_text_file(out_dir / "failures.csv", failures_csv(art.failures));
  write_text_file(out_dir / "scenarios.jsonl", [&] {
    std::string s;
    for (const auto& sc : art.scenarios) s += to_json(sc).dump() + "\n";
    return s;
  }());
  write_text_file(out_dir / "manifest.json", art.manifest.dump(2) + "\n");
}

}  // namespace scaffold
