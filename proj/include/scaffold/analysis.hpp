#pragma once

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "scaffold/csv.hpp"
#include "scaffold/recipe.hpp"
#include "scaffold/runner.hpp"
#include "scaffold/stats/tests.hpp"

namespace scaffold {

class InsufficientData : public Error {
 public:
  using Error::Error;
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline const std::vector<std::string>& rubric_names() {
  static const std::vector<std::string> names = {"grade_appropriateness", "scaffolding_quality", "adaptivity"};
  return names;
}

inline int rubric_value(const ScoreRecord& s, const std::string& rubric) {
  if (rubric == "grade_appropriateness") return s.grade_appropriateness;
  if (rubric == "scaffolding_quality") return s.scaffolding_quality;
  return s.adaptivity;
}

struct GroupSummary {
  std::string label;
  std::size_t n = 0;
  double mean = kNaN;
  double sem = kNaN;
  std::optional<stats::TestResult> shapiro;
  std::string shapiro_note;
};

struct Comparison {
  std::string group_a;
  std::string group_b;
  double cohens_d = kNaN;
  double cliffs_delta = kNaN;
  double dunn_p = kNaN;
  std::string correction;
  std::string note;
};

// Table 1: independent conditions.
struct RubricAnalysis {
  std::string rubric;
  std::vector<GroupSummary> groups;
  stats::TestResult kruskal;
  double eta_squared_h = kNaN;
  std::optional<stats::TestResult> levene;
  std::string levene_note;
  std::vector<stats::PairwiseResult> dunn;
  std::vector<Comparison> comparisons;
};

// Table 2: paired variants.
struct AblationAnalysis {
  std::string rubric;
  std::vector<GroupSummary> groups;
  stats::TestResult friedman;
  std::vector<stats::PairwiseResult> dunn;
  std::vector<Comparison> comparisons;
  std::size_t blocks_complete = 0;
  std::size_t blocks_excluded = 0;
};

struct ReadabilityCell {
  std::string condition;
  int grade = 0;
  std::size_t n = 0;
  double fk_mean = kNaN;
  double target_min = kNaN;
  double target_max = kNaN;
  std::size_t in_range = 0;
  double rate = kNaN;
};

struct ProgressionCell {
  std::string condition;
  int turn_index = 0;
  std::string support;
  std::size_t n = 0;
  double fk_mean = kNaN;
};

struct StatReport {
  std::string run_id;
  stats::Correction correction = stats::Correction::holm;
  std::vector<RubricAnalysis> table1;
  std::vector<AblationAnalysis> table2;
  std::vector<ReadabilityCell> readability;
  std::vector<ProgressionCell> progression;
  std::vector<std::string> footnotes;

  bool empty() const { return table1.empty() && table2.empty(); }
};

namespace detail {

inline const std::vector<std::string>& table1_order() {
  static const std::vector<std::string> order = {"recipe", "flat", "cot", "few_shot"};
  return order;
}

inline const std::vector<std::string>& table2_order() {
  static const std::vector<std::string> order = {"full", "prompt_only", "scaffold_only"};
  return order;
}

inline GroupSummary summarize(const std::string& label, const std::vector<double>& v) {
  GroupSummary g;
  g.label = label;
  g.n = v.size();
  g.mean = stats::mean(v);
  g.sem = v.size() >= 2 ? stats::sem(v) : kNaN;
  try {
    g.shapiro = stats::shapiro_wilk(v);
  } catch (const stats::StatsError& e) {
    g.shapiro_note = e.what();
  }
  return g;
}

inline Comparison compare(const std::string& a_label, const std::vector<double>& a, const std::string& b_label,
                          const std::vector<double>& b, const std::vector<stats::PairwiseResult>& dunn,
                          stats::Correction correction) {
  Comparison c;
  c.group_a = a_label;
  c.group_b = b_label;
  c.correction = stats::to_string(correction);
  try {
    c.cohens_d = stats::cohens_d(a, b);
  } catch (const stats::StatsError& e) {
    c.note = e.what();
  }
  c.cliffs_delta = stats::cliffs_delta(a, b);
  for (const auto& p : dunn) {
    if ((p.label_i == a_label && p.label_j == b_label) || (p.label_i == b_label && p.label_j == a_label))
      c.dunn_p = p.p_adjusted;
  }
  return c;
}

inline void require_groups(const std::vector<stats::SampleGroup>& groups, const std::string& rubric,
                           const char* table) {
  for (const auto& g : groups) {
    if (g.values.size() < 2) {
      throw InsufficientData(std::string(table) + " cell " + g.label + "/" + rubric + " has n=" +
                             std::to_string(g.values.size()) + " (need at least 2)");
    }
  }
}

}  // namespace detail

// Groups scores by condition label. Table 1 covers recipe and the baselines,
// Table 2 the scaffolded variants over complete (model, scenario) blocks.
inline StatReport analyze(const std::vector<TurnRecord>& turns, const std::vector<ScoreRecord>& scores_in,
                          const ScaffoldingRecipe& recipe = default_recipe(),
                          stats::Correction correction = stats::Correction::holm) {
  StatReport rep;
  rep.correction = correction;
  auto scores = scores_in;
  sort_rows(scores);
  if (!scores.empty()) rep.run_id = scores.front().run_id;

  std::set<std::string> labels;
  for (const auto& s : scores) labels.insert(condition_label(s.condition, s.variant));
  if (labels.size() < 2) {
    throw InsufficientData("need at least 2 conditions with scores, found " + std::to_string(labels.size()));
  }

  std::vector<std::string> t1;
  for (const auto& l : detail::table1_order())
    if (labels.count(l)) t1.push_back(l);
  std::vector<std::string> t2;
  for (const auto& v : detail::table2_order())
    if (labels.count(v == "full" ? "recipe" : v)) t2.push_back(v);
  if (t1.size() < 2 && t2.size() < 2) {
    throw InsufficientData("no table has two comparable conditions");
  }

  if (t1.size() >= 2) {
    for (const auto& rubric : rubric_names()) {
      RubricAnalysis ra;
      ra.rubric = rubric;
      std::vector<stats::SampleGroup> groups;
      for (const auto& l : t1) {
        stats::SampleGroup g{l, {}};
        for (const auto& s : scores)
          if (condition_label(s.condition, s.variant) == l) g.values.push_back(rubric_value(s, rubric));
        groups.push_back(std::move(g));
      }
      detail::require_groups(groups, rubric, "table1");
      for (const auto& g : groups) ra.groups.push_back(detail::summarize(g.label, g.values));
      ra.kruskal = stats::kruskal_wallis(groups);
      std::size_t n = 0;
      for (const auto& g : groups) n += g.values.size();
      try {
        ra.eta_squared_h = stats::eta_squared_h(ra.kruskal.statistic, groups.size(), n);
      } catch (const stats::StatsError&) {
      }
      try {
        ra.levene = stats::levene(groups);
      } catch (const stats::StatsError& e) {
        ra.levene_note = e.what();
      }
      ra.dunn = stats::dunn_posthoc(groups, correction);
      // The first group (recipe when present) against each other condition.
      for (std::size_t i = 1; i < groups.size(); ++i) {
        ra.comparisons.push_back(detail::compare(groups[0].label, groups[0].values, groups[i].label,
                                                 groups[i].values, ra.dunn, correction));
      }
      rep.table1.push_back(std::move(ra));
    }
  }

  if (t2.size() >= 2) {
    // Blocks keyed by (model, scenario); a block is complete when every
    // variant scored.
    std::map<std::pair<std::string, std::string>, std::map<std::string, const ScoreRecord*>> blocks;
    for (const auto& s : scores) {
      if (s.condition != "scaffolded") continue;
      const std::string v = s.variant.empty() ? "full" : s.variant;
      if (std::find(t2.begin(), t2.end(), v) == t2.end()) continue;
      blocks[{s.model, s.scenario_id}][v] = &s;
    }
    std::vector<const std::map<std::string, const ScoreRecord*>*> complete;
    std::size_t excluded = 0;
    for (const auto& [key, b] : blocks) {
      if (b.size() == t2.size()) complete.push_back(&b);
      else ++excluded;
    }
    if (complete.size() < 2) {
      throw InsufficientData("table2 has " + std::to_string(complete.size()) + " complete blocks (need at least 2)");
    }
    for (const auto& rubric : rubric_names()) {
      AblationAnalysis aa;
      aa.rubric = rubric;
      aa.blocks_complete = complete.size();
      aa.blocks_excluded = excluded;
      std::vector<std::vector<double>> matrix;
      std::vector<stats::SampleGroup> groups;
      for (const auto& v : t2) groups.push_back({v, {}});
      for (const auto* b : complete) {
        std::vector<double> row;
        for (std::size_t j = 0; j < t2.size(); ++j) {
          const double x = rubric_value(*b->at(t2[j]), rubric);
          row.push_back(x);
          groups[j].values.push_back(x);
        }
        matrix.push_back(std::move(row));
      }
      for (const auto& g : groups) aa.groups.push_back(detail::summarize(g.label, g.values));
      aa.friedman = stats::friedman(matrix);
      aa.dunn = stats::dunn_posthoc(groups, correction);
      const std::pair<const char*, const char*> pairs[] = {
          {"full", "prompt_only"}, {"scaffold_only", "prompt_only"}, {"full", "scaffold_only"}};
      for (const auto& [a, b] : pairs) {
        auto ia = std::find(t2.begin(), t2.end(), a);
        auto ib = std::find(t2.begin(), t2.end(), b);
        if (ia == t2.end() || ib == t2.end()) continue;
        aa.comparisons.push_back(detail::compare(a, groups[ia - t2.begin()].values, b,
                                                 groups[ib - t2.begin()].values, aa.dunn, correction));
      }
      rep.table2.push_back(std::move(aa));
    }
  }

  // Readability per condition x grade against the recipe's target band.
  std::map<std::pair<std::string, int>, ReadabilityCell> read;
  std::map<std::tuple<std::string, int, std::string>, ProgressionCell> prog;
  for (const auto& t : turns) {
    const std::string label = condition_label(t.condition, t.variant);
    auto& cell = read[{label, t.grade}];
    if (cell.n == 0) {
      cell.condition = label;
      cell.grade = t.grade;
      cell.fk_mean = 0.0;
      if (auto it = recipe.readability_targets.find(t.grade); it != recipe.readability_targets.end()) {
        cell.target_min = it->second.fk_min;
        cell.target_max = it->second.fk_max;
      }
    }
    ++cell.n;
    cell.fk_mean += t.fk_grade;
    if (t.fk_grade >= cell.target_min && t.fk_grade <= cell.target_max) ++cell.in_range;

    auto& p = prog[{label, t.turn_index, t.support_at_turn}];
    if (p.n == 0) {
      p.condition = label;
      p.turn_index = t.turn_index;
      p.support = t.support_at_turn;
      p.fk_mean = 0.0;
    }
    ++p.n;
    p.fk_mean += t.fk_grade;
  }
  for (auto& [k, c] : read) {
    c.fk_mean /= static_cast<double>(c.n);
    if (!std::isnan(c.target_min)) c.rate = static_cast<double>(c.in_range) / static_cast<double>(c.n);
    rep.readability.push_back(c);
  }
  for (auto& [k, p] : prog) {
    p.fk_mean /= static_cast<double>(p.n);
    rep.progression.push_back(p);
  }

  rep.footnotes = {
      "Pairwise Dunn p-values use the " + stats::to_string(correction) + " correction.",
      "eta^2_H = (H - k + 1) / (n - k), computed from the Kruskal-Wallis H statistic.",
      "d is Cohen's d with pooled standard deviation; delta is Cliff's delta; both are first group minus second.",
      "Table 2 uses Friedman tests over complete (model, scenario) blocks; Dunn tests rank the pooled block scores."};
  if (!rep.table2.empty()) {
    rep.footnotes.push_back("Table 2 blocks: " + std::to_string(rep.table2.front().blocks_complete) + " complete, " +
                            std::to_string(rep.table2.front().blocks_excluded) + " excluded for missing variants.");
  }
  rep.footnotes.push_back("n/a marks a statistic that is undefined for the data (for example zero variance).");
  return rep;
}

// ---------------------------------------------------------------------------
// Report emission
// ---------------------------------------------------------------------------
namespace detail {

inline std::string fmt_p(double p) {
  if (std::isnan(p)) return "n/a";
  if (p < 0.001) return "<0.001";
  return format_fixed(p, 3);
}

inline std::string fmt_num(double x, int digits = 2) {
  if (std::isnan(x)) return "n/a";
  return format_fixed(x, digits);
}

inline csv::Field opt_number(const std::optional<stats::TestResult>& r, bool p) {
  if (!r) return csv::number(kNaN);
  return csv::number(p ? r->p_value : r->statistic);
}

}  // namespace detail

inline std::string render_markdown(const StatReport& rep) {
  std::string md = "# Run report\n\n";
  if (!rep.run_id.empty()) md += "Run: `" + rep.run_id + "`\n\n";

  auto means_table = [&](const auto& analyses) {
    std::string out = "| Rubric | Condition | n | Mean | SEM |\n|---|---|---|---|---|\n";
    for (const auto& a : analyses)
      for (const auto& g : a.groups)
        out += "| " + a.rubric + " | " + g.label + " | " + std::to_string(g.n) + " | " + detail::fmt_num(g.mean) +
               " | " + detail::fmt_num(g.sem) + " |\n";
    return out;
  };

  if (!rep.table1.empty()) {
    md += "## Table 1: prompting conditions\n\n";
    md += means_table(rep.table1) + "\n";
    md += "| Rubric | Comparison | Kruskal p | η² | d | δ | Dunn p |\n|---|---|---|---|---|---|---|\n";
    for (const auto& ra : rep.table1)
      for (const auto& c : ra.comparisons)
        md += "| " + ra.rubric + " | " + c.group_a + " vs " + c.group_b + " | " + detail::fmt_p(ra.kruskal.p_value) +
              " | " + detail::fmt_num(ra.eta_squared_h) + " | " + detail::fmt_num(c.cohens_d) + " | " +
              detail::fmt_num(c.cliffs_delta) + " | " + detail::fmt_p(c.dunn_p) + " |\n";
    md += "\n";
  }
  if (!rep.table2.empty()) {
    md += "## Table 2: ablation\n\n";
    md += means_table(rep.table2) + "\n";
    md += "| Rubric | Comparison | Friedman p | Dunn p | d | δ |\n|---|---|---|---|---|---|\n";
    for (const auto& aa : rep.table2)
      for (const auto& c : aa.comparisons)
        md += "| " + aa.rubric + " | " + c.group_a + " vs " + c.group_b + " | " +
              detail::fmt_p(aa.friedman.p_value) + " | " + detail::fmt_p(c.dunn_p) + " | " +
              detail::fmt_num(c.cohens_d) + " | " + detail::fmt_num(c.cliffs_delta) + " |\n";
    md += "\n";
  }
  if (!rep.readability.empty()) {
    md += "## Readability\n\n| Condition | Grade | Turns | Mean FK | Target | In range |\n|---|---|---|---|---|---|\n";
    for (const auto& r : rep.readability)
      md += "| " + r.condition + " | " + std::to_string(r.grade) + " | " + std::to_string(r.n) + " | " +
            detail::fmt_num(r.fk_mean) + " | [" + detail::fmt_num(r.target_min, 1) + ", " +
            detail::fmt_num(r.target_max, 1) + "] | " +
            (std::isnan(r.rate) ? std::string("n/a") : format_fixed(100.0 * r.rate, 1) + "%") + " |\n";
    md += "\n";
  }
  md += "## Notes\n\n";
  for (const auto& f : rep.footnotes) md += "- " + f + "\n";
  return md;
}

inline std::string table1_csv(const StatReport& rep) {
  using namespace csv;
  std::string out = encode_header({"rubric", "group_a", "group_b", "kruskal_h", "kruskal_p", "eta_squared_h",
                                   "cohens_d", "cliffs_delta", "dunn_p", "correction"});
  for (const auto& ra : rep.table1)
    for (const auto& c : ra.comparisons)
      out += encode_row({text(ra.rubric), text(c.group_a), text(c.group_b), number(ra.kruskal.statistic),
                         number(ra.kruskal.p_value), number(ra.eta_squared_h), number(c.cohens_d),
                         number(c.cliffs_delta), number(c.dunn_p), text(c.correction)});
  return out;
}

inline std::string table2_csv(const StatReport& rep) {
  using namespace csv;
  std::string out = encode_header({"rubric", "group_a", "group_b", "friedman_chi2", "friedman_p", "dunn_p",
                                   "cohens_d", "cliffs_delta", "correction", "blocks_complete", "blocks_excluded"});
  for (const auto& aa : rep.table2)
    for (const auto& c : aa.comparisons)
      out += encode_row({text(aa.rubric), text(c.group_a), text(c.group_b), number(aa.friedman.statistic),
                         number(aa.friedman.p_value), number(c.dunn_p), number(c.cohens_d), number(c.cliffs_delta),
                         text(c.correction), integer(static_cast<long long>(aa.blocks_complete)),
                         integer(static_cast<long long>(aa.blocks_excluded))});
  return out;
}

inline std::string means_csv(const StatReport& rep) {
  using namespace csv;
  std::string out = encode_header({"table", "rubric", "condition", "n", "mean", "sem"});
  for (const auto& ra : rep.table1)
    for (const auto& g : ra.groups)
      out += encode_row({text("table1"), text(ra.rubric), text(g.label), integer(static_cast<long long>(g.n)),
                         number(g.mean), number(g.sem)});
  for (const auto& aa : rep.table2)
    for (const auto& g : aa.groups)
      out += encode_row({text("table2"), text(aa.rubric), text(g.label), integer(static_cast<long long>(g.n)),
                         number(g.mean), number(g.sem)});
  return out;
}

inline std::string assumptions_csv(const StatReport& rep) {
  using namespace csv;
  std::string out = encode_header({"table", "rubric", "group", "test", "statistic", "p_value", "note"});
  auto shapiro_rows = [&](const char* table, const std::string& rubric, const std::vector<GroupSummary>& groups) {
    for (const auto& g : groups)
      out += encode_row({text(table), text(rubric), text(g.label), text("shapiro_wilk"),
                         detail::opt_number(g.shapiro, false), detail::opt_number(g.shapiro, true),
                         text(g.shapiro_note)});
  };
  for (const auto& ra : rep.table1) {
    shapiro_rows("table1", ra.rubric, ra.groups);
    out += encode_row({text("table1"), text(ra.rubric), text("all"), text("levene"), detail::opt_number(ra.levene, false),
                       detail::opt_number(ra.levene, true), text(ra.levene_note)});
  }
  for (const auto& aa : rep.table2) shapiro_rows("table2", aa.rubric, aa.groups);
  return out;
}

inline std::string dunn_csv(const StatReport& rep) {
  using namespace csv;
  std::string out = encode_header({"table", "rubric", "group_i", "group_j", "z", "p_raw", "p_adjusted", "correction"});
  auto rows = [&](const char* table, const std::string& rubric, const std::vector<stats::PairwiseResult>& dunn) {
    for (const auto& p : dunn)
      out += encode_row({text(table), text(rubric), text(p.label_i), text(p.label_j), number(p.z), number(p.p_raw),
                         number(p.p_adjusted), text(p.correction)});
  };
  for (const auto& ra : rep.table1) rows("table1", ra.rubric, ra.dunn);
  for (const auto& aa : rep.table2) rows("table2", aa.rubric, aa.dunn);
  return out;
}

inline std::string readability_csv(const StatReport& rep) {
  using namespace csv;
  std::string out =
      encode_header({"condition", "grade", "n", "fk_mean", "target_min", "target_max", "in_range", "rate"});
  for (const auto& r : rep.readability)
    out += encode_row({text(r.condition), integer(r.grade), integer(static_cast<long long>(r.n)), number(r.fk_mean),
                       number(r.target_min), number(r.target_max), integer(static_cast<long long>(r.in_range)),
                       number(r.rate)});
  return out;
}

inline std::string progression_csv(const StatReport& rep) {
  using namespace csv;
  std::string out = encode_header({"condition", "turn_index", "support", "n", "fk_mean"});
  for (const auto& p : rep.progression)
    out += encode_row({text(p.condition), integer(p.turn_index), text(p.support), integer(static_cast<long long>(p.n)),
                       number(p.fk_mean)});
  return out;
}

// Writes report.md and report_tables/*.csv under out_dir. An empty report is
// refused before anything is written.
inline void emit_report(const StatReport& rep, const std::filesystem::path& out_dir) {
  if (rep.empty()) throw IoError("refusing to write an empty report");
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "report_tables", ec);
  if (ec) throw IoError("cannot create " + (out_dir / "report_tables").string() + ": " + ec.message());
  write_text_file(out_dir / "report.md", render_markdown(rep));
  const auto t = out_dir / "report_tables";
  write_text_file(t / "table1.csv", table1_csv(rep));
  write_text_file(t / "table2.csv", table2_csv(rep));
  write_text_file(t / "means.csv", means_csv(rep));
  write_text_file(t / "assumptions.csv", assumptions_csv(rep));
  write_text_file(t / "dunn.csv", dunn_csv(rep));
  write_text_file(t / "readability.csv", readability_csv(rep));
  write_text_file(t / "progression.csv", progression_csv(rep));
}

// Offline re-analysis of an existing run directory.
inline StatReport report_from_run_dir(const std::filesystem::path& run_dir,
                                      stats::Correction correction = stats::Correction::holm) {
  const auto scores_path = run_dir / "scores.csv";
  const auto turns_path = run_dir / "turns.csv";
  if (!std::filesystem::exists(scores_path)) throw IoError("missing " + scores_path.string());
  if (!std::filesystem::exists(turns_path)) throw IoError("missing " + turns_path.string());
  auto scores = parse_scores_csv(csv::read_file(scores_path));
  auto turns = parse_turns_csv(csv::read_file(turns_path));
  sort_rows(turns);
  auto rep = analyze(turns, scores, default_recipe(), correction);
  emit_report(rep, run_dir);
  return rep;
}

}  // namespace scaffold
