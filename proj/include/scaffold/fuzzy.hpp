#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scaffold/membership.hpp"
#include "scaffold/recipe.hpp"

namespace scaffold {

// ---------------------------------------------------------------------------
// Evidence
// ---------------------------------------------------------------------------
enum class EvidenceKind { correct_answer, incorrect_answer, trigger_phrase, explicit_self_report, no_signal };

inline std::string to_string(EvidenceKind k) {
  switch (k) {
    case EvidenceKind::correct_answer: return "correct_answer";
    case EvidenceKind::incorrect_answer: return "incorrect_answer";
    case EvidenceKind::trigger_phrase: return "trigger_phrase";
    case EvidenceKind::explicit_self_report: return "explicit_self_report";
    case EvidenceKind::no_signal: return "no_signal";
  }
  return "no_signal";
}

inline std::optional<EvidenceKind> parse_evidence_kind(std::string_view s) {
  for (auto k : {EvidenceKind::correct_answer, EvidenceKind::incorrect_answer, EvidenceKind::trigger_phrase,
                 EvidenceKind::explicit_self_report, EvidenceKind::no_signal}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

struct Evidence {
  EvidenceKind kind = EvidenceKind::no_signal;
  std::string band;  // set for trigger_phrase and explicit_self_report
  double weight = 1.0;

  bool operator==(const Evidence&) const = default;
};

// Tunable magnitudes of the estimate update.
struct EvidenceSteps {
  double correct = 0.05;
  double incorrect = 0.07;
  double trigger_pull = 0.30;      // fraction of the way toward the band's plateau midpoint
  double self_report_pull = 0.60;
  double confidence_per_item = 0.1;
};

// Case-insensitive substring match of every band's trigger phrases, plus the
// externally supplied correctness flag. At most one trigger per band.
inline std::vector<Evidence> detect_evidence(std::string_view utterance, const ScaffoldingRecipe& recipe,
                                             std::optional<bool> correctness = std::nullopt) {
  std::vector<Evidence> out;
  const std::string text = to_lower(utterance);
  for (const auto& band : recipe.band_ids()) {
    for (const auto& phrase : recipe.band(band).trigger_phrases) {
      if (!phrase.empty() && text.find(to_lower(phrase)) != std::string::npos) {
        out.push_back({EvidenceKind::trigger_phrase, band, 1.0});
        break;
      }
    }
  }
  if (correctness) out.push_back({*correctness ? EvidenceKind::correct_answer : EvidenceKind::incorrect_answer, "", 1.0});
  if (out.empty()) out.push_back({EvidenceKind::no_signal, "", 1.0});
  return out;
}

// ---------------------------------------------------------------------------
// Knowledge estimate
// ---------------------------------------------------------------------------
struct KnowledgeEstimate {
  double score = 0.5;
  std::map<std::string, double> memberships;
  double confidence = 0.0;

  bool operator==(const KnowledgeEstimate&) const = default;

  // Band with the largest membership; ties go to the lower band.
  std::string dominant_band() const {
    std::string best;
    double best_degree = -1.0;
    for (const char* b : kBands) {
      auto it = memberships.find(b);
      if (it != memberships.end() && it->second > best_degree) {
        best = b;
        best_degree = it->second;
      }
    }
    return best;
  }
};

inline std::map<std::string, double> band_memberships(double score, const ScaffoldingRecipe& recipe) {
  std::map<std::string, double> out;
  for (const auto& [id, band] : recipe.knowledge_levels) out[id] = membership(score, band.membership);
  return out;
}

inline KnowledgeEstimate make_estimate(double score, double confidence, const ScaffoldingRecipe& recipe) {
  score = std::clamp(score, 0.0, 1.0);
  return {score, band_memberships(score, recipe), std::clamp(confidence, 0.0, 1.0)};
}

// Starting point for a learner profiled into `band`.
inline KnowledgeEstimate initial_estimate(const std::string& band, const ScaffoldingRecipe& recipe) {
  return make_estimate(recipe.band(band).membership.plateau_midpoint(), 0.3, recipe);
}

// All steps are computed from the prior score and summed before clamping, so
// the result does not depend on evidence order.
inline KnowledgeEstimate update_estimate(const KnowledgeEstimate& prior, const std::vector<Evidence>& evidence,
                                         const ScaffoldingRecipe& recipe, const EvidenceSteps& steps = {}) {
  double delta = 0.0;
  int informative = 0;
  for (const auto& e : evidence) {
    switch (e.kind) {
      case EvidenceKind::correct_answer:
        delta += steps.correct * e.weight;
        break;
      case EvidenceKind::incorrect_answer:
        delta -= steps.incorrect * e.weight;
        break;
      case EvidenceKind::trigger_phrase:
        delta += steps.trigger_pull * e.weight * (recipe.band(e.band).membership.plateau_midpoint() - prior.score);
        break;
      case EvidenceKind::explicit_self_report:
        delta += steps.self_report_pull * e.weight * (recipe.band(e.band).membership.plateau_midpoint() - prior.score);
        break;
      case EvidenceKind::no_signal:
        continue;
    }
    ++informative;
  }
  if (informative == 0) return prior;
  return make_estimate(prior.score + delta, prior.confidence + steps.confidence_per_item * informative, recipe);
}

// ---------------------------------------------------------------------------
// Support inference
// ---------------------------------------------------------------------------
inline constexpr double kDefaultHysteresisMargin = 0.5;

struct SupportDecision {
  std::string support;
  std::map<std::string, double> activation;
  bool hysteresis_applied = false;

  bool operator==(const SupportDecision&) const = default;
};

// activation[s] = max membership over bands whose default support is s.
inline std::map<std::string, double> support_activation(const KnowledgeEstimate& estimate,
                                                        const ScaffoldingRecipe& recipe) {
  std::map<std::string, double> act;
  for (const auto& [id, def] : recipe.scaffolding_types) act[id] = 0.0;
  for (const auto& [band, degree] : estimate.memberships) {
    auto it = recipe.knowledge_levels.find(band);
    if (it == recipe.knowledge_levels.end()) continue;
    double& slot = act[it->second.default_support];
    slot = std::max(slot, degree);
  }
  return act;
}

inline SupportDecision infer_support(const KnowledgeEstimate& estimate, const ScaffoldingRecipe& recipe,
                                     const std::optional<std::string>& current = std::nullopt,
                                     double hysteresis_margin = kDefaultHysteresisMargin) {
  SupportDecision d;
  d.activation = support_activation(estimate, recipe);
  // Walk from most to least support so ties resolve toward more support.
  auto ladder = recipe.support_ladder();
  double best = -1.0;
  for (auto it = ladder.rbegin(); it != ladder.rend(); ++it) {
    double a = d.activation[*it];
    if (a > best) {
      best = a;
      d.support = *it;
    }
  }
  if (current && *current != d.support && recipe.scaffolding_types.count(*current)) {
    const double incumbent = d.activation[*current];
    if (best - incumbent < hysteresis_margin) {
      d.support = *current;
      d.hysteresis_applied = true;
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Follow-up selection
// ---------------------------------------------------------------------------
enum class FollowUp { hint, rephrase, advance, comprehension_check };

inline std::string to_string(FollowUp f) {
  switch (f) {
    case FollowUp::hint: return "hint";
    case FollowUp::rephrase: return "rephrase";
    case FollowUp::advance: return "advance";
    case FollowUp::comprehension_check: return "comprehension_check";
  }
  return "comprehension_check";
}

inline std::optional<FollowUp> parse_follow_up(std::string_view s) {
  for (auto f : {FollowUp::hint, FollowUp::rephrase, FollowUp::advance, FollowUp::comprehension_check}) {
    if (s == to_string(f)) return f;
  }
  return std::nullopt;
}

// Reduces a turn's evidence to the kind that drives the follow-up:
// incorrect beats correct beats learner-state signals.
inline EvidenceKind turn_outcome(const std::vector<Evidence>& evidence) {
  auto has = [&](EvidenceKind k) {
    return std::any_of(evidence.begin(), evidence.end(), [&](const Evidence& e) { return e.kind == k; });
  };
  if (has(EvidenceKind::incorrect_answer)) return EvidenceKind::incorrect_answer;
  if (has(EvidenceKind::correct_answer)) return EvidenceKind::correct_answer;
  if (has(EvidenceKind::explicit_self_report)) return EvidenceKind::explicit_self_report;
  if (has(EvidenceKind::trigger_phrase)) return EvidenceKind::trigger_phrase;
  return EvidenceKind::no_signal;
}

inline FollowUp select_follow_up(const KnowledgeEstimate& /*estimate*/, EvidenceKind last_turn_outcome,
                                 const std::string& support, const ScaffoldingRecipe& recipe) {
  switch (last_turn_outcome) {
    case EvidenceKind::incorrect_answer: {
      auto ladder = recipe.support_ladder();
      const bool at_top = !ladder.empty() && ladder.back() == support;
      return at_top ? FollowUp::rephrase : FollowUp::hint;
    }
    case EvidenceKind::correct_answer:
      return FollowUp::advance;
    default:
      return FollowUp::comprehension_check;
  }
}

// ---------------------------------------------------------------------------
// Adaptation rules
// ---------------------------------------------------------------------------
struct AdaptationFacts {
  int consecutive_correct = 0;
  int consecutive_confused = 0;
  int turns_at_support = 0;
  std::optional<std::string> explicit_signal;  // band signalled this turn
  std::string support;                         // current support-id

  bool operator==(const AdaptationFacts&) const = default;
};

inline bool rule_applies(const AdaptationRule& rule, const AdaptationFacts& f) {
  const auto& c = rule.when;
  if (c.consecutive_correct && f.consecutive_correct < *c.consecutive_correct) return false;
  if (c.consecutive_confused && f.consecutive_confused < *c.consecutive_confused) return false;
  if (c.turns_at_support && f.turns_at_support < *c.turns_at_support) return false;
  if (c.explicit_signal && f.explicit_signal != c.explicit_signal) return false;
  if (c.support && *c.support != f.support) return false;
  return true;
}

struct RuleOutcome {
  RuleAction action = RuleAction::hold;
  std::optional<std::string> rule_id;  // empty when nothing fired
};

// Highest-priority applicable rule fires; otherwise hold.
inline RuleOutcome apply_adaptation_rules(const AdaptationFacts& facts, const std::vector<AdaptationRule>& rules) {
  const AdaptationRule* winner = nullptr;
  for (const auto& rule : rules) {
    if (rule_applies(rule, facts) && (!winner || rule.priority > winner->priority)) winner = &rule;
  }
  if (!winner) return {};
  return {winner->action, winner->id};
}

// One step along the support ladder, saturating at both ends.
inline std::string step_support(const std::string& current, int direction, const ScaffoldingRecipe& recipe) {
  auto ladder = recipe.support_ladder();
  auto it = std::find(ladder.begin(), ladder.end(), current);
  if (it == ladder.end()) return current;
  auto idx = static_cast<long>(it - ladder.begin()) + direction;
  idx = std::clamp(idx, 0L, static_cast<long>(ladder.size()) - 1);
  return ladder[static_cast<std::size_t>(idx)];
}

// Move at most one ladder step from `current` toward `target`.
inline std::string step_toward(const std::string& current, const std::string& target, const ScaffoldingRecipe& recipe) {
  const int from = recipe.support_level(current);
  const int to = recipe.support_level(target);
  if (to > from) return step_support(current, +1, recipe);
  if (to < from) return step_support(current, -1, recipe);
  return current;
}

// Re-anchors the score at the plateau midpoint of the neighbouring band.
inline KnowledgeEstimate shift_band(const KnowledgeEstimate& estimate, int direction, const ScaffoldingRecipe& recipe) {
  const auto bands = recipe.band_ids();
  const auto dominant = estimate.dominant_band();
  auto it = std::find(bands.begin(), bands.end(), dominant);
  if (it == bands.end()) return estimate;
  auto idx = static_cast<long>(it - bands.begin()) + direction;
  if (idx < 0 || idx >= static_cast<long>(bands.size())) return estimate;
  const double target = recipe.band(bands[static_cast<std::size_t>(idx)]).membership.plateau_midpoint();
  if ((direction > 0 && target <= estimate.score) || (direction < 0 && target >= estimate.score)) return estimate;
  return make_estimate(target, estimate.confidence, recipe);
}

}  // namespace scaffold
