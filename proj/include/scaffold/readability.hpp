#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "scaffold/common.hpp"
#include "scaffold/recipe.hpp"

namespace scaffold {

class EmptyText : public Error {
 public:
  EmptyText() : Error("flesch_kincaid: text is empty") {}
};

struct ReadabilityReport {
  int words = 0;
  int sentences = 0;
  int syllables = 0;
  double fk_grade = 0.0;
};

namespace detail {
inline bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y': return true;
    default: return false;
  }
}
inline bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
}  // namespace detail

// Vowel-group heuristic: count runs of a/e/i/o/u/y, drop a terminal silent
// 'e' unless it is the only group. Never returns 0.
inline int syllable_count(std::string_view word) {
  std::string w;
  for (char c : word) {
    if (std::isalpha(static_cast<unsigned char>(c))) w += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (w.empty()) return 1;
  int groups = 0;
  bool in_group = false;
  for (char c : w) {
    const bool v = detail::is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  const std::size_t n = w.size();
  if (groups > 1 && w[n - 1] == 'e' && n >= 2 && !detail::is_vowel(w[n - 2])) --groups;
  return groups < 1 ? 1 : groups;
}

// Words are maximal alphanumeric runs; sentences end at '.', '!' or '?'
// followed by whitespace or end of text.
inline ReadabilityReport flesch_kincaid(std::string_view text) {
  if (trim(text).empty()) throw EmptyText();
  ReadabilityReport r;
  bool words_in_sentence = false;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (detail::is_alnum(c)) {
      std::size_t j = i;
      while (j < n && detail::is_alnum(text[j])) ++j;
      ++r.words;
      r.syllables += syllable_count(text.substr(i, j - i));
      words_in_sentence = true;
      i = j;
      continue;
    }
    if ((c == '.' || c == '!' || c == '?') &&
        (i + 1 == n || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
      if (words_in_sentence) ++r.sentences;
      words_in_sentence = false;
    }
    ++i;
  }
  if (words_in_sentence) ++r.sentences;
  if (r.sentences == 0) r.sentences = 1;
  if (r.words == 0) {
    r.fk_grade = 0.0;
    return r;
  }
  const double wps = static_cast<double>(r.words) / r.sentences;
  const double spw = static_cast<double>(r.syllables) / r.words;
  r.fk_grade = 0.39 * wps + 11.8 * spw - 15.59;
  return r;
}

inline bool within_readability_target(const ReadabilityReport& report, const ReadabilityTarget& target) {
  return target.fk_min <= report.fk_grade && report.fk_grade <= target.fk_max;
}

}  // namespace scaffold
