#include <gtest/gtest.h>

#include <cmath>

#include "scaffold/common.hpp"
#include "scaffold/readability.hpp"

using namespace scaffold;

namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

std::string random_word(Rng& rng, int max_len) {
  static const std::string letters = "abcdefghijklmnopqrstuvwxyzAEIOUY";
  std::string w;
  const auto len = rng.uniform_int(1, max_len);
  for (int i = 0; i < len; ++i) w += letters[rng.uniform_int(0, letters.size() - 1)];
  return w;
}

// Random prose whose last sentence is terminated.
std::string random_text(Rng& rng) {
  static const char* terminators[] = {".", "!", "?"};
  std::string text;
  const auto sentences = rng.uniform_int(1, 6);
  for (int s = 0; s < sentences; ++s) {
    const auto words = rng.uniform_int(1, 15);
    for (int w = 0; w < words; ++w) {
      if (w > 0) text += rng.bernoulli(0.1) ? ", " : " ";
      text += random_word(rng, 10);
    }
    text += terminators[rng.uniform_int(0, 2)];
    if (s + 1 < sentences) text += " ";
  }
  return text;
}

}  // namespace

TEST(Syllables, Examples) {
  EXPECT_EQ(syllable_count("cat"), 1);
  EXPECT_EQ(syllable_count("genetics"), 3);
  EXPECT_EQ(syllable_count("the"), 1);
  EXPECT_EQ(syllable_count("make"), 1);
  EXPECT_EQ(syllable_count("banana"), 3);
  EXPECT_EQ(syllable_count("rhythm"), 1);
  EXPECT_EQ(syllable_count("42"), 1);
}

TEST(Syllables, NeverZeroOnRandomAsciiWords) {
  Rng rng(99);
  for (int t = 0; t < 20000; ++t) {
    std::string w;
    const auto len = rng.uniform_int(1, 12);
    for (int i = 0; i < len; ++i) w += static_cast<char>(rng.uniform_int(33, 126));
    EXPECT_GE(syllable_count(w), 1) << w;
  }
}

TEST(FleschKincaid, Anchors) {
  auto r = flesch_kincaid("The cat sat on the mat.");
  EXPECT_EQ(r.words, 6);
  EXPECT_EQ(r.sentences, 1);
  EXPECT_EQ(r.syllables, 6);
  EXPECT_NEAR(r.fk_grade, 0.39 * 6 + 11.8 * 1 - 15.59, 1e-12);
  EXPECT_EQ(round2(r.fk_grade), -1.45);

  r = flesch_kincaid("Go.");
  EXPECT_EQ(r.words, 1);
  EXPECT_EQ(r.sentences, 1);
  EXPECT_EQ(r.syllables, 1);
  EXPECT_NEAR(r.fk_grade, -3.40, 1e-12);
  EXPECT_EQ(round2(r.fk_grade), -3.40);
}

TEST(FleschKincaid, EmptyTextThrows) {
  EXPECT_THROW(flesch_kincaid(""), EmptyText);
  EXPECT_THROW(flesch_kincaid("  \n\t"), EmptyText);
}

TEST(FleschKincaid, Tokenization) {
  auto r = flesch_kincaid("Is 3.5 bigger than 3? Yes! It is");
  EXPECT_EQ(r.words, 9);
  EXPECT_EQ(r.sentences, 3);
  r = flesch_kincaid("...");
  EXPECT_EQ(r.words, 0);
  EXPECT_EQ(r.sentences, 1);
  EXPECT_EQ(r.fk_grade, 0.0);
}

TEST(FleschKincaid, DuplicationInvariance) {
  Rng rng(4242);
  for (int t = 0; t < 2000; ++t) {
    const auto text = random_text(rng);
    const auto once = flesch_kincaid(text);
    const auto twice = flesch_kincaid(text + " " + text);
    EXPECT_EQ(twice.words, 2 * once.words);
    EXPECT_EQ(twice.sentences, 2 * once.sentences);
    EXPECT_NEAR(twice.fk_grade, once.fk_grade, 1e-9) << text;
  }
}

TEST(FleschKincaid, WithinTargetIsClosed) {
  const ReadabilityTarget six{6, 5.0, 7.0};
  ReadabilityReport r;
  r.fk_grade = 6.2;
  EXPECT_TRUE(within_readability_target(r, six));
  r.fk_grade = 9.0;
  EXPECT_FALSE(within_readability_target(r, six));
  r.fk_grade = 5.0;
  EXPECT_TRUE(within_readability_target(r, six));
  r.fk_grade = 7.0;
  EXPECT_TRUE(within_readability_target(r, six));
}
