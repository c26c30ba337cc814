#include <gtest/gtest.h>

#include <json.hpp>

#include "scaffold/common.hpp"
#include "scaffold/stats/distributions.hpp"
#include "scaffold/stats/tests.hpp"
#include "test_util.hpp"

using namespace scaffold;
using namespace scaffold::stats;
using nlohmann::json;

namespace {

const json& reference() {
  static const json ref = json::parse(test_support::read_file(test_support::data_path("stats_reference.json")));
  return ref;
}

std::vector<SampleGroup> groups_of(const json& j) {
  std::vector<SampleGroup> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back({"g" + std::to_string(i), j[i].get<std::vector<double>>()});
  return out;
}

// Brute-force Mann-Whitney U: count pairs with a > b (no ties assumed).
double brute_u(const std::vector<double>& a, const std::vector<double>& b) {
  double u = 0;
  for (double x : a)
    for (double y : b) u += x > y ? 1.0 : 0.0;
  return u;
}

}  // namespace

TEST(Ranks, HandRankedExamples) {
  EXPECT_EQ(rank_with_ties(std::vector<double>{10, 20, 20, 30}), (std::vector<double>{1, 2.5, 2.5, 4}));
  EXPECT_EQ(rank_with_ties(std::vector<double>{5}), (std::vector<double>{1}));
  EXPECT_EQ(rank_with_ties(std::vector<double>{7, 7, 7}), (std::vector<double>{2, 2, 2}));
}

TEST(Ranks, SumIsTriangular) {
  Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> v(static_cast<std::size_t>(rng.uniform_int(1, 40)));
    for (auto& x : v) x = static_cast<double>(rng.uniform_int(1, 6));
    const auto r = rank_with_ties(v);
    const double n = static_cast<double>(v.size());
    EXPECT_DOUBLE_EQ(std::accumulate(r.begin(), r.end(), 0.0), n * (n + 1) / 2);
  }
}

TEST(KruskalWallis, Anchors) {
  std::vector<SampleGroup> g{{"a", {1, 2}}, {"b", {3, 4}}};
  auto r = kruskal_wallis(g);
  EXPECT_NEAR(r.statistic, 2.4, 1e-12);
  EXPECT_NEAR(r.p_value, 0.12133525035848367, 1e-9);
  EXPECT_EQ(r.df1, 1);

  std::vector<SampleGroup> same{{"a", {1, 2, 3}}, {"b", {1, 2, 3}}};
  auto s = kruskal_wallis(same);
  EXPECT_NEAR(s.statistic, 0.0, 1e-12);
  EXPECT_NEAR(s.p_value, 1.0, 1e-12);
}

TEST(KruskalWallis, AllTiedIsDegenerateNotError) {
  std::vector<SampleGroup> g{{"a", {3, 3}}, {"b", {3, 3, 3}}};
  auto r = kruskal_wallis(g);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.p_value, 1.0);
}

TEST(KruskalWallis, RejectsEmptyGroupAndSingleGroup) {
  std::vector<SampleGroup> one{{"a", {1, 2}}};
  EXPECT_THROW(kruskal_wallis(one), InvalidInput);
  std::vector<SampleGroup> empty{{"a", {1, 2}}, {"b", {}}};
  EXPECT_THROW(kruskal_wallis(empty), SampleTooSmall);
}

TEST(KruskalWallis, MatchesMannWhitneyForTwoGroupsWithoutTies) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const auto na = static_cast<std::size_t>(rng.uniform_int(1, 8));
    const auto nb = static_cast<std::size_t>(rng.uniform_int(1, 8));
    if (na + nb < 3) continue;
    std::vector<double> a(na), b(nb);
    for (auto& x : a) x = rng.uniform();
    for (auto& x : b) x = rng.uniform();
    std::vector<SampleGroup> g{{"a", a}, {"b", b}};
    const double u = brute_u(a, b);
    const double n = static_cast<double>(na + nb);
    const double z = (u - na * nb / 2.0) / std::sqrt(na * nb * (n + 1) / 12.0);
    EXPECT_NEAR(kruskal_wallis(g).statistic, z * z, 1e-9);
  }
}

TEST(KruskalWallis, MatchesReferenceImplementation) {
  for (const auto& ds : reference()["kruskal"]) {
    auto g = groups_of(ds["groups"]);
    auto r = kruskal_wallis(g);
    EXPECT_NEAR(r.statistic, ds["H"].get<double>(), 1e-6);
    EXPECT_NEAR(r.p_value, ds["p"].get<double>(), 1e-6);
  }
}

TEST(Dunn, TwoGroupsEqualsUncorrectedZTest) {
  std::vector<SampleGroup> g{{"a", {1, 2, 5}}, {"b", {3, 4, 6, 7}}};
  auto holm = dunn_posthoc(g, Correction::holm);
  ASSERT_EQ(holm.size(), 1u);
  EXPECT_DOUBLE_EQ(holm[0].p_adjusted, holm[0].p_raw);
  EXPECT_NEAR(holm[0].p_raw, 2.0 * normal_sf(std::fabs(holm[0].z)), 1e-15);
}

TEST(Dunn, IdenticalGroupsGiveUnitP) {
  std::vector<SampleGroup> g{{"a", {1, 2, 3}}, {"b", {1, 2, 3}}, {"c", {1, 2, 3}}};
  for (const auto& p : dunn_posthoc(g)) EXPECT_NEAR(p.p_adjusted, 1.0, 1e-12);
}

TEST(Dunn, MatchesReferenceImplementation) {
  for (const auto& ds : reference()["kruskal"]) {
    auto g = groups_of(ds["groups"]);
    auto holm = dunn_posthoc(g, Correction::holm);
    auto bonf = dunn_posthoc(g, Correction::bonferroni);
    const auto& ref = ds["dunn"];
    ASSERT_EQ(holm.size(), ref["pairs"].size());
    for (std::size_t k = 0; k < holm.size(); ++k) {
      EXPECT_EQ(holm[k].i, ref["pairs"][k][0].get<std::size_t>());
      EXPECT_EQ(holm[k].j, ref["pairs"][k][1].get<std::size_t>());
      EXPECT_NEAR(holm[k].z, ref["z"][k].get<double>(), 1e-6);
      EXPECT_NEAR(holm[k].p_raw, ref["p_raw"][k].get<double>(), 1e-6);
      EXPECT_NEAR(holm[k].p_adjusted, ref["p_holm"][k].get<double>(), 1e-6);
      EXPECT_NEAR(bonf[k].p_adjusted, ref["p_bonferroni"][k].get<double>(), 1e-6);
    }
  }
}

TEST(Friedman, Anchors) {
  auto r = friedman({{1, 2, 3}, {1, 2, 3}});
  EXPECT_NEAR(r.statistic, 4.0, 1e-12);
  EXPECT_NEAR(r.p_value, std::exp(-2.0), 1e-12);
  auto c = friedman({{5, 5, 5}, {5, 5, 5}, {5, 5, 5}});
  EXPECT_EQ(c.statistic, 0.0);
  EXPECT_EQ(c.p_value, 1.0);
}

TEST(Friedman, IncompleteBlockRejected) {
  EXPECT_THROW(friedman({{1, 2, 3}, {1, 2}}), IncompleteBlock);
  EXPECT_THROW(friedman({{1, 2, 3}}), SampleTooSmall);
}

TEST(Friedman, MatchesReferenceImplementation) {
  for (const auto& ds : reference()["friedman"]) {
    auto r = friedman(ds["blocks"].get<std::vector<std::vector<double>>>());
    EXPECT_NEAR(r.statistic, ds["chi2"].get<double>(), 1e-6);
    EXPECT_NEAR(r.p_value, ds["p"].get<double>(), 1e-6);
  }
}

TEST(ShapiroWilk, SizeLimits) {
  EXPECT_THROW(shapiro_wilk(std::vector<double>{1, 2}), SampleTooSmall);
  EXPECT_THROW(shapiro_wilk(std::vector<double>(5001, 1.0)), SampleTooLarge);
}

TEST(ShapiroWilk, MatchesReferenceImplementation) {
  for (const auto& ds : reference()["shapiro"]) {
    auto r = shapiro_wilk(ds["values"].get<std::vector<double>>());
    EXPECT_NEAR(r.statistic, ds["W"].get<double>(), 1e-3);
    EXPECT_NEAR(r.p_value, ds["p"].get<double>(), 5e-3);
  }
}

TEST(ShapiroWilk, NormalAndLikertSamples) {
  const auto& normal = reference()["shapiro_normal50"];
  auto rn = shapiro_wilk(normal["values"].get<std::vector<double>>());
  EXPECT_NEAR(rn.statistic, normal["W"].get<double>(), 1e-3);
  EXPECT_NEAR(rn.p_value, normal["p"].get<double>(), 5e-3);

  const auto& likert = reference()["shapiro_likert50"];
  auto rl = shapiro_wilk(likert["values"].get<std::vector<double>>());
  EXPECT_LT(rl.p_value, 0.01);
  EXPECT_NEAR(rl.statistic, likert["W"].get<double>(), 1e-3);
}

TEST(Levene, Examples) {
  std::vector<SampleGroup> same{{"a", {1, 2, 3}}, {"b", {1, 2, 3}}};
  auto r = levene(same);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
  EXPECT_NEAR(r.p_value, 1.0, 1e-12);

  std::vector<SampleGroup> spread{{"a", {1, 1, 1, 9, 9, 9}}, {"b", {4, 5, 5, 6}}};
  auto s = levene(spread);
  EXPECT_LT(s.p_value, 0.5);
  EXPECT_NEAR(s.statistic, 235.2, 1e-6);
  EXPECT_NEAR(s.p_value, 3.2445883896851457e-07, 1e-6);

  std::vector<SampleGroup> single{{"a", {1}}, {"b", {1, 2}}};
  EXPECT_THROW(levene(single), SampleTooSmall);
}

TEST(Levene, MatchesReferenceImplementation) {
  for (const auto& ds : reference()["levene"]) {
    auto g = groups_of(ds["groups"]);
    auto r = levene(g);
    const double w = ds["W"].is_number() ? ds["W"].get<double>() : std::nan("");
    if (std::isfinite(w)) {
      EXPECT_NEAR(r.statistic, w, 1e-6 * std::max(1.0, std::fabs(w)));
      EXPECT_NEAR(r.p_value, ds["p"].get<double>(), 1e-6);
    }
  }
}

TEST(EffectSizes, Anchors) {
  EXPECT_NEAR(cohens_d(std::vector<double>{1, 2, 3}, std::vector<double>{2, 3, 4}), -1.0, 1e-12);
  EXPECT_EQ(cohens_d(std::vector<double>{1, 2, 4}, std::vector<double>{1, 2, 4}), 0.0);
  EXPECT_THROW(cohens_d(std::vector<double>{5, 5}, std::vector<double>{5, 5}), ZeroVariance);
  EXPECT_EQ(cliffs_delta(std::vector<double>{1, 2}, std::vector<double>{3, 4}), -1.0);
  EXPECT_EQ(cliffs_delta(std::vector<double>{5}, std::vector<double>{5}), 0.0);
  EXPECT_NEAR(eta_squared_h(2.4, 2, 4), 0.7, 1e-12);
  EXPECT_EQ(eta_squared_h(2.0, 3, 10), 0.0);
  EXPECT_THROW(eta_squared_h(1.0, 4, 4), DegenerateSizes);
}

TEST(EffectSizes, MatchReferenceAndAntisymmetry) {
  for (const auto& ds : reference()["effect_sizes"]) {
    auto a = ds["a"].get<std::vector<double>>();
    auto b = ds["b"].get<std::vector<double>>();
    EXPECT_NEAR(cohens_d(a, b), ds["d"].get<double>(), 1e-6);
    EXPECT_NEAR(cliffs_delta(a, b), ds["delta"].get<double>(), 1e-6);
    EXPECT_EQ(cliffs_delta(a, b), -cliffs_delta(b, a));
    EXPECT_NEAR(cohens_d(a, b), -cohens_d(b, a), 1e-12);
  }
}

TEST(Sem, Examples) {
  EXPECT_NEAR(sem(std::vector<double>{1, 2, 3}), 1.0 / std::sqrt(3.0), 1e-12);
  EXPECT_EQ(sem(std::vector<double>{4, 4, 4}), 0.0);
  EXPECT_THROW(sem(std::vector<double>{1}), SampleTooSmall);
}

TEST(Distributions, ChiSquareAndFTailsMatchReference) {
  for (const auto& row : reference()["chi2_sf"]) {
    EXPECT_NEAR(chi2_sf(row[1].get<double>(), row[0].get<double>()), row[2].get<double>(), 1e-9)
        << "df=" << row[0] << " x=" << row[1];
  }
  for (const auto& row : reference()["f_sf"]) {
    EXPECT_NEAR(f_sf(row[2].get<double>(), row[0].get<double>(), row[1].get<double>()), row[3].get<double>(), 1e-9)
        << "d1=" << row[0] << " d2=" << row[1] << " x=" << row[2];
  }
}

TEST(Distributions, NormalQuantileInvertsCdf) {
  for (double p : {1e-10, 1e-4, 0.01, 0.2, 0.5, 0.7, 0.975, 0.9999}) {
    EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 * std::max(1.0, 1.0 / p) + 1e-15);
  }
}

// Rank statistics are invariant under strictly increasing transforms.
TEST(RankInvariance, MonotoneTransformLeavesRankStatisticsUnchanged) {
  Rng rng(99);
  auto transform = [](double x) { return std::exp(0.5 * x) + 3.0 * x; };
  for (int t = 0; t < 100; ++t) {
    std::vector<SampleGroup> g, tg;
    const int k = static_cast<int>(rng.uniform_int(2, 4));
    for (int i = 0; i < k; ++i) {
      SampleGroup s{"g" + std::to_string(i), {}};
      const auto n = rng.uniform_int(3, 12);
      for (int j = 0; j < n; ++j) s.values.push_back(static_cast<double>(rng.uniform_int(-5, 5)) + 0.25 * i);
      SampleGroup ts = s;
      for (auto& v : ts.values) v = transform(v);
      g.push_back(s);
      tg.push_back(ts);
    }
    EXPECT_EQ(kruskal_wallis(g).statistic, kruskal_wallis(tg).statistic);
    auto d1 = dunn_posthoc(g);
    auto d2 = dunn_posthoc(tg);
    for (std::size_t i = 0; i < d1.size(); ++i) EXPECT_EQ(d1[i].z, d2[i].z);
    EXPECT_EQ(cliffs_delta(g[0].values, g[1].values), cliffs_delta(tg[0].values, tg[1].values));

    std::vector<std::vector<double>> blocks, tblocks;
    for (int i = 0; i < 6; ++i) {
      std::vector<double> row;
      for (int j = 0; j < k; ++j) row.push_back(static_cast<double>(rng.uniform_int(1, 5)));
      blocks.push_back(row);
      for (auto& v : row) v = transform(v);
      tblocks.push_back(row);
    }
    EXPECT_EQ(friedman(blocks).statistic, friedman(tblocks).statistic);
  }
}

TEST(RankInvariance, KruskalSymmetricUnderRelabeling) {
  std::vector<SampleGroup> g{{"a", {1, 5, 2.5}}, {"b", {3, 3, 9, 1}}, {"c", {0.5, 7}}};
  std::vector<SampleGroup> h{g[2], g[0], g[1]};
  EXPECT_NEAR(kruskal_wallis(g).statistic, kruskal_wallis(h).statistic, 1e-12);
  EXPECT_NEAR(levene(g).statistic, levene(h).statistic, 1e-12);
}
