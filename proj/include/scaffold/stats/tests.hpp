#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scaffold/common.hpp"
#include "scaffold/stats/distributions.hpp"

namespace scaffold::stats {

class StatsError : public Error {
 public:
  using Error::Error;
};
class SampleTooSmall : public StatsError {
 public:
  using StatsError::StatsError;
};
class SampleTooLarge : public StatsError {
 public:
  using StatsError::StatsError;
};
class ZeroVariance : public StatsError {
 public:
  using StatsError::StatsError;
};
class DegenerateSizes : public StatsError {
 public:
  using StatsError::StatsError;
};
class IncompleteBlock : public StatsError {
 public:
  using StatsError::StatsError;
};
class InvalidInput : public StatsError {
 public:
  using StatsError::StatsError;
};

struct SampleGroup {
  std::string label;
  std::vector<double> values;
};

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  double df1 = 0.0;
  double df2 = 0.0;  // F tests only
  std::string method;
  std::optional<std::string> correction;
  bool degenerate = false;  // statistic defined by convention (e.g. all values tied)
};

struct PairwiseResult {
  std::size_t i = 0;
  std::size_t j = 0;
  std::string label_i;
  std::string label_j;
  double z = 0.0;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  std::string correction;
};

enum class Correction { holm, bonferroni, none };

inline std::string to_string(Correction c) {
  switch (c) {
    case Correction::holm: return "holm";
    case Correction::bonferroni: return "bonferroni";
    case Correction::none: return "none";
  }
  return "none";
}

// ---------------------------------------------------------------------------
// Descriptives
// ---------------------------------------------------------------------------
inline double mean(std::span<const double> v) {
  if (v.empty()) throw SampleTooSmall("mean of empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Sample variance (n - 1 denominator).
inline double variance(std::span<const double> v) {
  if (v.size() < 2) throw SampleTooSmall("variance needs n >= 2");
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size() - 1);
}

inline double stddev(std::span<const double> v) { return std::sqrt(variance(v)); }

inline double sem(std::span<const double> v) {
  if (v.size() < 2) throw SampleTooSmall("sem needs n >= 2");
  return stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw SampleTooSmall("median of empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace detail {
inline void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InvalidInput(std::string(what) + ": non-finite value");
  }
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Ranks
// ---------------------------------------------------------------------------

// Average ranks (1-based); tied values share the mean of their positions.
inline std::vector<double> rank_with_ties(std::span<const double> values) {
  detail::require_finite(values, "rank_with_ties");
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Sum over tie groups of (t^3 - t).
inline double tie_term(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  double sum = 0.0;
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i;
    while (j + 1 < v.size() && v[j + 1] == v[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    sum += t * t * t - t;
    i = j + 1;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Kruskal-Wallis and Dunn
// ---------------------------------------------------------------------------
namespace detail {

struct PooledRanks {
  std::vector<double> mean_rank;
  std::vector<std::size_t> sizes;
  std::size_t total = 0;
  double ties = 0.0;
};

inline PooledRanks pooled_ranks(std::span<const SampleGroup> groups, const char* what) {
  if (groups.size() < 2) throw InvalidInput(std::string(what) + ": need at least two groups");
  std::vector<double> pooled;
  PooledRanks out;
  for (const auto& g : groups) {
    if (g.values.empty()) throw SampleTooSmall(std::string(what) + ": group '" + g.label + "' is empty");
    require_finite(g.values, what);
    pooled.insert(pooled.end(), g.values.begin(), g.values.end());
    out.sizes.push_back(g.values.size());
  }
  out.total = pooled.size();
  const auto ranks = rank_with_ties(pooled);
  std::size_t offset = 0;
  for (auto n : out.sizes) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += ranks[offset + k];
    out.mean_rank.push_back(s / static_cast<double>(n));
    offset += n;
  }
  out.ties = tie_term(pooled);
  return out;
}

}  // namespace detail

// H with tie correction, upper-tail chi-square(k-1) p-value. All values tied:
// H = 0, p = 1, flagged degenerate.
inline TestResult kruskal_wallis(std::span<const SampleGroup> groups) {
  const auto pr = detail::pooled_ranks(groups, "kruskal_wallis");
  const double n = static_cast<double>(pr.total);
  const double k = static_cast<double>(groups.size());
  TestResult r;
  r.method = "Kruskal-Wallis H (tie-corrected)";
  r.df1 = k - 1.0;
  const double correction = 1.0 - pr.ties / (n * n * n - n);
  if (correction <= 0.0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.degenerate = true;
    return r;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < pr.sizes.size(); ++i) {
    sum += static_cast<double>(pr.sizes[i]) * pr.mean_rank[i] * pr.mean_rank[i];
  }
  // Single division at the end keeps integer rank sums exact.
  const double h = (12.0 * sum - 3.0 * n * (n + 1.0) * (n + 1.0)) / (n * (n + 1.0)) / correction;
  r.statistic = std::max(0.0, h);
  r.p_value = chi2_sf(r.statistic, r.df1);
  return r;
}

// Adjusts raw p-values in place order; Holm enforces monotonicity step-down.
inline std::vector<double> adjust_p_values(const std::vector<double>& raw, Correction method) {
  const std::size_t m = raw.size();
  std::vector<double> out(raw);
  if (method == Correction::none || m == 0) return out;
  if (method == Correction::bonferroni) {
    for (auto& p : out) p = std::min(1.0, p * static_cast<double>(m));
    return out;
  }
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return raw[a] < raw[b]; });
  double running = 0.0;
  for (std::size_t rank = 0; rank < m; ++rank) {
    const double adj = std::min(1.0, raw[order[rank]] * static_cast<double>(m - rank));
    running = std::max(running, adj);
    out[order[rank]] = running;
  }
  return out;
}

// Pairwise z on mean ranks of the pooled sample (upper triangle, i < j).
inline std::vector<PairwiseResult> dunn_posthoc(std::span<const SampleGroup> groups,
                                                Correction correction = Correction::holm) {
  const auto pr = detail::pooled_ranks(groups, "dunn_posthoc");
  const double n = static_cast<double>(pr.total);
  const double base = n * (n + 1.0) / 12.0 - (n > 1.0 ? pr.ties / (12.0 * (n - 1.0)) : 0.0);
  std::vector<PairwiseResult> out;
  std::vector<double> raw;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      PairwiseResult p;
      p.i = i;
      p.j = j;
      p.label_i = groups[i].label;
      p.label_j = groups[j].label;
      const double var = base * (1.0 / static_cast<double>(pr.sizes[i]) + 1.0 / static_cast<double>(pr.sizes[j]));
      p.z = var > 0.0 ? (pr.mean_rank[i] - pr.mean_rank[j]) / std::sqrt(var) : 0.0;
      p.p_raw = std::min(1.0, 2.0 * normal_sf(std::fabs(p.z)));
      p.correction = to_string(correction);
      raw.push_back(p.p_raw);
      out.push_back(p);
    }
  }
  const auto adj = adjust_p_values(raw, correction);
  for (std::size_t k = 0; k < out.size(); ++k) out[k].p_adjusted = adj[k];
  return out;
}

// ---------------------------------------------------------------------------
// Friedman
// ---------------------------------------------------------------------------

// blocks[i][j]: subject i under treatment j.
inline TestResult friedman(const std::vector<std::vector<double>>& blocks) {
  const std::size_t n = blocks.size();
  if (n < 2) throw SampleTooSmall("friedman: need at least two blocks");
  const std::size_t k = blocks.front().size();
  if (k < 2) throw SampleTooSmall("friedman: need at least two treatments");
  std::vector<double> rank_sums(k, 0.0);
  double ties = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (blocks[i].size() != k) throw IncompleteBlock("friedman: block " + std::to_string(i) + " is incomplete");
    detail::require_finite(blocks[i], "friedman");
    const auto ranks = rank_with_ties(blocks[i]);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
    ties += tie_term(blocks[i]);
  }
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  TestResult r;
  r.method = "Friedman chi-square (tie-corrected)";
  r.df1 = dk - 1.0;
  const double correction = 1.0 - ties / (dn * dk * (dk * dk - 1.0));
  if (correction <= 0.0) {
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.degenerate = true;
    return r;
  }
  double ss = 0.0;
  for (double rs : rank_sums) ss += rs * rs;
  const double chi2 = (12.0 / (dn * dk * (dk + 1.0)) * ss - 3.0 * dn * (dk + 1.0)) / correction;
  r.statistic = std::max(0.0, chi2);
  r.p_value = chi2_sf(r.statistic, r.df1);
  return r;
}

// ---------------------------------------------------------------------------
// Shapiro-Wilk (Royston 1995, algorithm AS R94)
// ---------------------------------------------------------------------------
namespace detail {
inline double poly(const double* c, int nord, double x) {
  double ret = c[0];
  if (nord > 1) {
    double p = x * c[nord - 1];
    for (int j = nord - 2; j > 0; --j) p = (p + c[j]) * x;
    ret += p;
  }
  return ret;
}
}  // namespace detail

inline TestResult shapiro_wilk(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 3) throw SampleTooSmall("shapiro_wilk: need n >= 3");
  if (n > 5000) throw SampleTooLarge("shapiro_wilk: n > 5000");
  detail::require_finite(values, "shapiro_wilk");
  std::vector<double> x(values.begin(), values.end());
  std::sort(x.begin(), x.end());
  const double range = x.back() - x.front();
  if (range < 1e-19) throw ZeroVariance("shapiro_wilk: all values identical");

  static const double g[] = {-2.273, 0.459};
  static const double c1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
  static const double c2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
  static const double c3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
  static const double c4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
  static const double c5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
  static const double c6[] = {-0.4803, -0.082676, 0.0030302};

  const std::size_t half = n / 2;
  const double an = static_cast<double>(n);
  std::vector<double> a(half);  // a[i] pairs with x[n-1-i] (positive) and x[i] (negative)
  if (n == 3) {
    a[0] = std::sqrt(0.5);
  } else {
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
      m[i] = normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
      summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = detail::poly(c1, 6, rsn) - m[0] / ssumm2;
    std::size_t first;
    double fac;
    if (n > 5) {
      first = 2;
      const double a2 = -m[1] / ssumm2 + detail::poly(c2, 6, rsn);
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
      a[1] = a2;
    } else {
      first = 1;
      fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
    }
    a[0] = a1;
    for (std::size_t i = first; i < half; ++i) a[i] = -m[i] / fac;
  }

  const double xbar = mean(x);
  double ssq = 0.0;
  for (double v : x) ssq += (v - xbar) * (v - xbar);
  double num = 0.0;
  for (std::size_t i = 0; i < half; ++i) num += a[i] * (x[n - 1 - i] - x[i]);
  double w = std::min(1.0, num * num / ssq);

  TestResult r;
  r.method = "Shapiro-Wilk W (Royston)";
  r.statistic = w;
  r.df1 = an;
  if (n == 3) {
    constexpr double pi6 = 1.90985931710274;   // 6/pi
    constexpr double stqr = 1.04719755119660;  // pi/3
    w = std::max(w, 0.75);
    r.statistic = w;
    r.p_value = std::clamp(pi6 * (std::asin(std::sqrt(w)) - stqr), 0.0, 1.0);
    return r;
  }
  const double w1 = std::log(1.0 - w);
  const double xx = std::log(an);
  double y = w1;
  double mu;
  double sigma;
  if (n <= 11) {
    const double gamma = detail::poly(g, 2, an);
    if (y >= gamma) {
      r.p_value = 1e-99;
      return r;
    }
    y = -std::log(gamma - y);
    mu = detail::poly(c3, 4, an);
    sigma = std::exp(detail::poly(c4, 4, an));
  } else {
    mu = detail::poly(c5, 4, xx);
    sigma = std::exp(detail::poly(c6, 3, xx));
  }
  r.p_value = std::clamp(normal_sf((y - mu) / sigma), 0.0, 1.0);
  return r;
}

// ---------------------------------------------------------------------------
// Levene / Brown-Forsythe
// ---------------------------------------------------------------------------
inline TestResult levene(std::span<const SampleGroup> groups) {
  if (groups.size() < 2) throw InvalidInput("levene: need at least two groups");
  std::vector<std::vector<double>> dev;
  std::size_t total = 0;
  for (const auto& g : groups) {
    if (g.values.size() < 2) throw SampleTooSmall("levene: group '" + g.label + "' needs n >= 2");
    detail::require_finite(g.values, "levene");
    const double med = median(g.values);
    std::vector<double> d;
    for (double v : g.values) d.push_back(std::fabs(v - med));
    total += d.size();
    dev.push_back(std::move(d));
  }
  const double k = static_cast<double>(groups.size());
  const double n = static_cast<double>(total);
  double grand = 0.0;
  for (const auto& d : dev) grand += std::accumulate(d.begin(), d.end(), 0.0);
  grand /= n;
  double between = 0.0;
  double within = 0.0;
  for (const auto& d : dev) {
    const double m = mean(d);
    between += static_cast<double>(d.size()) * (m - grand) * (m - grand);
    for (double v : d) within += (v - m) * (v - m);
  }
  TestResult r;
  r.method = "Levene (median-centred, Brown-Forsythe)";
  r.df1 = k - 1.0;
  r.df2 = n - k;
  if (within <= 0.0) {
    // All deviations identical within each group. Zero spread everywhere is
    // the degenerate "no evidence" case.
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.degenerate = true;
    if (between > 0.0) {
      r.statistic = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
    }
    return r;
  }
  r.statistic = (between / (k - 1.0)) / (within / (n - k));
  r.p_value = f_sf(r.statistic, r.df1, r.df2);
  return r;
}

// ---------------------------------------------------------------------------
// Effect sizes
// ---------------------------------------------------------------------------
inline double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw SampleTooSmall("cohens_d: both samples need n >= 2");
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double pooled = ((na - 1.0) * variance(a) + (nb - 1.0) * variance(b)) / (na + nb - 2.0);
  if (!(pooled > 0.0)) throw ZeroVariance("cohens_d: pooled variance is zero");
  return (mean(a) - mean(b)) / std::sqrt(pooled);
}

inline double cliffs_delta(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw SampleTooSmall("cliffs_delta: samples must be non-empty");
  long long greater = 0;
  long long less = 0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) ++greater;
      else if (x < y) ++less;
    }
  }
  return static_cast<double>(greater - less) / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

// (H - k + 1) / (n - k)
inline double eta_squared_h(double h, std::size_t k, std::size_t n) {
  if (n <= k) throw DegenerateSizes("eta_squared_h: need n > k");
  return (h - static_cast<double>(k) + 1.0) / static_cast<double>(n - k);
}

struct EffectSizes {
  double cohens_d = std::numeric_limits<double>::quiet_NaN();
  double cliffs_delta = 0.0;
  double eta_squared_h = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace scaffold::stats
