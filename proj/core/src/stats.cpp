#include "handover/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "csv.hpp"
#include "handover/errors.hpp"

namespace handover::stats {

std::string_view to_string(RankSumMethod method) {
  return method == RankSumMethod::Exact ? "exact" : "normal_approx";
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double f_survival(double f, double d1, double d2) {
  if (std::isnan(f)) return 1.0;
  if (f <= 0.0) return 1.0;
  if (std::isinf(f)) return 0.0;
  return incomplete_beta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * f));
}

RankSumResult rank_sum(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySample("rank_sum needs two non-empty samples");
  const std::size_t na = a.size(), nb = b.size(), n = na + nb;

  std::vector<std::pair<double, int>> pooled;  // value, 0 = a / 1 = b
  pooled.reserve(n);
  for (double v : a) pooled.push_back({v, 0});
  for (double v : b) pooled.push_back({v, 1});
  std::sort(pooled.begin(), pooled.end());

  double rank_a = 0.0;
  double tie_term = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    const double t = static_cast<double>(j - i);
    if (t > 1) ties = true;
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second == 0) rank_a += mid;
    }
    i = j;
  }
  const double u = rank_a - static_cast<double>(na * (na + 1)) / 2.0;

  RankSumResult res;
  res.statistic = u;
  if (n <= kExactRankSumCap && !ties) {
    res.method = RankSumMethod::Exact;
    std::size_t le = 0, ge = 0, total = 0;
    const double base = static_cast<double>(na * (na + 1)) / 2.0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (static_cast<std::size_t>(std::popcount(mask)) != na) continue;
      double r = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (mask & (1u << k)) r += static_cast<double>(k + 1);
      }
      const double uu = r - base;
      ++total;
      if (uu <= u) ++le;
      if (uu >= u) ++ge;
    }
    const double tail = static_cast<double>(std::min(le, ge)) / static_cast<double>(total);
    res.p_value = std::min(1.0, 2.0 * tail);
    return res;
  }

  res.method = RankSumMethod::NormalApprox;
  const double dna = static_cast<double>(na), dnb = static_cast<double>(nb), dn = static_cast<double>(n);
  const double mu = dna * dnb / 2.0;
  const double var = dna * dnb / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (!(var > 0.0)) {
    res.p_value = 1.0;
    return res;
  }
  const double z = std::max(0.0, std::abs(u - mu) - 0.5) / std::sqrt(var);
  res.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return res;
}

const AnovaRow& AnovaResult::row(std::string_view effect) const {
  for (const auto& r : rows) {
    if (r.effect == effect) return r;
  }
  throw std::out_of_range("no ANOVA row '" + std::string(effect) + "'");
}

AnovaResult mixed_anova(const std::vector<RatingRecord>& data) {
  if (data.empty()) throw InvalidDesign("no ratings");
  std::set<std::string> group_set, cond_set;
  std::map<std::string, std::string> subject_group;
  for (const auto& r : data) {
    if (!std::isfinite(r.rating)) throw InvalidDesign("non-finite rating for subject '" + r.subject + "'");
    group_set.insert(r.mobility);
    cond_set.insert(r.method);
    auto [it, inserted] = subject_group.emplace(r.subject, r.mobility);
    if (!inserted && it->second != r.mobility) {
      throw InvalidDesign("subject '" + r.subject + "' appears under mobility levels '" + it->second +
                          "' and '" + r.mobility + "'");
    }
  }
  const std::vector<std::string> groups(group_set.begin(), group_set.end());
  const std::vector<std::string> conds(cond_set.begin(), cond_set.end());
  const std::size_t a = groups.size(), b = conds.size(), N = subject_group.size();
  if (a < 2) throw InvalidDesign("need at least two mobility levels");
  if (b < 2) throw InvalidDesign("need at least two methods");
  if (N <= a) throw InvalidDesign("need more subjects than mobility levels");

  std::map<std::string, std::size_t> subj_idx, group_idx, cond_idx;
  for (const auto& [s, g] : subject_group) subj_idx.emplace(s, subj_idx.size());
  for (std::size_t i = 0; i < a; ++i) group_idx[groups[i]] = i;
  for (std::size_t i = 0; i < b; ++i) cond_idx[conds[i]] = i;

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<double>> y(N, std::vector<double>(b, nan));
  std::vector<std::size_t> subj_group(N);
  for (const auto& r : data) {
    const std::size_t s = subj_idx.at(r.subject), k = cond_idx.at(r.method);
    if (!std::isnan(y[s][k])) {
      throw UnbalancedWithin("subject '" + r.subject + "' rated method '" + r.method + "' twice");
    }
    y[s][k] = r.rating;
    subj_group[s] = group_idx.at(r.mobility);
  }
  for (const auto& [name, s] : subj_idx) {
    for (std::size_t k = 0; k < b; ++k) {
      if (std::isnan(y[s][k])) {
        throw UnbalancedWithin("subject '" + name + "' has no rating for method '" + conds[k] + "'");
      }
    }
  }

  const double db = static_cast<double>(b);
  double grand = 0.0, sum_sq = 0.0;
  for (const auto& row : y) {
    for (double v : row) {
      grand += v;
      sum_sq += v * v;
    }
  }
  grand /= static_cast<double>(N * b);

  std::vector<double> subj_mean(N, 0.0), cond_mean(b, 0.0), group_mean(a, 0.0);
  std::vector<std::vector<double>> cell_mean(a, std::vector<double>(b, 0.0));
  std::vector<double> group_n(a, 0.0);
  double ss_total = 0.0;
  for (std::size_t s = 0; s < N; ++s) {
    const std::size_t g = subj_group[s];
    group_n[g] += 1.0;
    for (std::size_t k = 0; k < b; ++k) {
      const double v = y[s][k];
      ss_total += (v - grand) * (v - grand);
      subj_mean[s] += v / db;
      cond_mean[k] += v;
      cell_mean[g][k] += v;
    }
  }
  for (std::size_t k = 0; k < b; ++k) cond_mean[k] /= static_cast<double>(N);
  for (std::size_t g = 0; g < a; ++g) {
    double total = 0.0;
    for (std::size_t k = 0; k < b; ++k) {
      total += cell_mean[g][k];
      cell_mean[g][k] /= group_n[g];
    }
    group_mean[g] = total / (group_n[g] * db);
  }

  double ss_bs = 0.0;
  for (double m : subj_mean) ss_bs += db * (m - grand) * (m - grand);
  double ss_group = 0.0;
  for (std::size_t g = 0; g < a; ++g) ss_group += db * group_n[g] * (group_mean[g] - grand) * (group_mean[g] - grand);
  double ss_cond = 0.0;
  for (double m : cond_mean) ss_cond += static_cast<double>(N) * (m - grand) * (m - grand);
  double ss_cells = 0.0;
  for (std::size_t g = 0; g < a; ++g) {
    for (std::size_t k = 0; k < b; ++k) {
      ss_cells += group_n[g] * (cell_mean[g][k] - grand) * (cell_mean[g][k] - grand);
    }
  }

  // Rounding noise below this is treated as an exact zero.
  const double eps = 1e-13 * std::max(sum_sq, std::numeric_limits<double>::min());
  auto clean = [eps](double v) { return v < eps ? 0.0 : v; };

  AnovaResult res;
  res.ss_total = clean(ss_total);
  res.ss_between_subjects = clean(ss_bs);
  res.ss_within = clean(ss_total - ss_bs);
  res.ss_subjects_within_groups = clean(ss_bs - ss_group);
  const double ss_axb = clean(ss_cells - ss_group - ss_cond);
  res.ss_error = clean(ss_total - ss_bs - ss_cond - ss_axb);
  ss_group = clean(ss_group);
  ss_cond = clean(ss_cond);

  const int df_group = static_cast<int>(a - 1), df_sw = static_cast<int>(N - a);
  const int df_cond = static_cast<int>(b - 1), df_axb = df_group * df_cond, df_err = df_cond * df_sw;

  auto make_row = [](std::string effect, double ss, int df1, double ss_den, int df2) {
    AnovaRow r{std::move(effect), ss, df1, df2, 0.0, 1.0};
    if (ss == 0.0) return r;
    if (ss_den == 0.0) {
      r.F = std::numeric_limits<double>::infinity();
      r.p_value = 0.0;
      return r;
    }
    r.F = (ss / df1) / (ss_den / df2);
    r.p_value = f_survival(r.F, df1, df2);
    return r;
  };
  res.rows.push_back(make_row("mobility", ss_group, df_group, res.ss_subjects_within_groups, df_sw));
  res.rows.push_back(make_row("method", ss_cond, df_cond, res.ss_error, df_err));
  res.rows.push_back(make_row("interaction", ss_axb, df_axb, res.ss_error, df_err));
  return res;
}

std::vector<RatingRecord> parse_ratings_csv(std::string_view text, const std::string& rating_column) {
  const auto t = detail::parse_csv(text);
  const auto cs = t.column("subject"), cm = t.column("mobility"), ch = t.column("method"),
             cr = t.column(rating_column);
  std::vector<RatingRecord> out;
  for (const auto& row : t.rows) {
    out.push_back({row[cs], row[cm], row[ch], detail::parse_double(row[cr], rating_column)});
  }
  return out;
}

std::string ratings_to_csv(const std::vector<RatingRecord>& data, const OutputMeta& meta) {
  std::string out = meta.csv_preamble() + "subject,mobility,method,rating\n";
  for (const auto& r : data) {
    out += r.subject + "," + r.mobility + "," + r.method + "," + detail::format_double(r.rating) + "\n";
  }
  return out;
}

TwoSamples parse_samples_csv(std::string_view text) {
  const auto t = detail::parse_csv(text);
  const auto cs = t.column("sample"), cv = t.column("value");
  TwoSamples out;
  for (const auto& row : t.rows) {
    const double v = detail::parse_double(row[cv], "value");
    if (out.label_a.empty() || row[cs] == out.label_a) {
      out.label_a = row[cs];
      out.a.push_back(v);
    } else if (out.label_b.empty() || row[cs] == out.label_b) {
      out.label_b = row[cs];
      out.b.push_back(v);
    } else {
      throw ParseError("samples csv: more than two sample labels");
    }
  }
  if (out.a.empty() || out.b.empty()) throw EmptySample("samples csv needs two non-empty samples");
  return out;
}

std::string anova_to_csv(const AnovaResult& result, const OutputMeta& meta) {
  std::string out = meta.csv_preamble() + "effect,ss,df1,df2,F,p_value\n";
  for (const auto& r : result.rows) {
    out += r.effect + "," + detail::format_double(r.ss) + "," + std::to_string(r.df1) + "," +
           std::to_string(r.df2) + "," + detail::format_double(r.F) + "," +
           detail::format_double(r.p_value) + "\n";
  }
  return out;
}

std::string rank_sum_to_csv(const RankSumResult& result, const OutputMeta& meta) {
  return meta.csv_preamble() + "statistic,p_value,method\n" + detail::format_double(result.statistic) +
         "," + detail::format_double(result.p_value) + "," + std::string(to_string(result.method)) + "\n";
}

}  // namespace handover::stats
