#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "handover/output.hpp"

namespace handover::stats {

enum class RankSumMethod { Exact, NormalApprox };
std::string_view to_string(RankSumMethod method);

struct RankSumResult {
  double statistic = 0.0;  // Mann-Whitney U of the first sample
  double p_value = 1.0;    // two-sided
  RankSumMethod method = RankSumMethod::Exact;
};

inline constexpr std::size_t kExactRankSumCap = 12;

/// Wilcoxon-Mann-Whitney test. Exact null distribution when the pooled size is at
/// most 12 and there are no ties; otherwise normal approximation with midranks,
/// tie correction and a 0.5 continuity correction. Throws EmptySample.
RankSumResult rank_sum(std::span<const double> a, std::span<const double> b);

struct RatingRecord {
  std::string subject;
  std::string mobility;  // between-subject factor
  std::string method;    // within-subject factor
  double rating = 0.0;
};

struct AnovaRow {
  std::string effect;  // "mobility", "method", "interaction"
  double ss = 0.0;
  int df1 = 0;
  int df2 = 0;
  double F = 0.0;
  double p_value = 1.0;
};

struct AnovaResult {
  std::vector<AnovaRow> rows;  // mobility, method, interaction
  double ss_total = 0.0;
  double ss_between_subjects = 0.0;
  double ss_within = 0.0;
  double ss_subjects_within_groups = 0.0;
  double ss_error = 0.0;

  const AnovaRow& row(std::string_view effect) const;
};

/// Mixed-design ANOVA: mobility between subjects, method within subjects.
/// Throws UnbalancedWithin when a subject lacks (or repeats) a method rating and
/// InvalidDesign for inconsistent or degenerate designs.
AnovaResult mixed_anova(const std::vector<RatingRecord>& data);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double incomplete_beta(double a, double b, double x);
/// P(F > f) for F(d1, d2).
double f_survival(double f, double d1, double d2);
double normal_cdf(double z);

/// CSV with header columns subject, mobility, method and the rating column (any
/// order, extra columns ignored, '#' lines skipped).
std::vector<RatingRecord> parse_ratings_csv(std::string_view text,
                                            const std::string& rating_column = "rating");
std::string ratings_to_csv(const std::vector<RatingRecord>& data, const OutputMeta& meta);

/// CSV with header columns sample, value; exactly two distinct sample labels, in
/// order of first appearance.
struct TwoSamples {
  std::string label_a, label_b;
  std::vector<double> a, b;
};
TwoSamples parse_samples_csv(std::string_view text);

std::string anova_to_csv(const AnovaResult& result, const OutputMeta& meta);
std::string rank_sum_to_csv(const RankSumResult& result, const OutputMeta& meta);

}  // namespace handover::stats
