#include <gtest/gtest.h>

#include <cmath>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "handover/errors.hpp"
#include "handover/random.hpp"
#include "handover/stats.hpp"
#include "oracles.hpp"

using namespace handover;
using namespace handover::stats;

namespace {

std::vector<RatingRecord> textbook_fixture() {
  // 2 mobility groups x 4 subjects, 2 methods each
  const double r[8][2] = {{3, 5}, {4, 6}, {2, 5}, {3, 4}, {5, 5}, {6, 7}, {4, 6}, {5, 8}};
  std::vector<RatingRecord> out;
  for (int s = 0; s < 8; ++s) {
    for (int m = 0; m < 2; ++m) {
      out.push_back({"s" + std::to_string(s), s < 4 ? "H" : "L", m == 0 ? "MethodA" : "Ours", r[s][m]});
    }
  }
  return out;
}

std::vector<RatingRecord> random_design(Rng& rng, int groups, int per_group, int methods) {
  std::vector<RatingRecord> out;
  for (int g = 0; g < groups; ++g) {
    for (int s = 0; s < per_group; ++s) {
      const double subject_effect = rng.normal();
      for (int m = 0; m < methods; ++m) {
        out.push_back({"g" + std::to_string(g) + "s" + std::to_string(s), "G" + std::to_string(g),
                       "M" + std::to_string(m), 3 + subject_effect + rng.normal() + 0.3 * m});
      }
    }
  }
  return out;
}

}  // namespace

TEST(RankSum, ExactFixture) {
  const std::vector<double> a{1, 2, 3}, b{10, 11, 12};
  const auto r = rank_sum(a, b);
  EXPECT_EQ(r.method, RankSumMethod::Exact);
  EXPECT_DOUBLE_EQ(r.statistic, 0.0);
  EXPECT_NEAR(r.p_value, 0.1, 1e-12);
  EXPECT_NEAR(r.p_value, oracle::enumerate_rank_sum_p(a, b), 1e-12);
}

TEST(RankSum, IdenticalSamplesGiveOne) {
  const std::vector<double> a{1, 2, 3, 4}, b{1, 2, 3, 4};
  EXPECT_NEAR(rank_sum(a, b).p_value, 1.0, 1e-12);
}

TEST(RankSum, ExactMatchesEnumerationOnRandomSamples) {
  Rng rng(12);
  for (int t = 0; t < 40; ++t) {
    const std::size_t na = 1 + rng.below(6), nb = 1 + rng.below(12 - na);
    std::vector<double> a(na), b(nb);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal(0.5, 1.0);
    const auto r = rank_sum(a, b);
    EXPECT_EQ(r.method, RankSumMethod::Exact);
    EXPECT_NEAR(r.p_value, oracle::enumerate_rank_sum_p(a, b), 1e-12);
  }
}

TEST(RankSum, TiesUseNormalApproximation) {
  const std::vector<double> a{1, 2, 2, 3}, b{2, 4, 5};
  EXPECT_EQ(rank_sum(a, b).method, RankSumMethod::NormalApprox);
}

TEST(RankSum, NormalApproximationByHand) {
  std::vector<double> a, b;
  for (int i = 0; i < 10; ++i) a.push_back(i);
  for (int i = 0; i < 10; ++i) b.push_back(i + 5.5);
  const auto r = rank_sum(a, b);
  EXPECT_EQ(r.method, RankSumMethod::NormalApprox);
  // U of a: 5 values below all of b plus 5 values each beating 0..4 of b
  const double u = 0 + 0 + 0 + 0 + 0 + 0 + 1 + 2 + 3 + 4;
  const double mu = 50.0, sigma = std::sqrt(10.0 * 10.0 * 21.0 / 12.0);
  const double z = (std::abs(u - mu) - 0.5) / sigma;
  const double p = 2.0 * boost::math::cdf(boost::math::complement(boost::math::normal(), z));
  EXPECT_DOUBLE_EQ(r.statistic, u);
  EXPECT_NEAR(r.p_value, p, 1e-9);
}

TEST(RankSum, EmptyThrows) {
  const std::vector<double> a{1.0}, none;
  EXPECT_THROW(rank_sum(a, none), EmptySample);
  EXPECT_THROW(rank_sum(none, a), EmptySample);
}

TEST(RankSum, FalsePositiveRateCalibrated) {
  Rng rng(2024);
  int rejections = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> a(15), b(15);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    rejections += rank_sum(a, b).p_value < 0.05;
  }
  EXPECT_NEAR(rejections / 10.0, 5.0, 2.0);
}

TEST(Distributions, IncompleteBetaMatchesBoost) {
  for (double a : {0.5, 1.0, 2.5, 10.0}) {
    for (double b : {0.7, 1.0, 4.0, 30.0}) {
      for (double x : {0.0, 0.01, 0.3, 0.5, 0.9, 1.0}) {
        EXPECT_NEAR(incomplete_beta(a, b, x), boost::math::ibeta(a, b, x), 1e-12);
      }
    }
  }
}

TEST(Distributions, FSurvivalMatchesBoost) {
  for (double d1 : {1.0, 2.0, 5.0}) {
    for (double d2 : {3.0, 12.0, 250.0}) {
      for (double f : {0.1, 1.0, 3.5, 20.0}) {
        const double expected =
            boost::math::cdf(boost::math::complement(boost::math::fisher_f_distribution<>(d1, d2), f));
        EXPECT_NEAR(f_survival(f, d1, d2), expected, 1e-12);
      }
    }
  }
}

TEST(Anova, TextbookFixtureMatchesDefinitionalFormulas) {
  const auto data = textbook_fixture();
  const auto r = mixed_anova(data);
  const auto d = oracle::definitional_anova(data);
  EXPECT_NEAR(r.row("mobility").F, d.f_a, 1e-9);
  EXPECT_NEAR(r.row("method").F, d.f_b, 1e-9);
  EXPECT_NEAR(r.row("interaction").F, d.f_ab, 1e-9);
  EXPECT_NEAR(r.row("mobility").p_value, d.p_a, 1e-9);
  EXPECT_NEAR(r.row("method").p_value, d.p_b, 1e-9);
  EXPECT_EQ(r.row("mobility").df1, 1);
  EXPECT_EQ(r.row("mobility").df2, 6);
  EXPECT_EQ(r.row("method").df2, 6);
  EXPECT_NEAR(r.ss_total, r.ss_between_subjects + r.ss_within, 1e-9);
}

TEST(Anova, RandomBalancedDesigns) {
  Rng rng(77);
  for (int t = 0; t < 20; ++t) {
    const int groups = 2 + static_cast<int>(rng.below(3));
    const int per = 2 + static_cast<int>(rng.below(5));
    const int methods = 2 + static_cast<int>(rng.below(3));
    const auto data = random_design(rng, groups, per, methods);
    const auto r = mixed_anova(data);
    const auto d = oracle::definitional_anova(data);
    EXPECT_NEAR(r.row("mobility").F, d.f_a, 1e-9 * std::max(1.0, d.f_a));
    EXPECT_NEAR(r.row("method").F, d.f_b, 1e-9 * std::max(1.0, d.f_b));
    EXPECT_NEAR(r.row("interaction").F, d.f_ab, 1e-9 * std::max(1.0, d.f_ab));
    EXPECT_NEAR(r.ss_error, d.ss_err, 1e-9);
  }
}

TEST(Anova, UnequalGroupSizesStillBalancedWithin) {
  auto data = textbook_fixture();
  data.push_back({"s8", "L", "MethodA", 4});
  data.push_back({"s8", "L", "Ours", 6});
  const auto r = mixed_anova(data);
  const auto d = oracle::definitional_anova(data);
  EXPECT_NEAR(r.row("mobility").F, d.f_a, 1e-9);
  EXPECT_NEAR(r.row("method").F, d.f_b, 1e-9);
}

TEST(Anova, DesignErrors) {
  auto missing = textbook_fixture();
  missing.pop_back();
  EXPECT_THROW(mixed_anova(missing), UnbalancedWithin);

  auto twice = textbook_fixture();
  twice.push_back(twice.front());
  EXPECT_THROW(mixed_anova(twice), UnbalancedWithin);

  auto one_group = textbook_fixture();
  for (auto& r : one_group) r.mobility = "H";
  EXPECT_THROW(mixed_anova(one_group), InvalidDesign);

  auto moved = textbook_fixture();
  moved[0].mobility = "L";
  EXPECT_THROW(mixed_anova(moved), InvalidDesign);

  EXPECT_THROW(mixed_anova({}), InvalidDesign);
}

TEST(Csv, RatingsRoundTripAndColumnChoice) {
  const auto data = textbook_fixture();
  const auto back = parse_ratings_csv(ratings_to_csv(data, OutputMeta{}));
  ASSERT_EQ(back.size(), data.size());
  EXPECT_EQ(back[3].subject, data[3].subject);
  EXPECT_EQ(back[3].rating, data[3].rating);

  const std::string text =
      "# comment\nmethod,comfort,subject,extra,mobility\nA,4,p1,x,H\nB,2,p1,y,H\n";
  const auto parsed = parse_ratings_csv(text, "comfort");
  ASSERT_EQ(parsed.size(), 2u);
  EXPECT_EQ(parsed[1].rating, 2.0);
  EXPECT_THROW(parse_ratings_csv(text, "safety"), ParseError);
}

TEST(Csv, TwoSamples) {
  const auto s = parse_samples_csv("sample,value\nx,1\ny,2\nx,3\n");
  EXPECT_EQ(s.label_a, "x");
  EXPECT_EQ(s.a, (std::vector<double>{1, 3}));
  EXPECT_EQ(s.b, (std::vector<double>{2}));
  EXPECT_THROW(parse_samples_csv("sample,value\nx,1\ny,2\nz,3\n"), ParseError);
  EXPECT_THROW(parse_samples_csv("sample,value\nx,1\n"), EmptySample);
}
