#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <set>

#include "handover/dataset.hpp"
#include "handover/errors.hpp"

using namespace handover;
using namespace handover::dataset;

namespace {

const ObjectLibrary& library() {
  static const ObjectLibrary lib = load_library(std::string(HANDOVER_DATA_DIR) + "/objects.json");
  return lib;
}

const CorpusBuild& default_build() {
  static const CorpusBuild build = generate_corpus(library(), GenerationOptions{});
  return build;
}

}  // namespace

TEST(Library, ShippedManifest) {
  const auto& lib = library();
  EXPECT_EQ(lib.objects.size(), kCorpusObjects);
  EXPECT_EQ(lib.study_ids.size(), 5u);
  EXPECT_EQ(lib.synthetic_objects().size(), 27u);
  EXPECT_EQ(lib.default_test_ids.size(), 10u);
  std::set<ShapeContext> shapes;
  for (const auto& o : lib.objects) shapes.insert(o.shape);
  EXPECT_EQ(shapes.size(), 4u);
  EXPECT_EQ(lib.find("glass").shape, ShapeContext::Cylindrical);
  EXPECT_THROW(lib.find("anvil"), ValidationError);
}

TEST(Library, ValidationPaths) {
  try {
    parse_library(R"({"schema_version":1,"objects":[{"id":"a","shape":"conic","task":"t"}]})");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.path(), "objects[0].shape");
  }
  EXPECT_THROW(parse_library(R"({"objects":[)"), ParseError);
  EXPECT_THROW(parse_library(R"({"schema_version":1,"objects":[{"id":"a","shape":"cubic","task":"t"},
                                 {"id":"a","shape":"cubic","task":"t"}]})"),
               ValidationError);
}

TEST(Canonical, GraspsHaveBothRoles) {
  for (auto s : kShapeContexts) {
    const auto g = canonical_grasps(s);
    ASSERT_FALSE(g.empty());
    EXPECT_TRUE(std::any_of(g.begin(), g.end(), [](const auto& x) { return x.in_affordance; }));
    EXPECT_TRUE(std::any_of(g.begin(), g.end(), [](const auto& x) { return !x.in_affordance; }));
    for (const auto& x : g) EXPECT_LE(x.pose.position.norm(), canonical_bounding_radius(s) + 1e-12);
    const auto big = canonical_grasps(s, 2.0);
    EXPECT_NEAR(big[0].pose.position.norm(), 2.0 * g[0].pose.position.norm(), 1e-12);
  }
}

TEST(Canonical, ScenesAreValid) {
  for (auto l : kMobilityLevels) {
    for (const auto& o : library().objects) {
      const Scene s = canonical_scene(l, make_object_model(o));
      EXPECT_NO_THROW(validate_scene(s));
      EXPECT_EQ(s.human.hand.position, canonical_hand(l));
    }
  }
}

TEST(Preference, TableSharesSumToOne) {
  for (auto l : kMobilityLevels) {
    const auto t = preference_distribution(l);
    EXPECT_NEAR(t[0] + t[1] + t[2], 1.0, 1e-9);
  }
  EXPECT_NEAR(preference_distribution(MobilityLevel::H)[1], 0.737, 1e-3);
  EXPECT_NEAR(preference_distribution(MobilityLevel::L)[2], 0.807, 1e-3);
}

TEST(Preference, LargestRemainder) {
  EXPECT_EQ(largest_remainder({1, 1, 1}, 10), (std::vector<int>{4, 3, 3}));
  EXPECT_EQ(largest_remainder({0.235, 0.737, 0.028}, 179), (std::vector<int>{42, 132, 5}));
  const auto v = largest_remainder({0.2, 0.3, 0.5}, 7);
  EXPECT_EQ(std::accumulate(v.begin(), v.end(), 0), 7);
  EXPECT_THROW(largest_remainder({0, 0}, 3), std::invalid_argument);
}

TEST(Preference, StudyRecordsFollowTheTable) {
  const auto recs = generate_study_records(library());
  ASSERT_EQ(recs.size(), static_cast<std::size_t>(kStudyTotal));
  std::map<MobilityLevel, std::array<int, 3>> counts;
  std::set<std::string> ids, objects;
  for (const auto& r : recs) {
    ++counts[r.mobility][static_cast<std::size_t>(r.preferred_method)];
    ids.insert(r.participant_id);
    objects.insert(r.object_id);
    const auto& pref = r.ratings[static_cast<std::size_t>(r.preferred_method)];
    for (std::size_t m = 0; m < 3; ++m) {
      EXPECT_LE(r.ratings[m].safety, 5);
      EXPECT_GE(r.ratings[m].safety, 1);
    }
    EXPECT_GE(pref.comfort, 4);
  }
  EXPECT_EQ(ids.size(), recs.size());
  EXPECT_EQ(objects.size(), 5u);
  for (std::size_t i = 0; i < kMobilityLevels.size(); ++i) {
    const auto level = kMobilityLevels[i];
    const auto t = preference_distribution(level);
    const auto expected = largest_remainder({t[0], t[1], t[2]}, kStudyParticipants[i]);
    for (std::size_t m = 0; m < 3; ++m) EXPECT_EQ(counts[level][m], expected[m]);
  }
}

TEST(Corpus, CountsAndObjects) {
  const auto& b = default_build();
  EXPECT_TRUE(b.skipped.empty());
  ASSERT_EQ(b.corpus.size(), 1657u);
  std::set<std::string> all, study;
  for (std::size_t i = 0; i < b.corpus.size(); ++i) {
    all.insert(b.corpus[i].object_id);
    if (i < static_cast<std::size_t>(kStudyTotal)) study.insert(b.corpus[i].object_id);
  }
  EXPECT_EQ(all.size(), 32u);
  EXPECT_EQ(study.size(), 5u);
  for (const auto& inst : b.corpus) EXPECT_TRUE(inst.target_pose.valid());
}

TEST(Corpus, PreferenceFrequenciesWithinTwoPoints) {
  std::map<MobilityLevel, std::array<double, 3>> counts;
  std::map<MobilityLevel, double> totals;
  for (const auto& inst : default_build().corpus) {
    counts[inst.mobility][static_cast<std::size_t>(inst.method)] += 1;
    totals[inst.mobility] += 1;
  }
  for (auto l : kMobilityLevels) {
    const auto t = preference_distribution(l);
    for (std::size_t m = 0; m < 3; ++m) {
      EXPECT_NEAR(100.0 * counts[l][m] / totals[l], 100.0 * t[m], 2.0) << to_string(l) << " method " << m;
    }
  }
}

TEST(Corpus, DeterministicUnderSeed) {
  const auto again = generate_corpus(library(), GenerationOptions{});
  const auto a = corpus_to_csv(default_build().corpus, OutputMeta{});
  EXPECT_EQ(corpus_to_csv(again.corpus, OutputMeta{}), a);
  GenerationOptions other;
  other.seed = 7;
  EXPECT_NE(corpus_to_csv(generate_corpus(library(), other).corpus, OutputMeta{}), a);
}

TEST(Corpus, ZeroJitterCollapsesToMethodTargets) {
  GenerationOptions opts;
  opts.jitter_position = 0.0;
  opts.jitter_angle_deg = 0.0;
  const auto b = generate_corpus(library(), opts);
  std::map<std::tuple<std::string, MobilityLevel, MethodId>, Pose> seen;
  for (const auto& inst : b.corpus) {
    const auto key = std::make_tuple(inst.object_id, inst.mobility, inst.method);
    auto [it, fresh] = seen.emplace(key, inst.target_pose);
    if (!fresh) {
      EXPECT_EQ(it->second.position, inst.target_pose.position);
      EXPECT_EQ(it->second.orientation.coeffs(), inst.target_pose.orientation.coeffs());
    }
  }
}

TEST(Corpus, MethodTargetsDiffer) {
  const auto obj = make_object_model(library().find("bottle"));
  const Scene s = canonical_scene(MobilityLevel::HM, obj);
  RadialBandReach reach;
  const auto a = method_target(MethodId::MethodA, s, reach, SamplerConfig{});
  const auto b = method_target(MethodId::MethodB, s, reach, SamplerConfig{});
  const auto o = method_target(MethodId::Ours, s, reach, SamplerConfig{});
  EXPECT_GT(point_distance(a.first, b.first), 0.1);
  EXPECT_GT(point_distance(b.first, o.first), 0.01);
  EXPECT_NE(obj.find_grasp(o.second), nullptr);
  EXPECT_FALSE(obj.find_grasp(o.second)->in_affordance);
}

TEST(Corpus, MakeCorpusChecksCounts) {
  const auto& c = default_build().corpus;
  const std::vector<HandoverInstance> study(c.begin(), c.begin() + kStudyTotal);
  const std::vector<HandoverInstance> synth(c.begin() + kStudyTotal, c.end());
  EXPECT_EQ(make_corpus(study, synth).size(), c.size());
  EXPECT_THROW(make_corpus({study.begin(), study.end() - 1}, synth), CountMismatch);
  EXPECT_THROW(make_corpus(study, {synth.begin(), synth.end() - 1}), CountMismatch);
  auto narrow = synth;
  for (auto& i : narrow) i.object_id = synth.front().object_id;
  EXPECT_THROW(make_corpus(study, narrow), CountMismatch);
}

TEST(Corpus, CsvRoundTripIsExact) {
  const auto& c = default_build().corpus;
  const auto back = parse_corpus_csv(corpus_to_csv(c, OutputMeta{}));
  ASSERT_EQ(back.size(), c.size());
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(back[i].object_id, c[i].object_id);
    EXPECT_EQ(back[i].method, c[i].method);
    EXPECT_EQ(back[i].grasp_id, c[i].grasp_id);
    EXPECT_EQ(back[i].target_pose.position, c[i].target_pose.position);
    EXPECT_EQ(back[i].target_pose.orientation.coeffs(), c[i].target_pose.orientation.coeffs());
  }
  EXPECT_THROW(parse_corpus_csv("object_id,shape\nx,cubic\n"), ParseError);
}

TEST(Split, DefaultIsTwentyTwoTen) {
  const auto s = default_split(library());
  EXPECT_EQ(s.train_object_ids.size(), 22u);
  EXPECT_EQ(s.test_object_ids.size(), 10u);
  EXPECT_NO_THROW(s.validate());
  const auto [train, test] = split(default_build().corpus, s);
  EXPECT_EQ(train.size() + test.size(), 1657u);
  std::set<std::string> train_ids, test_ids;
  for (const auto& i : train) train_ids.insert(i.object_id);
  for (const auto& i : test) test_ids.insert(i.object_id);
  EXPECT_EQ(train_ids.size(), 22u);
  EXPECT_EQ(test_ids.size(), 10u);
  for (const auto& id : test_ids) EXPECT_EQ(train_ids.count(id), 0u);
}

TEST(Split, RandomIsSeededAndDisjoint) {
  const auto a = random_split(library(), 5);
  const auto b = random_split(library(), 5);
  EXPECT_EQ(a.test_object_ids, b.test_object_ids);
  EXPECT_EQ(a.test_object_ids.size(), 10u);
  EXPECT_EQ(a.train_object_ids.size(), 22u);
  EXPECT_NO_THROW(a.validate());
  EXPECT_NE(random_split(library(), 6).test_object_ids, a.test_object_ids);
}

TEST(Split, OverlapIsRejected) {
  auto s = default_split(library());
  s.train_object_ids.push_back(s.test_object_ids.front());
  EXPECT_THROW(s.validate(), OverlapError);
  EXPECT_THROW(parse_split_json(split_to_json(s, OutputMeta{})), OverlapError);
}

TEST(Split, JsonRoundTrip) {
  const auto s = random_split(library(), 9);
  const auto back = parse_split_json(split_to_json(s, OutputMeta{}));
  EXPECT_EQ(back.train_object_ids, s.train_object_ids);
  EXPECT_EQ(back.test_object_ids, s.test_object_ids);
  EXPECT_EQ(back.seed, s.seed);
}

TEST(StudyCsv, ReadableAsRatings) {
  const auto recs = generate_study_records(library());
  const auto csv = study_records_to_csv(recs, OutputMeta{});
  size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  EXPECT_EQ(lines, 2 + 3 * recs.size());
}
