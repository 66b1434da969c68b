#include "handover/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <tuple>

#include "handover/errors.hpp"
#include "handover/random.hpp"

namespace handover::dataset {

namespace {

// Seed streams, one per consumer.
constexpr std::uint64_t kStudyPairsStream = 0x5354'5544'5900'0001ULL;
constexpr std::uint64_t kStudyRatingsStream = 0x5354'5544'5900'0002ULL;
constexpr std::uint64_t kStudyJitterStream = 0x5354'5544'5900'0003ULL;
constexpr std::uint64_t kSynthPairsStream = 0x5359'4e54'4800'0001ULL;
constexpr std::uint64_t kSynthJitterStream = 0x5359'4e54'4800'0002ULL;
constexpr std::uint64_t kSplitStream = 0x5350'4c49'5400'0001ULL;

GraspCandidate grasp(const char* id, double x, double y, double z, bool human, double s) {
  return {id, Pose::at(x * s, y * s, z * s), human};
}

Pose jittered(const Pose& p, Rng& rng, const GenerationOptions& opts) {
  Pose out = p;
  for (int axis = 0; axis < 3; ++axis) out.position[axis] += rng.normal(0.0, opts.jitter_position);
  const double sigma = opts.jitter_angle_deg * std::numbers::pi / 180.0;
  Vec3 rv;
  for (int axis = 0; axis < 3; ++axis) rv[axis] = rng.normal(0.0, sigma);
  const double angle = rv.norm();
  if (angle > 0.0) {
    out.orientation = (p.orientation * Quat(Eigen::AngleAxisd(angle, rv / angle))).normalized();
  }
  return out;
}

using TargetKey = std::tuple<ShapeContext, MobilityLevel, MethodId>;
using TargetCache = std::map<TargetKey, std::pair<Pose, std::string>>;

// Noise-free targets depend only on shape geometry, level and method.
const std::pair<Pose, std::string>& cached_target(TargetCache& cache, const ObjectEntry& obj,
                                                  MobilityLevel level, MethodId method,
                                                  const GenerationOptions& opts) {
  const TargetKey key{obj.shape, level, method};
  auto it = cache.find(key);
  if (it == cache.end()) {
    const Scene scene = canonical_scene(level, make_object_model(obj));
    const RadialBandReach reach;
    it = cache.emplace(key, method_target(method, scene, reach, opts.sampler)).first;
  }
  return it->second;
}

struct Job {
  const ObjectEntry* object;
  MobilityLevel level;
  MethodId method;
};

GenerationResult generate(const std::vector<Job>& jobs, std::uint64_t jitter_stream,
                          const GenerationOptions& opts) {
  GenerationResult res;
  TargetCache cache;
  const std::uint64_t base = derive_seed(opts.seed, jitter_stream);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Job& job = jobs[i];
    std::string last_error;
    bool done = false;
    for (int attempt = 0; attempt < std::max(1, opts.max_attempts) && !done; ++attempt) {
      try {
        const auto& [pose, grasp_id] = cached_target(cache, *job.object, job.level, job.method, opts);
        Rng rng(derive_seed(base, static_cast<std::uint64_t>(i) * 16 + attempt));
        Pose target = jittered(pose, rng, opts);
        if (!target.valid()) throw Error("jittered pose is not finite");
        target.position -= canonical_hand(job.level);
        res.instances.push_back({job.object->id, job.object->shape, job.level, job.object->task,
                                 job.method, target, grasp_id});
        done = true;
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    if (!done) res.skipped.push_back({i, job.object->id, last_error});
  }
  return res;
}

}  // namespace

// --- library ---------------------------------------------------------------

const ObjectEntry& ObjectLibrary::find(std::string_view id) const {
  for (const auto& o : objects) {
    if (o.id == id) return o;
  }
  throw ValidationError("objects", "unknown object '" + std::string(id) + "'");
}

std::vector<ObjectEntry> ObjectLibrary::synthetic_objects() const {
  std::vector<ObjectEntry> out;
  for (const auto& o : objects) {
    if (std::find(study_ids.begin(), study_ids.end(), o.id) == study_ids.end()) out.push_back(o);
  }
  return out;
}

std::vector<ObjectEntry> ObjectLibrary::study_objects() const {
  std::vector<ObjectEntry> out;
  for (const auto& id : study_ids) out.push_back(find(id));
  return out;
}

std::vector<GraspCandidate> canonical_grasps(ShapeContext shape, double s) {
  switch (shape) {
    case ShapeContext::Cylindrical: {
      const double r = 0.035;
      return {grasp("top", 0, 0.09, r, false, s), grasp("upper", 0, 0.045, r, true, s),
              grasp("middle", 0, 0, r, true, s), grasp("lower", 0, -0.045, r, false, s),
              grasp("base", 0, -0.09, r, false, s)};
    }
    case ShapeContext::Cubic:
      return {grasp("center_top", 0, 0.03, 0, true, s), grasp("left_end", -0.06, 0, 0, false, s),
              grasp("right_end", 0.06, 0, 0, false, s), grasp("front_face", 0, 0, 0.04, true, s),
              grasp("corner", 0.06, 0.03, -0.04, false, s)};
    case ShapeContext::Spherical: {
      const double r = 0.06;
      return {grasp("top", 0, r, 0, true, s),    grasp("bottom", 0, -r, 0, false, s),
              grasp("left", -r, 0, 0, false, s), grasp("right", r, 0, 0, false, s),
              grasp("front", 0, 0, r, false, s), grasp("back", 0, 0, -r, false, s)};
    }
    case ShapeContext::Irregular:
      return {grasp("head", 0.08, 0.01, 0, false, s), grasp("neck", 0.04, 0, 0, false, s),
              grasp("grip", -0.02, 0, 0, true, s),    grasp("tail", -0.08, 0, 0, false, s),
              grasp("side", 0, 0.02, 0.01, true, s)};
  }
  throw std::invalid_argument("unknown shape");
}

double canonical_bounding_radius(ShapeContext shape, double scale) {
  switch (shape) {
    case ShapeContext::Cylindrical: return 0.12 * scale;
    case ShapeContext::Cubic: return 0.10 * scale;
    case ShapeContext::Spherical: return 0.08 * scale;
    case ShapeContext::Irregular: return 0.10 * scale;
  }
  throw std::invalid_argument("unknown shape");
}

ObjectModel make_object_model(const ObjectEntry& entry, double scale) {
  ObjectModel m;
  m.id = entry.id;
  m.shape = entry.shape;
  m.task = entry.task;
  m.semantic_features = entry.semantic_features;
  m.grasps = canonical_grasps(entry.shape, scale);
  m.bounding_radius = canonical_bounding_radius(entry.shape, scale);
  return m;
}

Vec3 canonical_hand(MobilityLevel level) {
  switch (level) {
    case MobilityLevel::H: return {1.00, 1.00, 0.15};
    case MobilityLevel::HM: return {1.05, 0.97, 0.15};
    case MobilityLevel::LM: return {1.10, 0.93, 0.15};
    case MobilityLevel::L: return {1.15, 0.90, 0.15};
  }
  throw std::invalid_argument("unknown mobility level");
}

Scene canonical_scene(MobilityLevel level, const ObjectModel& object) {
  Scene s;
  const Vec3 hand = canonical_hand(level);
  s.map = VoxelMap(hand - Vec3::Constant(0.3), 0.05, {12, 12, 12});
  s.human.hand = Pose(hand);
  s.human.face = Pose::at(1.30, 1.20, 0.0);
  s.human.mobility = level;
  s.human.task = object.task;
  s.object = object;
  s.robot_base = Pose::at(0.0, 0.85, 0.0);
  return s;
}

// --- preference data -------------------------------------------------------

std::array<double, 3> preference_distribution(MobilityLevel level) {
  switch (level) {
    case MobilityLevel::H: return {0.235, 0.737, 0.028};
    case MobilityLevel::HM: return {0.231, 0.654, 0.115};
    case MobilityLevel::LM: return {0.071, 0.286, 0.643};
    case MobilityLevel::L: return {0.032, 0.161, 0.807};
  }
  throw std::invalid_argument("unknown mobility level");
}

std::vector<int> largest_remainder(const std::vector<double>& weights, int total) {
  if (weights.empty()) throw std::invalid_argument("largest_remainder needs weights");
  if (total < 0) throw std::invalid_argument("largest_remainder needs total >= 0");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw std::invalid_argument("weights must not all be zero");
  std::vector<int> out(weights.size());
  std::vector<std::pair<double, std::size_t>> frac;
  int assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = weights[i] / sum * total;
    out[i] = static_cast<int>(std::floor(exact));
    assigned += out[i];
    frac.push_back({exact - out[i], i});
  }
  std::stable_sort(frac.begin(), frac.end(),
                   [](const auto& x, const auto& y) { return x.first > y.first; });
  for (int k = 0; k < total - assigned; ++k) ++out[frac[static_cast<std::size_t>(k) % frac.size()].second];
  return out;
}

namespace {

std::vector<std::pair<MobilityLevel, MethodId>> level_method_pairs(const std::vector<int>& level_counts) {
  std::vector<std::pair<MobilityLevel, MethodId>> pairs;
  for (std::size_t l = 0; l < kMobilityLevels.size(); ++l) {
    const auto dist = preference_distribution(kMobilityLevels[l]);
    const auto counts = largest_remainder({dist[0], dist[1], dist[2]}, level_counts[l]);
    for (std::size_t m = 0; m < 3; ++m) {
      for (int k = 0; k < counts[m]; ++k) pairs.push_back({kMobilityLevels[l], kMethods[m]});
    }
  }
  return pairs;
}

}  // namespace

std::vector<PreferenceRecord> generate_study_records(const ObjectLibrary& library, std::uint64_t seed) {
  if (library.study_ids.empty()) throw ValidationError("study_objects", "no study objects");
  auto pairs = level_method_pairs({kStudyParticipants.begin(), kStudyParticipants.end()});
  Rng shuffle_rng(derive_seed(seed, kStudyPairsStream));
  shuffle_rng.shuffle(pairs.begin(), pairs.end());

  const std::uint64_t rating_base = derive_seed(seed, kStudyRatingsStream);
  std::vector<PreferenceRecord> out;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    PreferenceRecord r;
    char id[16];
    std::snprintf(id, sizeof id, "P%03zu", i + 1);
    r.participant_id = id;
    r.mobility = pairs[i].first;
    r.preferred_method = pairs[i].second;
    r.object_id = library.study_ids[i % library.study_ids.size()];
    Rng rng(derive_seed(rating_base, i));
    for (std::size_t m = 0; m < 3; ++m) {
      const bool preferred = kMethods[m] == r.preferred_method;
      auto draw = [&] { return preferred ? 4 + static_cast<int>(rng.below(2)) : 1 + static_cast<int>(rng.below(4)); };
      r.ratings[m].safety = draw();
      r.ratings[m].comfort = draw();
      r.ratings[m].appropriateness = draw();
    }
    out.push_back(std::move(r));
  }
  return out;
}

// --- instances -------------------------------------------------------------

std::pair<Pose, std::string> method_target(MethodId method, const Scene& scene,
                                           const ReachModel& reach, const SamplerConfig& sampler) {
  switch (method) {
    case MethodId::MethodA: {
      const auto candidates = robot_grasp_candidates(scene.object);
      if (candidates.empty()) throw NoRobotGrasp("object '" + scene.object.id + "' has no robot grasp candidate");
      return {Pose(body_relative_point(scene, kMethodADistance)), candidates.front().id};
    }
    case MethodId::MethodB:
      return {Pose(body_relative_point(scene, kMethodBDistance)), select_robot_grasp(scene.object).id};
    case MethodId::Ours: {
      const auto sol = optimize_handover(scene, reach, sampler);
      return {sol.object_pose, sol.robot_grasp};
    }
  }
  throw std::invalid_argument("unknown method");
}

GenerationResult synthesize(const std::vector<ObjectEntry>& objects, int total,
                            const GenerationOptions& opts) {
  if (objects.empty()) throw std::invalid_argument("synthesize needs objects");
  if (total < 1) throw std::invalid_argument("synthesize needs total >= 1");
  const auto level_counts =
      largest_remainder({kStudyParticipants.begin(), kStudyParticipants.end()}, total);
  auto pairs = level_method_pairs(level_counts);
  Rng rng(derive_seed(opts.seed, kSynthPairsStream));
  rng.shuffle(pairs.begin(), pairs.end());

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    jobs.push_back({&objects[i % objects.size()], pairs[i].first, pairs[i].second});
  }
  return generate(jobs, kSynthJitterStream, opts);
}

GenerationResult convert_study(const std::vector<PreferenceRecord>& records,
                               const ObjectLibrary& library, const GenerationOptions& opts) {
  std::vector<Job> jobs;
  for (const auto& r : records) jobs.push_back({&library.find(r.object_id), r.mobility, r.preferred_method});
  return generate(jobs, kStudyJitterStream, opts);
}

std::vector<HandoverInstance> make_corpus(const std::vector<HandoverInstance>& study,
                                          const std::vector<HandoverInstance>& synthetic) {
  if (study.size() != static_cast<std::size_t>(kStudyTotal)) {
    throw CountMismatch("expected " + std::to_string(kStudyTotal) + " study instances, got " +
                        std::to_string(study.size()));
  }
  if (synthetic.size() != static_cast<std::size_t>(kSyntheticTotal)) {
    throw CountMismatch("expected " + std::to_string(kSyntheticTotal) + " synthetic instances, got " +
                        std::to_string(synthetic.size()));
  }
  std::vector<HandoverInstance> corpus = study;
  corpus.insert(corpus.end(), synthetic.begin(), synthetic.end());
  std::set<std::string> ids;
  for (const auto& inst : corpus) ids.insert(inst.object_id);
  if (ids.size() != kCorpusObjects) {
    throw CountMismatch("expected " + std::to_string(kCorpusObjects) + " objects, got " +
                        std::to_string(ids.size()));
  }
  return corpus;
}

CorpusBuild generate_corpus(const ObjectLibrary& library, const GenerationOptions& opts) {
  const auto records = generate_study_records(library, opts.seed);
  auto study = convert_study(records, library, opts);
  auto synth = synthesize(library.synthetic_objects(), kSyntheticTotal, opts);
  CorpusBuild out;
  out.skipped = study.skipped;
  for (auto s : synth.skipped) {
    s.index += records.size();
    out.skipped.push_back(std::move(s));
  }
  out.corpus = make_corpus(study.instances, synth.instances);
  return out;
}

// --- split -----------------------------------------------------------------

void SplitSpec::validate() const {
  const std::set<std::string> train(train_object_ids.begin(), train_object_ids.end());
  for (const auto& id : test_object_ids) {
    if (train.count(id)) throw OverlapError("object '" + id + "' is in both train and test");
  }
}

SplitSpec default_split(const ObjectLibrary& library, std::uint64_t seed) {
  SplitSpec spec;
  spec.seed = seed;
  spec.test_object_ids = library.default_test_ids;
  for (const auto& o : library.objects) {
    if (std::find(spec.test_object_ids.begin(), spec.test_object_ids.end(), o.id) == spec.test_object_ids.end()) {
      spec.train_object_ids.push_back(o.id);
    }
  }
  return spec;
}

SplitSpec random_split(const ObjectLibrary& library, std::uint64_t seed) {
  std::vector<std::string> ids;
  for (const auto& o : library.objects) ids.push_back(o.id);
  Rng rng(derive_seed(seed, kSplitStream));
  rng.shuffle(ids.begin(), ids.end());
  const auto n_test = static_cast<std::size_t>(std::lround(0.3 * static_cast<double>(ids.size())));
  SplitSpec spec;
  spec.seed = seed;
  spec.test_object_ids.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n_test));
  spec.train_object_ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(n_test), ids.end());
  std::sort(spec.test_object_ids.begin(), spec.test_object_ids.end());
  std::sort(spec.train_object_ids.begin(), spec.train_object_ids.end());
  return spec;
}

std::pair<std::vector<HandoverInstance>, std::vector<HandoverInstance>> split(
    const std::vector<HandoverInstance>& corpus, const SplitSpec& spec) {
  spec.validate();
  const std::set<std::string> train(spec.train_object_ids.begin(), spec.train_object_ids.end());
  const std::set<std::string> test(spec.test_object_ids.begin(), spec.test_object_ids.end());
  std::pair<std::vector<HandoverInstance>, std::vector<HandoverInstance>> out;
  for (const auto& inst : corpus) {
    if (train.count(inst.object_id)) {
      out.first.push_back(inst);
    } else if (test.count(inst.object_id)) {
      out.second.push_back(inst);
    }
  }
  return out;
}

}  // namespace handover::dataset
