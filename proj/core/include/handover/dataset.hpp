#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "handover/effort.hpp"
#include "handover/optimizer.hpp"
#include "handover/output.hpp"
#include "handover/scene.hpp"

namespace handover::dataset {

// --- object library --------------------------------------------------------

struct ObjectEntry {
  std::string id;
  ShapeContext shape = ShapeContext::Cubic;
  std::string task;
  std::map<std::string, std::string> semantic_features;
};

struct ObjectLibrary {
  std::vector<ObjectEntry> objects;
  std::vector<std::string> study_ids;         // objects of the original study
  std::vector<std::string> default_test_ids;  // held out by default_split

  const ObjectEntry& find(std::string_view id) const;
  /// Objects whose ids are not in study_ids, in manifest order.
  std::vector<ObjectEntry> synthetic_objects() const;
  std::vector<ObjectEntry> study_objects() const;
};

/// JSON manifest {schema_version, objects:[{id,shape,task,semantic_features}],
/// study_objects:[ids], default_test_objects:[ids]}. Throws ParseError/ValidationError.
ObjectLibrary parse_library(std::string_view json_text);
ObjectLibrary load_library(const std::filesystem::path& path);

/// Canonical grasp set of a shape context, object frame, scaled uniformly.
std::vector<GraspCandidate> canonical_grasps(ShapeContext shape, double scale = 1.0);
double canonical_bounding_radius(ShapeContext shape, double scale = 1.0);
ObjectModel make_object_model(const ObjectEntry& entry, double scale = 1.0);

/// Receiver hand position used for each mobility level in generated scenes.
Vec3 canonical_hand(MobilityLevel level);
/// Shared workspace around canonical_hand(level) with the object placed in it.
Scene canonical_scene(MobilityLevel level, const ObjectModel& object);

// --- preference data ---------------------------------------------------------

/// Preference share of (MethodA, MethodB, Ours) per mobility level.
std::array<double, 3> preference_distribution(MobilityLevel level);
/// Participants per mobility level in kMobilityLevels order.
inline constexpr std::array<int, 4> kStudyParticipants{179, 27, 18, 35};
inline constexpr int kStudyTotal = 259;
inline constexpr int kSyntheticTotal = 1398;
inline constexpr int kCorpusTotal = kStudyTotal + kSyntheticTotal;
inline constexpr std::size_t kCorpusObjects = 32;

/// Integer counts proportional to weights summing exactly to total; leftover units
/// go to the largest fractional parts (earlier index on ties).
std::vector<int> largest_remainder(const std::vector<double>& weights, int total);

struct MethodRatings {
  int safety = 3;
  int comfort = 3;
  int appropriateness = 3;
};

struct PreferenceRecord {
  std::string participant_id;
  MobilityLevel mobility = MobilityLevel::H;
  std::string object_id;
  std::array<MethodRatings, 3> ratings;  // kMethods order
  MethodId preferred_method = MethodId::MethodA;
};

/// 259 study-shaped records over the library's study objects. Preferred-method
/// counts per level match the preference table exactly (largest remainder).
std::vector<PreferenceRecord> generate_study_records(const ObjectLibrary& library,
                                                     std::uint64_t seed = 42);

// --- handover instances -------------------------------------------------------

/// target_pose is expressed relative to the receiver hand: world position minus
/// hand position, world orientation unchanged.
struct HandoverInstance {
  std::string object_id;
  ShapeContext shape = ShapeContext::Cubic;
  MobilityLevel mobility = MobilityLevel::H;
  std::string task;
  MethodId method = MethodId::MethodA;
  Pose target_pose;
  std::string grasp_id;
};

struct GenerationOptions {
  std::uint64_t seed = 42;
  double jitter_position = 0.002;  // m, per-axis standard deviation
  double jitter_angle_deg = 0.5;   // per-axis standard deviation of the rotation vector
  int max_attempts = 10;
  SamplerConfig sampler;
};

/// Noise-free (world pose, robot grasp id) of a method in the canonical scene.
std::pair<Pose, std::string> method_target(MethodId method, const Scene& scene,
                                           const ReachModel& reach, const SamplerConfig& sampler);

struct SkippedInstance {
  std::size_t index = 0;
  std::string object_id;
  std::string reason;
};

struct GenerationResult {
  std::vector<HandoverInstance> instances;
  std::vector<SkippedInstance> skipped;
};

/// total instances over objects: mobility quotas proportional to the study
/// participant counts, method quotas per level from the preference table, the
/// (level, method) list shuffled by seed and dealt to objects round-robin.
GenerationResult synthesize(const std::vector<ObjectEntry>& objects, int total,
                            const GenerationOptions& opts);

/// One instance per record, produced by the record's preferred method.
GenerationResult convert_study(const std::vector<PreferenceRecord>& records,
                               const ObjectLibrary& library, const GenerationOptions& opts);

/// Concatenates study and synthetic instances. Throws CountMismatch unless the
/// sizes are 259 and 1398 and 32 distinct objects are covered.
std::vector<HandoverInstance> make_corpus(const std::vector<HandoverInstance>& study,
                                          const std::vector<HandoverInstance>& synthetic);

struct CorpusBuild {
  std::vector<HandoverInstance> corpus;
  std::vector<SkippedInstance> skipped;
};

/// Study records + synthesis + make_corpus with the default sizes.
CorpusBuild generate_corpus(const ObjectLibrary& library, const GenerationOptions& opts);

// --- split --------------------------------------------------------------------

struct SplitSpec {
  std::vector<std::string> train_object_ids;
  std::vector<std::string> test_object_ids;
  std::uint64_t seed = 42;

  /// Throws OverlapError when an id is on both sides.
  void validate() const;
};

/// Held-out ids from the manifest; everything else trains.
SplitSpec default_split(const ObjectLibrary& library, std::uint64_t seed = 42);
/// Seeded 70/30 object split (22/10 for 32 objects).
SplitSpec random_split(const ObjectLibrary& library, std::uint64_t seed);

/// Routes instances by object id. Instances of objects on neither side are dropped.
std::pair<std::vector<HandoverInstance>, std::vector<HandoverInstance>> split(
    const std::vector<HandoverInstance>& corpus, const SplitSpec& spec);

// --- files --------------------------------------------------------------------

/// Columns object_id, shape, mobility, task, method, px, py, pz, qw, qx, qy, qz, grasp_id.
std::string corpus_to_csv(const std::vector<HandoverInstance>& corpus, const OutputMeta& meta);
std::vector<HandoverInstance> parse_corpus_csv(std::string_view text);
std::vector<HandoverInstance> load_corpus(const std::filesystem::path& path);

std::string split_to_json(const SplitSpec& spec, const OutputMeta& meta);
SplitSpec parse_split_json(std::string_view text);

/// One row per (participant, method): subject, mobility, object_id, method, safety,
/// comfort, appropriateness, preferred. Readable by stats::parse_ratings_csv.
std::string study_records_to_csv(const std::vector<PreferenceRecord>& records, const OutputMeta& meta);

}  // namespace handover::dataset
