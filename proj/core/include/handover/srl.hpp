#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "handover/dataset.hpp"
#include "handover/mln.hpp"
#include "handover/optimizer.hpp"
#include "handover/stats.hpp"

namespace handover::srl {

// --- prototypes ----------------------------------------------------------------

using PrototypeKey = std::tuple<ShapeContext, MobilityLevel, MethodId>;

struct Prototype {
  Pose pose;           // hand-relative, like HandoverInstance::target_pose
  std::string grasp;   // modal robot grasp id
  std::size_t support = 0;
};

struct PrototypeTable {
  std::map<PrototypeKey, Prototype> entries;

  const Prototype* find(const PrototypeKey& key) const;
};

/// "<shape>:<level>:<method>", the objectConfiguration constant of a key.
std::string config_class(const PrototypeKey& key);
PrototypeKey parse_config_class(std::string_view text);

/// Per key: mean position, hemisphere-aligned normalized mean quaternion, modal
/// grasp (ties to the lexicographically smallest id). Throws std::invalid_argument
/// on empty input.
PrototypeTable build_prototypes(const std::vector<dataset::HandoverInstance>& train);

// --- MLN schema ----------------------------------------------------------------

inline constexpr std::string_view kObjectConstant = "O";
inline constexpr std::string_view kQueryConstant = "Q";

/// Weight of the pairwise exclusivity clauses. They are fixed during learning, so
/// only the implications compete on frequency.
inline constexpr double kExclusivityWeight = 20.0;

/// Domains from the prototypes and the tasks seen per shape, one soft implication
/// per (shape, task, level) and consequent, plus fixed pairwise exclusivity clauses
/// among the configurations of each (shape, level) and the grasps of each shape.
/// Learnable weights start at zero.
mln::MlnModel build_handover_model(const PrototypeTable& prototypes,
                                   const std::vector<dataset::HandoverInstance>& train);

/// One world per instance. The configuration atom is the key of the instance's
/// (shape, level) whose prototype pose is nearest the target; the grasp atom is
/// that prototype's grasp. Throws UncoveredKey when no prototype exists for the
/// instance's (shape, level).
std::vector<mln::World> corpus_to_worlds(const std::vector<dataset::HandoverInstance>& corpus,
                                         const PrototypeTable& prototypes,
                                         const mln::GroundModel& gm);

// --- training and inference ------------------------------------------------------

struct TrainMeta {
  int iterations = 0;
  double initial_pll = 0.0;
  double final_pll = 0.0;
  bool converged = false;
  std::size_t train_instances = 0;
};

struct TrainedModel {
  std::uint64_t seed = 42;
  mln::MlnModel mln;
  PrototypeTable prototypes;
  dataset::SplitSpec split;
  TrainMeta train_meta;
};

struct TrainOptions {
  std::uint64_t seed = 42;
  mln::LearnOptions learn;
};

/// Prototypes and MLN from the train side of the split only.
TrainedModel train(const std::vector<dataset::HandoverInstance>& corpus, const dataset::SplitSpec& split,
                   const TrainOptions& opts = {});

struct HandoverQuery {
  ShapeContext shape = ShapeContext::Cubic;
  std::string task;
  MobilityLevel mobility = MobilityLevel::H;
};

struct InferenceResult {
  PrototypeKey key;
  Pose object_pose;  // hand-relative
  std::string robot_grasp;
};

/// MAP completion with the query clamped as evidence. Throws UnknownDomainValue
/// for values outside the model domains and NoWinningAtom when no configuration
/// or grasp atom comes out true.
InferenceResult infer_handover(const TrainedModel& model, const HandoverQuery& query);

/// Grounded model cached for repeated queries.
class Inferencer {
 public:
  explicit Inferencer(const TrainedModel& model);
  InferenceResult infer(const HandoverQuery& query) const;

 private:
  const TrainedModel* model_;
  mln::GroundModel gm_;
};

// --- end-to-end execution --------------------------------------------------------

struct GateCheck {
  int step = 0;
  std::string gate;  // obj_to_hand, obj_to_face, ee_to_hand, reach
  double distance = 0.0;
  double threshold = 0.0;
  bool passed = true;
};

struct EndToEndResult {
  InferenceResult inference;
  Pose object_pose;  // world frame
  Pose ee_pose;
  std::string robot_grasp;
  std::string advised_human_grasp;
  Pose advised_grasp_world;
  ComponentDistances distances;
  double reach_distance = 0.0;
  std::vector<GateCheck> trace;
};

inline constexpr int kApproachSteps = 10;

/// Infers the transfer configuration for the scene's object, computes the
/// end-effector pose and walks the object from halfway along the robot-to-target
/// segment to the target in kApproachSteps steps. Every step checks the three
/// clearance gates (>= 0.05 m); the final step also checks hand-to-advised-grasp
/// distance (<= 0.75 m). Throws SafetyGateFailed on the first failing gate, with
/// the partial trace available through the out parameter.
EndToEndResult run_end_to_end(const Scene& scene, MobilityLevel mobility, const std::string& task,
                              const TrainedModel& model, const ReachModel& reach,
                              std::vector<GateCheck>* trace_out = nullptr);

std::string end_to_end_to_json(const EndToEndResult& result, const OutputMeta& meta);

// --- evaluation ------------------------------------------------------------------

inline constexpr double kPoseTolerance = 0.005;        // m
inline constexpr double kAngleToleranceDeg = 2.0;

struct AccuracyRow {
  std::string shape;
  std::vector<std::string> objects;
  std::size_t instances = 0;
  double pose_accuracy = 0.0;   // percent
  double grasp_accuracy = 0.0;  // percent
  double average = 0.0;
};

struct AccuracyReport {
  std::vector<AccuracyRow> rows;  // shapes present in the test set, kShapeContexts order
  AccuracyRow overall;
  std::size_t failed_inferences = 0;
};

/// Failed inferences count as incorrect on both columns.
AccuracyReport evaluate(const TrainedModel& model, const std::vector<dataset::HandoverInstance>& test);

/// Columns shape, objects, pose_acc, grasp_acc, average; last row "overall".
std::string accuracy_to_csv(const AccuracyReport& report, const OutputMeta& meta);

// --- grasp distance report -------------------------------------------------------

struct GraspDistanceRow {
  ShapeContext shape = ShapeContext::Cubic;
  std::vector<double> manipulation_cm;
  std::vector<double> handover_cm;
  double manipulation_mean_cm = 0.0;
  double handover_mean_cm = 0.0;
  stats::RankSumResult test;
};

struct GraspReportOptions {
  std::uint64_t seed = 42;
  int instances_per_object = 5;
  double min_scale = 0.85;
  double max_scale = 1.15;
};

/// Manipulation mode grasps the in-affordance candidate nearest the object center;
/// handover mode uses select_robot_grasp. Rows for shapes present, kShapeContexts order.
std::vector<GraspDistanceRow> grasp_distance_report(const std::vector<dataset::ObjectEntry>& objects,
                                                    const GraspReportOptions& opts = {});

/// Long format: shape, mode, distance_cm. One row per sample.
std::string grasp_samples_to_csv(const std::vector<GraspDistanceRow>& rows, const OutputMeta& meta);
/// shape, manipulation_mean_cm, handover_mean_cm, U, p_value, method.
std::string grasp_summary_to_csv(const std::vector<GraspDistanceRow>& rows, const OutputMeta& meta);

// --- files -----------------------------------------------------------------------

/// {schema_version, seed, mln, prototypes, split, train_meta}
std::string trained_model_to_json(const TrainedModel& model, const OutputMeta& meta);
TrainedModel parse_trained_model(std::string_view json_text);
TrainedModel load_trained_model(const std::filesystem::path& path);

std::string inference_to_json(const InferenceResult& result, const OutputMeta& meta);

}  // namespace handover::srl
