#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// They recompute everything from the definitions with plain loops and share no
// code with the library beyond data types and the pose sampler.

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "handover/mln.hpp"
#include "handover/optimizer.hpp"
#include "handover/scene.hpp"
#include "handover/stats.hpp"

namespace oracle {

using namespace handover;

// --- optimizer ---------------------------------------------------------------

struct BruteForceResult {
  std::string robot_grasp;
  Pose object_pose;
  VoxelIndex voxel;
  std::size_t sample_index = 0;
  double safety = 0.0;
  double reachability = 0.0;
};

/// Every robot grasp, every voxel, every sample. Grasp with the largest distance
/// to its closest human grasp (smallest id on ties); voxels ranked by center
/// distance to the hand then (x, y, z); per voxel the reach-feasible sample with
/// the highest safety, earliest on ties; first voxel whose winner is safe and
/// reachable. nullopt when none qualifies.
std::optional<BruteForceResult> brute_force_handover(const Scene& scene, const ReachModel& reach,
                                                     const SamplerConfig& cfg);

/// Random scene with map dims in [2, max_dim]^3 and 2..max_grasps grasps.
Scene random_scene(std::uint64_t seed, int max_dim = 6, int max_grasps = 6);

// --- MLN -----------------------------------------------------------------------

/// n_i(x) by direct substitution over the first-order model; the world is the set
/// of true atom names such as "p(a,b)". Identical ground clauses count once.
std::vector<double> truth_table_counts(const mln::MlnModel& model, const std::set<std::string>& true_atoms);

/// All atom names of the model, predicates in declaration order, last argument fastest.
std::vector<std::string> all_atom_names(const mln::MlnModel& model);

/// Probability of every world, worlds enumerated as bitmasks over all_atom_names.
std::vector<double> world_probabilities(const mln::MlnModel& model);

/// Exhaustive MAP over the Unknown atoms. Ties go to the lexicographically smallest
/// completion in atom order with false < true.
mln::World exhaustive_map(const mln::MlnModel& model, const mln::Evidence& evidence, double tol = 1e-9);

/// Random model over predicates p(d), q(d,d) or r(e) with small domains.
mln::MlnModel random_model(std::uint64_t seed, std::size_t max_atoms, std::size_t formulas);

// --- statistics ------------------------------------------------------------------

struct DefinitionalAnova {
  double ss_a = 0, ss_sa = 0, ss_b = 0, ss_ab = 0, ss_err = 0;
  int df_a = 0, df_sa = 0, df_b = 0, df_ab = 0, df_err = 0;
  double f_a = 0, f_b = 0, f_ab = 0;
  double p_a = 1, p_b = 1, p_ab = 1;
};

/// Textbook mixed-design formulas from cell, subject and marginal means, with
/// Boost's F distribution for the tails. Requires a balanced design.
DefinitionalAnova definitional_anova(const std::vector<stats::RatingRecord>& data);

/// Exact two-sided rank-sum p by enumerating every split of the pooled ranks.
double enumerate_rank_sum_p(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace oracle
