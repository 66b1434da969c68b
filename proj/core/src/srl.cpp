#include "handover/srl.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "handover/errors.hpp"
#include "handover/random.hpp"
#include "handover/threading.hpp"

namespace handover::srl {

using dataset::HandoverInstance;

namespace {

constexpr const char* kHasShape = "hasShape";
constexpr const char* kHasTask = "hasTask";
constexpr const char* kHasMobility = "hasMobility";
constexpr const char* kGraspRegion = "graspRegion";
constexpr const char* kObjectConfiguration = "objectConfiguration";

mln::Literal lit(const std::string& pred, std::vector<std::string> args, bool negated = false) {
  mln::Literal l;
  l.negated = negated;
  l.predicate = pred;
  for (auto& a : args) l.args.push_back({false, std::move(a)});
  return l;
}

std::size_t atom_or_throw(const mln::AtomTable& atoms, const std::string& pred,
                          const std::vector<std::string>& args) {
  auto a = atoms.find(pred, args);
  if (!a) {
    std::string text = pred + "(";
    for (std::size_t i = 0; i < args.size(); ++i) text += (i ? "," : "") + args[i];
    throw UnknownDomainValue("atom " + text + ") is outside the model domains");
  }
  return *a;
}

std::string obj() { return std::string(kObjectConstant); }
std::string qry() { return std::string(kQueryConstant); }

}  // namespace

// --- prototypes ----------------------------------------------------------------

const Prototype* PrototypeTable::find(const PrototypeKey& key) const {
  auto it = entries.find(key);
  return it == entries.end() ? nullptr : &it->second;
}

std::string config_class(const PrototypeKey& key) {
  const auto& [shape, level, method] = key;
  return std::string(to_string(shape)) + ":" + std::string(to_string(level)) + ":" +
         std::string(to_string(method));
}

PrototypeKey parse_config_class(std::string_view text) {
  const auto a = text.find(':');
  const auto b = a == std::string_view::npos ? a : text.find(':', a + 1);
  if (b == std::string_view::npos) throw ParseError("bad configuration class '" + std::string(text) + "'");
  return {parse_shape(text.substr(0, a)), parse_mobility(text.substr(a + 1, b - a - 1)),
          parse_method(text.substr(b + 1))};
}

PrototypeTable build_prototypes(const std::vector<HandoverInstance>& train) {
  if (train.empty()) throw std::invalid_argument("build_prototypes needs training instances");
  std::map<PrototypeKey, std::vector<const HandoverInstance*>> groups;
  for (const auto& inst : train) groups[{inst.shape, inst.mobility, inst.method}].push_back(&inst);

  PrototypeTable table;
  for (const auto& [key, members] : groups) {
    Vec3 pos = Vec3::Zero();
    Eigen::Vector4d q = Eigen::Vector4d::Zero();
    const Quat& ref = members.front()->target_pose.orientation;
    std::map<std::string, std::size_t> votes;
    for (const auto* m : members) {
      pos += m->target_pose.position;
      const Quat& o = m->target_pose.orientation;
      const double sign = o.coeffs().dot(ref.coeffs()) < 0.0 ? -1.0 : 1.0;
      q += sign * o.coeffs();
      ++votes[m->grasp_id];
    }
    Prototype p;
    p.pose.position = pos / static_cast<double>(members.size());
    Quat mean;
    mean.coeffs() = q;
    p.pose.orientation = mean.normalized();
    std::size_t best = 0;
    for (const auto& [g, n] : votes) {
      if (n > best) {
        best = n;
        p.grasp = g;
      }
    }
    p.support = members.size();
    table.entries.emplace(key, std::move(p));
  }
  return table;
}

// --- MLN schema ----------------------------------------------------------------

mln::MlnModel build_handover_model(const PrototypeTable& prototypes,
                                   const std::vector<HandoverInstance>& train) {
  mln::MlnModel m;
  m.domains["obj"] = {obj()};
  m.domains["query"] = {qry()};
  for (auto s : kShapeContexts) m.domains["shape"].emplace_back(to_string(s));
  for (auto l : kMobilityLevels) m.domains["level"].emplace_back(to_string(l));

  std::set<std::string> tasks, grasps;
  std::set<std::tuple<ShapeContext, std::string, MobilityLevel>> triples;
  for (const auto& inst : train) {
    tasks.insert(inst.task);
    triples.insert({inst.shape, inst.task, inst.mobility});
  }
  for (const auto& [key, p] : prototypes.entries) grasps.insert(p.grasp);
  m.domains["task"].assign(tasks.begin(), tasks.end());
  m.domains["grasp_class"].assign(grasps.begin(), grasps.end());
  for (const auto& [key, p] : prototypes.entries) m.domains["config_class"].push_back(config_class(key));

  m.predicates = {{kHasShape, {"obj", "shape"}},
                  {kHasTask, {"obj", "task"}},
                  {kHasMobility, {"query", "level"}},
                  {kGraspRegion, {"query", "grasp_class"}},
                  {kObjectConfiguration, {"query", "config_class"}}};
  m.query_predicates = {kGraspRegion, kObjectConfiguration};

  // consequents per (shape, level) and grasps per shape
  std::map<std::pair<ShapeContext, MobilityLevel>, std::vector<std::string>> configs;
  std::map<ShapeContext, std::set<std::string>> shape_grasps;
  for (const auto& [key, p] : prototypes.entries) {
    configs[{std::get<0>(key), std::get<1>(key)}].push_back(config_class(key));
    shape_grasps[std::get<0>(key)].insert(p.grasp);
  }

  auto add = [&](std::vector<mln::Literal> lits) { m.formulas.push_back({std::move(lits), 0.0, false}); };
  auto add_exclusive = [&](mln::Literal a, mln::Literal b) {
    m.formulas.push_back({{std::move(a), std::move(b)}, kExclusivityWeight, true});
  };
  for (const auto& [shape, task, level] : triples) {
    const std::string s(to_string(shape)), l(to_string(level));
    auto premise = [&] {
      return std::vector<mln::Literal>{lit(kHasShape, {obj(), s}, true), lit(kHasTask, {obj(), task}, true),
                                       lit(kHasMobility, {qry(), l}, true)};
    };
    auto it = configs.find({shape, level});
    if (it == configs.end()) continue;
    for (const auto& c : it->second) {
      auto lits = premise();
      lits.push_back(lit(kObjectConfiguration, {qry(), c}));
      add(std::move(lits));
    }
    for (const auto& g : shape_grasps[shape]) {
      auto lits = premise();
      lits.push_back(lit(kGraspRegion, {qry(), g}));
      add(std::move(lits));
    }
  }
  for (const auto& [sl, cs] : configs) {
    for (std::size_t i = 0; i < cs.size(); ++i) {
      for (std::size_t j = i + 1; j < cs.size(); ++j) {
        add_exclusive(lit(kObjectConfiguration, {qry(), cs[i]}, true), lit(kObjectConfiguration, {qry(), cs[j]}, true));
      }
    }
  }
  for (const auto& [shape, gs] : shape_grasps) {
    const std::vector<std::string> v(gs.begin(), gs.end());
    for (std::size_t i = 0; i < v.size(); ++i) {
      for (std::size_t j = i + 1; j < v.size(); ++j) {
        add_exclusive(lit(kGraspRegion, {qry(), v[i]}, true), lit(kGraspRegion, {qry(), v[j]}, true));
      }
    }
  }
  m.validate();
  return m;
}

std::vector<mln::World> corpus_to_worlds(const std::vector<HandoverInstance>& corpus,
                                         const PrototypeTable& prototypes, const mln::GroundModel& gm) {
  std::vector<mln::World> worlds;
  worlds.reserve(corpus.size());
  for (const auto& inst : corpus) {
    const PrototypeKey* best_key = nullptr;
    const Prototype* best = nullptr;
    double best_d = kInfinity;
    for (const auto& [key, p] : prototypes.entries) {
      if (std::get<0>(key) != inst.shape || std::get<1>(key) != inst.mobility) continue;
      const double d = point_distance(p.pose, inst.target_pose);
      if (d < best_d) {
        best_d = d;
        best_key = &key;
        best = &p;
      }
    }
    if (!best) {
      throw UncoveredKey("no prototype for shape " + std::string(to_string(inst.shape)) + " at level " +
                         std::string(to_string(inst.mobility)));
    }
    mln::World w(gm.atoms.size(), 0);
    w[atom_or_throw(gm.atoms, kHasShape, {obj(), std::string(to_string(inst.shape))})] = 1;
    w[atom_or_throw(gm.atoms, kHasTask, {obj(), inst.task})] = 1;
    w[atom_or_throw(gm.atoms, kHasMobility, {qry(), std::string(to_string(inst.mobility))})] = 1;
    w[atom_or_throw(gm.atoms, kObjectConfiguration, {qry(), config_class(*best_key)})] = 1;
    w[atom_or_throw(gm.atoms, kGraspRegion, {qry(), best->grasp})] = 1;
    worlds.push_back(std::move(w));
  }
  return worlds;
}

// --- training and inference ------------------------------------------------------

TrainedModel train(const std::vector<HandoverInstance>& corpus, const dataset::SplitSpec& split_spec,
                   const TrainOptions& opts) {
  const auto [train_set, test_set] = dataset::split(corpus, split_spec);
  (void)test_set;
  if (train_set.empty()) throw std::invalid_argument("training split is empty");

  TrainedModel out;
  out.seed = opts.seed;
  out.split = split_spec;
  out.prototypes = build_prototypes(train_set);
  out.mln = build_handover_model(out.prototypes, train_set);

  const mln::GroundModel gm = mln::ground(out.mln);
  const auto worlds = corpus_to_worlds(train_set, out.prototypes, gm);
  auto learn = opts.learn;
  learn.query_atoms_only = true;
  const auto learned = mln::learn_weights(gm, worlds, learn);
  out.mln.set_weights(learned.weights);

  out.train_meta.iterations = learned.iterations;
  out.train_meta.converged = learned.converged;
  out.train_meta.initial_pll = mln::pseudo_log_likelihood(gm, gm.weights, worlds, nullptr, true);
  out.train_meta.final_pll = mln::pseudo_log_likelihood(gm, learned.weights, worlds, nullptr, true);
  out.train_meta.train_instances = train_set.size();
  return out;
}

Inferencer::Inferencer(const TrainedModel& model) : model_(&model), gm_(mln::ground(model.mln)) {}

InferenceResult Inferencer::infer(const HandoverQuery& query) const {
  const auto& atoms = gm_.atoms;
  mln::Evidence ev(atoms.size(), mln::Truth::False);
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    if (gm_.query_atom[a]) ev[a] = mln::Truth::Unknown;
  }
  ev[atom_or_throw(atoms, kHasShape, {obj(), std::string(to_string(query.shape))})] = mln::Truth::True;
  ev[atom_or_throw(atoms, kHasTask, {obj(), query.task})] = mln::Truth::True;
  ev[atom_or_throw(atoms, kHasMobility, {qry(), std::string(to_string(query.mobility))})] = mln::Truth::True;

  const auto res = mln::map_infer(gm_, ev);

  auto first_true = [&](const char* pred) -> std::optional<std::string> {
    const auto* p = model_->mln.find_predicate(pred);
    std::size_t pi = 0;
    for (; pi < model_->mln.predicates.size(); ++pi) {
      if (&model_->mln.predicates[pi] == p) break;
    }
    const auto [b, e] = atoms.range(pi);
    for (std::size_t a = b; a < e; ++a) {
      if (res.world[a]) return atoms.arguments(a).back();
    }
    return std::nullopt;
  };
  const auto config = first_true(kObjectConfiguration);
  const auto grasp = first_true(kGraspRegion);
  const std::string what = std::string(to_string(query.shape)) + "/" + query.task + "/" +
                           std::string(to_string(query.mobility));
  if (!config) throw NoWinningAtom("no object configuration inferred for " + what);
  if (!grasp) throw NoWinningAtom("no grasp region inferred for " + what);

  InferenceResult out;
  out.key = parse_config_class(*config);
  const Prototype* p = model_->prototypes.find(out.key);
  if (!p) throw NoWinningAtom("configuration " + *config + " has no prototype");
  out.object_pose = p->pose;
  out.robot_grasp = *grasp;
  return out;
}

InferenceResult infer_handover(const TrainedModel& model, const HandoverQuery& query) {
  return Inferencer(model).infer(query);
}

// --- end-to-end execution --------------------------------------------------------

EndToEndResult run_end_to_end(const Scene& scene, MobilityLevel mobility, const std::string& task,
                              const TrainedModel& model, const ReachModel& reach,
                              std::vector<GateCheck>* trace_out) {
  EndToEndResult out;
  out.inference = infer_handover(model, {scene.object.shape, task, mobility});

  const Pose target(scene.human.hand.position + out.inference.object_pose.position,
                    out.inference.object_pose.orientation);
  const GraspCandidate* grasp = scene.object.find_grasp(out.inference.robot_grasp);
  if (!grasp || grasp->in_affordance) grasp = &select_robot_grasp(scene.object);
  const Pose grasp_world = target.compose(grasp->pose);
  const auto ee = reach.end_effector(target, grasp_world, scene.robot_base);
  if (!ee) throw NoFeasibleHandover("robot cannot realise grasp '" + grasp->id + "' at the inferred pose");

  out.object_pose = target;
  out.ee_pose = *ee;
  out.robot_grasp = grasp->id;

  auto fail = [&](const GateCheck& g) {
    if (trace_out) *trace_out = out.trace;
    throw SafetyGateFailed(g.gate, g.distance, g.threshold);
  };
  auto check = [&](int step, const char* gate, double d, double threshold, bool ok) {
    out.trace.push_back({step, gate, d, threshold, ok});
    if (!ok) fail(out.trace.back());
  };

  const Vec3 start = scene.robot_base.position + 0.5 * (target.position - scene.robot_base.position);
  for (int k = 0; k <= kApproachSteps; ++k) {
    const double t = static_cast<double>(k) / kApproachSteps;
    const Vec3 offset = (start + t * (target.position - start)) - target.position;
    const Pose obj_k = k == kApproachSteps ? target : target.translated(offset);
    const Pose ee_k = k == kApproachSteps ? *ee : ee->translated(offset);
    const auto d = safety_distances(obj_k, ee_k, scene.human);
    check(k, "obj_to_hand", d.obj_to_hand, kSafetyThreshold, !(d.obj_to_hand < kSafetyThreshold));
    check(k, "obj_to_face", d.obj_to_face, kSafetyThreshold, !(d.obj_to_face < kSafetyThreshold));
    check(k, "ee_to_hand", d.ee_to_hand, kSafetyThreshold, !(d.ee_to_hand < kSafetyThreshold));
    if (k == kApproachSteps) out.distances = d;
  }
  const auto advised = advised_human_grasp(scene.object, target, scene.human.hand);
  out.advised_human_grasp = advised.grasp->id;
  out.advised_grasp_world = advised.world;
  out.reach_distance = point_distance(scene.human.hand, advised.world);
  check(kApproachSteps, "reach", out.reach_distance, kReachThreshold, !(out.reach_distance > kReachThreshold));
  if (trace_out) *trace_out = out.trace;
  return out;
}

// --- evaluation ------------------------------------------------------------------

AccuracyReport evaluate(const TrainedModel& model, const std::vector<HandoverInstance>& test) {
  if (test.empty()) throw std::invalid_argument("evaluate needs test instances");
  const Inferencer inf(model);
  struct Outcome {
    bool ok = false, pose = false, grasp = false;
  };
  std::vector<Outcome> outcomes(test.size());
  parallel_for(test.size(), worker_count(), [&](std::size_t i) {
    const auto& inst = test[i];
    try {
      const auto r = inf.infer({inst.shape, inst.task, inst.mobility});
      outcomes[i].ok = true;
      outcomes[i].pose = point_distance(r.object_pose, inst.target_pose) <= kPoseTolerance &&
                         angular_distance(r.object_pose, inst.target_pose) <= kAngleToleranceDeg;
      outcomes[i].grasp = r.robot_grasp == inst.grasp_id;
    } catch (const Error&) {
      outcomes[i] = {};
    }
  });

  AccuracyReport report;
  auto fill = [](AccuracyRow& row, std::size_t n, std::size_t pose, std::size_t grasp) {
    row.instances = n;
    row.pose_accuracy = n ? 100.0 * static_cast<double>(pose) / static_cast<double>(n) : 0.0;
    row.grasp_accuracy = n ? 100.0 * static_cast<double>(grasp) / static_cast<double>(n) : 0.0;
    row.average = 0.5 * (row.pose_accuracy + row.grasp_accuracy);
  };
  std::size_t all_pose = 0, all_grasp = 0;
  std::set<std::string> all_objects;
  for (auto shape : kShapeContexts) {
    std::size_t n = 0, pose = 0, grasp = 0;
    std::set<std::string> objects;
    for (std::size_t i = 0; i < test.size(); ++i) {
      if (test[i].shape != shape) continue;
      ++n;
      pose += outcomes[i].pose;
      grasp += outcomes[i].grasp;
      objects.insert(test[i].object_id);
    }
    if (n == 0) continue;
    AccuracyRow row;
    row.shape = std::string(to_string(shape));
    row.objects.assign(objects.begin(), objects.end());
    fill(row, n, pose, grasp);
    report.rows.push_back(std::move(row));
    all_pose += pose;
    all_grasp += grasp;
    all_objects.insert(objects.begin(), objects.end());
  }
  for (const auto& o : outcomes) report.failed_inferences += !o.ok;
  report.overall.shape = "overall";
  report.overall.objects.assign(all_objects.begin(), all_objects.end());
  fill(report.overall, test.size(), all_pose, all_grasp);
  return report;
}

// --- grasp distance report -------------------------------------------------------

std::vector<GraspDistanceRow> grasp_distance_report(const std::vector<dataset::ObjectEntry>& objects,
                                                    const GraspReportOptions& opts) {
  std::map<ShapeContext, GraspDistanceRow> rows;
  for (const auto& entry : objects) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : entry.id) h = (h ^ c) * 1099511628211ULL;
    Rng rng(derive_seed(opts.seed, h));
    auto& row = rows[entry.shape];
    row.shape = entry.shape;
    for (int i = 0; i < opts.instances_per_object; ++i) {
      const double scale = rng.uniform(opts.min_scale, opts.max_scale);
      const ObjectModel m = dataset::make_object_model(entry, scale);
      const GraspCandidate* manip = nullptr;
      for (const auto& g : m.grasps) {
        if (!g.in_affordance) continue;
        if (!manip || g.pose.position.norm() < manip->pose.position.norm() ||
            (g.pose.position.norm() == manip->pose.position.norm() && g.id < manip->id)) {
          manip = &g;
        }
      }
      if (!manip) throw NoHumanGrasp("object '" + entry.id + "' has no human grasp");
      row.manipulation_cm.push_back(100.0 * manip->pose.position.norm());
      row.handover_cm.push_back(100.0 * select_robot_grasp(m).pose.position.norm());
    }
  }
  std::vector<GraspDistanceRow> out;
  for (auto shape : kShapeContexts) {
    auto it = rows.find(shape);
    if (it == rows.end()) continue;
    auto& row = it->second;
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    row.manipulation_mean_cm = mean(row.manipulation_cm);
    row.handover_mean_cm = mean(row.handover_cm);
    row.test = stats::rank_sum(row.handover_cm, row.manipulation_cm);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace handover::srl
