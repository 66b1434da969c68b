#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "handover/dataset.hpp"
#include "handover/effort.hpp"
#include "handover/errors.hpp"
#include "handover/optimizer.hpp"
#include "handover/scene.hpp"
#include "handover/srl.hpp"
#include "handover/stats.hpp"

namespace fs = std::filesystem;
using namespace handover;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitInfeasible = 2;

struct Globals {
  std::uint64_t seed = 42;
  bool no_timestamp = false;
  std::string data_dir = HANDOVER_DATA_DIR;

  OutputMeta meta() const {
    OutputMeta m;
    m.seed = seed;
    if (!no_timestamp) m.timestamp = utc_timestamp();
    return m;
  }
  std::string objects_path() const { return data_dir + "/objects.json"; }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// --- plan ------------------------------------------------------------------

struct PlanArgs {
  std::string scene, out;
  double reach_min = RadialBandReach::kDefaultMinReach;
  double reach_max = RadialBandReach::kDefaultMaxReach;
  int samples = 4;
};

void cmd_plan(const Globals& g, const PlanArgs& a) {
  const Scene scene = load_scene(a.scene);
  const RadialBandReach reach(a.reach_min, a.reach_max);
  SamplerConfig cfg;
  cfg.seed = g.seed;
  cfg.poses_per_voxel = a.samples;
  const auto sol = optimize_handover(scene, reach, cfg);
  emit(a.out, solution_to_json(sol, g.meta()));
  std::fprintf(stderr, "robot grasp %s, human grasp %s, voxel (%d,%d,%d), safety %.4f, reachability %.4f m\n",
               sol.robot_grasp.c_str(), sol.advised_human_grasp.c_str(), sol.voxel.x, sol.voxel.y,
               sol.voxel.z, sol.costs.safety, sol.costs.reachability);
}

// --- effort ----------------------------------------------------------------

struct EffortArgs {
  std::vector<std::string> setups;
  int trials = 5;
  std::string out;
};

void cmd_effort(const Globals& g, const EffortArgs& a) {
  std::vector<std::string> setups = a.setups;
  if (setups.empty()) {
    for (int i = 1; i <= 3; ++i) setups.push_back(g.data_dir + "/scenes/setup_" + std::to_string(i) + ".json");
  }
  EffortOptions opts;
  opts.trials = a.trials;
  opts.seed = g.seed;
  opts.sampler.seed = g.seed;
  const RadialBandReach reach;
  std::vector<EffortSample> all;
  for (const auto& path : setups) {
    const auto samples = compare_methods(load_scene(path), fs::path(path).stem().string(), reach, opts);
    all.insert(all.end(), samples.begin(), samples.end());
  }
  emit(a.out, effort_csv(all, g.meta()));
  const auto mean = mean_effort(all);
  std::fprintf(stderr, "mean effort: MethodA %.3f Nm, MethodB %.3f Nm, Ours %.3f Nm\n", mean[0], mean[1], mean[2]);
}

// --- dataset ---------------------------------------------------------------

struct DatasetArgs {
  std::string objects;
  std::string out_dir = ".";
  double jitter_position = 0.002;
  double jitter_angle_deg = 0.5;
  bool random = false;
  std::string out;
};

void cmd_dataset_gen(const Globals& g, const DatasetArgs& a) {
  const auto lib = dataset::load_library(a.objects.empty() ? g.objects_path() : a.objects);
  dataset::GenerationOptions opts;
  opts.seed = g.seed;
  opts.sampler.seed = g.seed;
  opts.jitter_position = a.jitter_position;
  opts.jitter_angle_deg = a.jitter_angle_deg;
  const auto build = dataset::generate_corpus(lib, opts);
  const auto records = dataset::generate_study_records(lib, g.seed);
  const auto meta = g.meta();
  fs::create_directories(a.out_dir);
  emit((fs::path(a.out_dir) / "corpus.csv").string(), dataset::corpus_to_csv(build.corpus, meta));
  emit((fs::path(a.out_dir) / "study_ratings.csv").string(), dataset::study_records_to_csv(records, meta));
  for (const auto& s : build.skipped) {
    std::fprintf(stderr, "skipped instance %zu (%s): %s\n", s.index, s.object_id.c_str(), s.reason.c_str());
  }
  std::fprintf(stderr, "wrote %zu instances, %zu study records to %s\n", build.corpus.size(), records.size(),
               a.out_dir.c_str());
}

void cmd_dataset_split(const Globals& g, const DatasetArgs& a) {
  const auto lib = dataset::load_library(a.objects.empty() ? g.objects_path() : a.objects);
  const auto spec = a.random ? dataset::random_split(lib, g.seed) : dataset::default_split(lib, g.seed);
  spec.validate();
  emit(a.out, dataset::split_to_json(spec, g.meta()));
}

// --- train / infer / eval / run --------------------------------------------

struct TrainArgs {
  std::string corpus, split, objects, out;
  int max_iters = 300;
  double learning_rate = 1.0;
  double sigma = 2.0;
};

void cmd_train(const Globals& g, const TrainArgs& a) {
  const auto corpus = dataset::load_corpus(a.corpus);
  const auto spec = a.split.empty()
                        ? dataset::default_split(dataset::load_library(a.objects.empty() ? g.objects_path() : a.objects), g.seed)
                        : dataset::parse_split_json(read_file(a.split));
  srl::TrainOptions opts;
  opts.seed = g.seed;
  opts.learn.max_iters = a.max_iters;
  opts.learn.learning_rate = a.learning_rate;
  opts.learn.l2_prior_sigma = a.sigma;
  const auto model = srl::train(corpus, spec, opts);
  emit(a.out, srl::trained_model_to_json(model, g.meta()));
  std::fprintf(stderr, "trained on %zu instances: %zu prototypes, %zu formulas, %d iterations, PLL %.4f -> %.4f\n",
               model.train_meta.train_instances, model.prototypes.entries.size(), model.mln.formulas.size(),
               model.train_meta.iterations, model.train_meta.initial_pll, model.train_meta.final_pll);
}

struct InferArgs {
  std::string model, shape, task, mobility, out;
};

void cmd_infer(const Globals& g, const InferArgs& a) {
  const auto model = srl::load_trained_model(a.model);
  ShapeContext shape;
  MobilityLevel level;
  try {
    shape = parse_shape(a.shape);
    level = parse_mobility(a.mobility);
  } catch (const ParseError& e) {
    throw UnknownDomainValue(e.what());
  }
  const auto r = srl::infer_handover(model, {shape, a.task, level});
  emit(a.out, srl::inference_to_json(r, g.meta()));
}

struct EvalArgs {
  std::string model, corpus, out;
};

void cmd_eval(const Globals& g, const EvalArgs& a) {
  const auto model = srl::load_trained_model(a.model);
  const auto corpus = dataset::load_corpus(a.corpus);
  const auto test = dataset::split(corpus, model.split).second;
  const auto report = srl::evaluate(model, test);
  emit(a.out, srl::accuracy_to_csv(report, g.meta()));
  if (report.failed_inferences) std::fprintf(stderr, "%zu inferences failed\n", report.failed_inferences);
}

struct RunArgs {
  std::string scene, model, mobility, task, out;
};

void cmd_run(const Globals& g, const RunArgs& a) {
  const Scene scene = load_scene(a.scene);
  const auto model = srl::load_trained_model(a.model);
  MobilityLevel level = scene.human.mobility;
  if (!a.mobility.empty()) {
    try {
      level = parse_mobility(a.mobility);
    } catch (const ParseError& e) {
      throw UnknownDomainValue(e.what());
    }
  }
  const std::string task = a.task.empty() ? scene.human.task : a.task;
  const RadialBandReach reach;
  std::vector<srl::GateCheck> trace;
  try {
    const auto r = srl::run_end_to_end(scene, level, task, model, reach, &trace);
    emit(a.out, srl::end_to_end_to_json(r, g.meta()));
  } catch (const SafetyGateFailed&) {
    for (const auto& c : trace) {
      std::fprintf(stderr, "step %d %-12s %.4f (threshold %.2f) %s\n", c.step, c.gate.c_str(), c.distance,
                   c.threshold, c.passed ? "ok" : "FAILED");
    }
    throw;
  }
}

// --- stats / grasp report --------------------------------------------------

struct StatsArgs {
  std::string input, out;
  std::string rating_column = "rating";
};

void cmd_ranksum(const Globals& g, const StatsArgs& a) {
  const auto s = stats::parse_samples_csv(read_file(a.input));
  emit(a.out, stats::rank_sum_to_csv(stats::rank_sum(s.a, s.b), g.meta()));
}

void cmd_anova(const Globals& g, const StatsArgs& a) {
  const auto data = stats::parse_ratings_csv(read_file(a.input), a.rating_column);
  emit(a.out, stats::anova_to_csv(stats::mixed_anova(data), g.meta()));
}

struct GraspArgs {
  std::string objects, out, summary;
  int per_object = 5;
};

void cmd_grasp_report(const Globals& g, const GraspArgs& a) {
  const auto lib = dataset::load_library(a.objects.empty() ? g.objects_path() : a.objects);
  srl::GraspReportOptions opts;
  opts.seed = g.seed;
  opts.instances_per_object = a.per_object;
  const auto rows = srl::grasp_distance_report(lib.objects, opts);
  const auto meta = g.meta();
  emit(a.out, srl::grasp_samples_to_csv(rows, meta));
  if (!a.summary.empty()) emit(a.summary, srl::grasp_summary_to_csv(rows, meta));
  for (const auto& r : rows) {
    std::fprintf(stderr, "%-12s manipulation %.2f cm, handover %.2f cm, p = %.3g\n",
                 std::string(to_string(r.shape)).c_str(), r.manipulation_mean_cm, r.handover_mean_cm,
                 r.test.p_value);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Handover planning toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random stream")->capture_default_str();
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit generated_at from outputs");
  app.add_option("--data-dir", g.data_dir, "Directory with objects.json and scenes/")->capture_default_str();

  std::function<void()> action;

  PlanArgs plan;
  auto* sc_plan = app.add_subcommand("plan", "Optimize a handover for a scene file");
  sc_plan->add_option("--scene", plan.scene)->required();
  sc_plan->add_option("--reach-min", plan.reach_min)->capture_default_str();
  sc_plan->add_option("--reach-max", plan.reach_max)->capture_default_str();
  sc_plan->add_option("--samples", plan.samples, "Positions per voxel")->capture_default_str();
  sc_plan->add_option("-o,--out", plan.out, "Output JSON (default stdout)");
  sc_plan->callback([&] { action = [&] { cmd_plan(g, plan); }; });

  EffortArgs effort;
  std::string setup_list;
  auto* sc_effort = app.add_subcommand("effort", "Compare receiver arm effort across methods");
  sc_effort->add_option("--setups", setup_list, "Comma-separated scene files (default: bundled setups)");
  sc_effort->add_option("--trials", effort.trials)->capture_default_str();
  sc_effort->add_option("-o,--out", effort.out);
  sc_effort->callback([&] {
    effort.setups = split_commas(setup_list);
    action = [&] { cmd_effort(g, effort); };
  });

  DatasetArgs ds;
  auto* sc_ds = app.add_subcommand("dataset", "Corpus generation and splits");
  sc_ds->require_subcommand(1);
  auto* sc_gen = sc_ds->add_subcommand("gen", "Generate the study and synthetic corpus");
  sc_gen->add_option("--objects", ds.objects, "Object library JSON");
  sc_gen->add_option("--out-dir", ds.out_dir)->capture_default_str();
  sc_gen->add_option("--jitter-pos", ds.jitter_position, "Position jitter sigma (m)")->capture_default_str();
  sc_gen->add_option("--jitter-deg", ds.jitter_angle_deg, "Angular jitter sigma (deg)")->capture_default_str();
  sc_gen->callback([&] { action = [&] { cmd_dataset_gen(g, ds); }; });
  auto* sc_split = sc_ds->add_subcommand("split", "Write an object split");
  sc_split->add_option("--objects", ds.objects);
  sc_split->add_flag("--random", ds.random, "Seeded 70/30 split instead of the default held-out set");
  sc_split->add_option("-o,--out", ds.out);
  sc_split->callback([&] { action = [&] { cmd_dataset_split(g, ds); }; });

  TrainArgs tr;
  auto* sc_train = app.add_subcommand("train", "Learn prototypes and MLN weights");
  sc_train->add_option("--corpus", tr.corpus)->required();
  sc_train->add_option("--split", tr.split, "Split JSON (default: library held-out set)");
  sc_train->add_option("--objects", tr.objects);
  sc_train->add_option("--max-iters", tr.max_iters)->capture_default_str();
  sc_train->add_option("--lr", tr.learning_rate)->capture_default_str();
  sc_train->add_option("--sigma", tr.sigma, "L2 prior sigma")->capture_default_str();
  sc_train->add_option("-o,--out", tr.out);
  sc_train->callback([&] { action = [&] { cmd_train(g, tr); }; });

  InferArgs inf;
  auto* sc_infer = app.add_subcommand("infer", "Infer a transfer configuration");
  sc_infer->add_option("--model", inf.model)->required();
  sc_infer->add_option("--shape", inf.shape)->required();
  sc_infer->add_option("--task", inf.task)->required();
  sc_infer->add_option("--mobility", inf.mobility)->required();
  sc_infer->add_option("-o,--out", inf.out);
  sc_infer->callback([&] { action = [&] { cmd_infer(g, inf); }; });

  EvalArgs ev;
  auto* sc_eval = app.add_subcommand("eval", "Accuracy on the test side of the model's split");
  sc_eval->add_option("--model", ev.model)->required();
  sc_eval->add_option("--corpus", ev.corpus)->required();
  sc_eval->add_option("-o,--out", ev.out);
  sc_eval->callback([&] { action = [&] { cmd_eval(g, ev); }; });

  StatsArgs st;
  auto* sc_stats = app.add_subcommand("stats", "Statistical tests");
  sc_stats->require_subcommand(1);
  auto* sc_rs = sc_stats->add_subcommand("ranksum", "Wilcoxon rank-sum on a sample,value CSV");
  sc_rs->add_option("--input", st.input)->required();
  sc_rs->add_option("-o,--out", st.out);
  sc_rs->callback([&] { action = [&] { cmd_ranksum(g, st); }; });
  auto* sc_an = sc_stats->add_subcommand("anova", "Mixed ANOVA on a ratings CSV");
  sc_an->add_option("--input", st.input)->required();
  sc_an->add_option("--rating-column", st.rating_column)->capture_default_str();
  sc_an->add_option("-o,--out", st.out);
  sc_an->callback([&] { action = [&] { cmd_anova(g, st); }; });

  GraspArgs gr;
  auto* sc_gr = app.add_subcommand("grasp-report", "Grasp distance from object center per mode");
  sc_gr->add_option("--objects", gr.objects);
  sc_gr->add_option("--per-object", gr.per_object)->capture_default_str();
  sc_gr->add_option("-o,--out", gr.out, "Per-sample CSV");
  sc_gr->add_option("--summary", gr.summary, "Per-shape summary CSV");
  sc_gr->callback([&] { action = [&] { cmd_grasp_report(g, gr); }; });

  RunArgs run;
  auto* sc_run = app.add_subcommand("run", "End-to-end execution with safety gates");
  sc_run->add_option("--scene", run.scene)->required();
  sc_run->add_option("--model", run.model)->required();
  sc_run->add_option("--mobility", run.mobility, "Override the scene's mobility level");
  sc_run->add_option("--task", run.task, "Override the scene's task");
  sc_run->add_option("-o,--out", run.out);
  sc_run->callback([&] { action = [&] { cmd_run(g, run); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const NoFeasibleHandover& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const NoWinningAtom& e) {
    std::fprintf(stderr, "no result: %s\n", e.what());
    return kExitInfeasible;
  } catch (const UnknownDomainValue& e) {
    std::fprintf(stderr, "no result: %s\n", e.what());
    return kExitInfeasible;
  } catch (const SafetyGateFailed& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
}
