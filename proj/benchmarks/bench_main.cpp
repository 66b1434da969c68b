#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "handover/dataset.hpp"
#include "handover/mln.hpp"
#include "handover/optimizer.hpp"
#include "handover/random.hpp"
#include "handover/scene.hpp"
#include "handover/srl.hpp"
#include "handover/stats.hpp"

using namespace handover;

namespace {

const dataset::ObjectLibrary& library() {
  static const auto lib = dataset::load_library(std::string(HANDOVER_DATA_DIR) + "/objects.json");
  return lib;
}

const std::vector<dataset::HandoverInstance>& corpus() {
  static const auto c = dataset::generate_corpus(library(), {}).corpus;
  return c;
}

const srl::TrainedModel& model() {
  static const auto m = srl::train(corpus(), dataset::default_split(library()));
  return m;
}

}  // namespace

static void BM_OptimizeHandover(benchmark::State& state) {
  const Scene scene = load_scene(std::string(HANDOVER_DATA_DIR) + "/scenes/example.json");
  const RadialBandReach reach;
  SamplerConfig cfg;
  cfg.threads = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(optimize_handover(scene, reach, cfg));
}
BENCHMARK(BM_OptimizeHandover)->Arg(1)->Arg(4)->Unit(benchmark::kMicrosecond);

// query clamped as evidence, MAP over the configuration and grasp atoms
static void BM_InferHandover(benchmark::State& state) {
  const auto& m = model();
  const srl::HandoverQuery q{ShapeContext::Cylindrical, "drink", MobilityLevel::L};
  for (auto _ : state) benchmark::DoNotOptimize(srl::infer_handover(m, q));
}
BENCHMARK(BM_InferHandover)->Unit(benchmark::kMicrosecond);

// PLL with gradient over the training worlds, the inner loop of weight learning
static void BM_PseudoLogLikelihood(benchmark::State& state) {
  const auto gm = mln::ground(model().mln);
  const auto [train, test] = dataset::split(corpus(), model().split);
  const auto worlds = srl::corpus_to_worlds(train, model().prototypes, gm);
  std::vector<double> grad;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mln::pseudo_log_likelihood(gm, gm.weights, worlds, &grad, true));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(worlds.size()));
}
BENCHMARK(BM_PseudoLogLikelihood)->Unit(benchmark::kMicrosecond);

static void BM_RankSum(benchmark::State& state) {
  Rng rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> a(n), b(n);
  for (auto& x : a) x = rng.normal();
  for (auto& x : b) x = rng.normal(0.3, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(stats::rank_sum(a, b));
}
BENCHMARK(BM_RankSum)->Arg(8)->Arg(15)->Arg(200);

BENCHMARK_MAIN();
