#include <benchmark/benchmark.h>

#include "elaine/eval.hpp"
#include "elaine/graph.hpp"
#include "elaine/model.hpp"
#include "elaine/proximity.hpp"
#include "elaine/roles.hpp"

using namespace elaine;

namespace {

SyntheticGraph sbm(std::size_t per_block) {
  SbmParams p;
  p.blocks = 4;
  p.nodes_per_block = per_block;
  p.p_in = 0.15;
  p.p_out = 0.02;
  p.topics = 4;
  p.seed = 1;
  return generate_sbm_with_edge_topics(p);
}

void BM_Similarity(benchmark::State& state) {
  const auto s = sbm(static_cast<std::size_t>(state.range(0)));
  const WalkConfig walk{10, 5, 0};
  for (auto _ : state) benchmark::DoNotOptimize(build_similarity(s.graph, walk));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.graph.num_nodes()));
}
BENCHMARK(BM_Similarity)->Arg(50)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_RoleFeatures(benchmark::State& state) {
  const auto s = sbm(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(role_features(s.graph));
}
BENCHMARK(BM_RoleFeatures)->Arg(50)->Arg(250)->Unit(benchmark::kMillisecond);

// beta below 1/n keeps the series convergent for any graph on n nodes
void BM_KatzIndex(benchmark::State& state) {
  const auto s = sbm(static_cast<std::size_t>(state.range(0)));
  const double beta = 0.5 / static_cast<double>(s.graph.num_nodes());
  for (auto _ : state) benchmark::DoNotOptimize(katz_index(s.graph, beta));
}
BENCHMARK(BM_KatzIndex)->Arg(50)->Arg(250)->Unit(benchmark::kMillisecond);

// One epoch of minibatch training on precomputed features.
void BM_TrainEpoch(benchmark::State& state) {
  const auto s = sbm(50);
  ElaineConfig cfg;
  cfg.dim = static_cast<std::size_t>(state.range(0));
  cfg.encoder_hidden = {128, 64};
  cfg.epochs = 1;
  const auto f = assemble_features(s.graph, s.attributes, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(train(f, s.graph, s.attributes, cfg).history);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.graph.num_edges()));
}
BENCHMARK(BM_TrainEpoch)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_MeanAveragePrecision(benchmark::State& state) {
  const auto s = sbm(50);
  const auto split = eval::make_split(s.graph, 0.2, 1024, 0);
  const auto scores = eval::random_scorer(0)(split, EdgeAttributes{}, 0);
  const std::vector<std::size_t> ks = eval::kDefaultPrecisionKs;
  for (auto _ : state) benchmark::DoNotOptimize(eval::evaluate_split(split, scores, ks));
}
BENCHMARK(BM_MeanAveragePrecision)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
