// Serial vs parallel kernel comparison: trajectory simulation, visit
// counting and candidate scoring on the bundled migration model.

#include <benchmark/benchmark.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "abmceg/csv.hpp"
#include "abmceg/simulate.hpp"

using namespace abmceg;

namespace {

std::shared_ptr<const AbmSpec> load_spec() {
  std::ifstream in(std::string(ABMCEG_DATA_DIR) + "/example_migration.abm.json");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::make_shared<const AbmSpec>(parse_abm(buf.str()));
}

const std::shared_ptr<const AbmSpec> g_spec = load_spec();
const std::shared_ptr<const EventTree> g_tree =
    std::make_shared<const EventTree>(build_tree(g_spec));

TrajectoryDataset dataset(long long n) {
  SimConfig config;
  config.n = n;
  config.seed = 1;
  return simulate(*g_spec, config);
}

void bm_simulate(benchmark::State& state, Execution exec) {
  SimConfig config;
  config.n = state.range(0);
  config.seed = 1;
  config.exec = exec;
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(*g_spec, config));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_count_visits(benchmark::State& state, Execution exec) {
  const TrajectoryDataset data = dataset(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_situation_visits(*g_tree, data, exec));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_compare_models(benchmark::State& state, Execution exec) {
  const TrajectoryDataset data = dataset(2000);
  const StagedTree staged = derive_staging(g_tree);
  std::vector<StagedTree> candidates =
      enumerate_coarsenings(staged, static_cast<int>(state.range(0)));
  StagedTree sat = saturated_staging(g_tree);
  sat.id = static_cast<int>(candidates.size());
  candidates.push_back(std::move(sat));
  for (auto _ : state) {
    benchmark::DoNotOptimize(compare_models(candidates, data, PriorConfig{}, exec));
  }
  state.SetItemsProcessed(state.iterations() * candidates.size());
}

}  // namespace

BENCHMARK_CAPTURE(bm_simulate, serial, Execution::kSerial)
    ->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_simulate, parallel, Execution::kParallel)
    ->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);

BENCHMARK_CAPTURE(bm_count_visits, serial, Execution::kSerial)
    ->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK_CAPTURE(bm_count_visits, parallel, Execution::kParallel)
    ->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);

BENCHMARK_CAPTURE(bm_compare_models, serial, Execution::kSerial)->Arg(5);
BENCHMARK_CAPTURE(bm_compare_models, parallel, Execution::kParallel)->Arg(5);

BENCHMARK_MAIN();
