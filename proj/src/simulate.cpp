#include "abmceg/simulate.hpp"

#include <cmath>
#include <random>

namespace abmceg {

namespace {

// i-th output of splitmix64 started at `seed`; the per-trajectory stream
// seeds.  O(1) per index, so parallel workers can jump straight to theirs.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

Context sample_trajectory(const AbmSpec& spec, std::mt19937_64& rng) {
  const int nv = static_cast<int>(spec.variables.size());
  Context ctx(nv, kUnset);
  for (int v = 0; v < nv; ++v) {
    if (!spec.applicable(v, ctx)) continue;
    const auto& probs = spec.rules[v][spec.clause_for(v, ctx)].probs;
    const double u = uniform01(rng);
    double cum = 0.0;
    int pick = static_cast<int>(probs.size()) - 1;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      cum += probs[k];
      if (u < cum) {
        pick = static_cast<int>(k);
        break;
      }
    }
    ctx[v] = pick;
  }
  return ctx;
}

}  // namespace

std::string generator_name() { return "mt19937_64/splitmix64-streams"; }

TrajectoryDataset simulate(const AbmSpec& spec, const SimConfig& config) {
  if (config.n < 0) throw SpecError("trajectory count must be >= 0");
  TrajectoryDataset data;
  data.rows.resize(config.n);

#ifdef _OPENMP
  #pragma omp parallel for schedule(static) \
      if (config.exec == Execution::kParallel && config.n > 1)
#endif
  for (long long i = 0; i < config.n; ++i) {
    std::mt19937_64 rng(stream_seed(config.seed, static_cast<std::uint64_t>(i)));
    data.rows[i] = sample_trajectory(spec, rng);
  }
  return data;
}

std::vector<StageDeviation> empirical_check(const StagedTree& staged,
                                            const TrajectoryDataset& data) {
  const AbmSpec& spec = *staged.tree->spec;
  const auto counts = count_stage_outcomes(staged, data);
  std::vector<StageDeviation> out;
  for (const Stage& stage : staged.stages) {
    StageDeviation dev;
    dev.stage = stage.id;
    for (long long c : counts[stage.id]) dev.visits += c;
    if (dev.visits > 0) {
      const auto& probs = spec.rules[stage.variable][stage.clauses.front()].probs;
      for (std::size_t k = 0; k < probs.size(); ++k) {
        const double empirical =
            static_cast<double>(counts[stage.id][k]) /
            static_cast<double>(dev.visits);
        dev.max_abs_deviation =
            std::max(dev.max_abs_deviation, std::abs(empirical - probs[k]));
      }
    }
    out.push_back(dev);
  }
  return out;
}

}  // namespace abmceg
