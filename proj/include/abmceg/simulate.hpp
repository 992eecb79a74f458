#pragma once

#include <cstdint>
#include <string>

#include "abmceg/inference.hpp"

namespace abmceg {

struct SimConfig {
  long long n = 0;
  std::uint64_t seed = 0;
  Execution exec = Execution::kParallel;
};

// Forward-samples n complete trajectories.  Trajectory i draws from its own
// generator stream (mt19937_64 seeded with the i-th splitmix64 output of
// `seed`), so results are identical for serial and parallel execution and
// reproducible across platforms.  Outcomes are sampled by inverse CDF over
// the declared outcome order.
TrajectoryDataset simulate(const AbmSpec& spec, const SimConfig& config);

// Identifies the generator scheme in CSV header comments.
std::string generator_name();

struct StageDeviation {
  int stage = 0;
  long long visits = 0;  // 0 means the stage was never reached ("unvisited")
  double max_abs_deviation = 0.0;
};

// Max absolute gap between each stage's empirical outcome proportions and its
// rule probabilities.  Meant for the rule-implied staging, where each stage
// carries exactly one clause.
std::vector<StageDeviation> empirical_check(const StagedTree& staged,
                                            const TrajectoryDataset& data);

}  // namespace abmceg
