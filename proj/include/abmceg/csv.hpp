#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "abmceg/inference.hpp"

namespace abmceg {

// Trajectory CSV: a header row of variable names in declared order, one row
// per individual, an empty cell marking a non-applicable variable.  An
// optional leading "# seed=<u64> generator=<name>" comment records how a
// simulated file was produced.
std::string write_trajectory_csv(const AbmSpec& spec,
                                 const TrajectoryDataset& data,
                                 std::optional<std::uint64_t> seed = {});

TrajectoryDataset read_trajectory_csv(const AbmSpec& spec,
                                      const std::string& text,
                                      std::string provenance = "");

}  // namespace abmceg
