#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "abmceg/staging.hpp"

namespace testutil {

inline std::string data_dir() { return ABMCEG_DATA_DIR; }

inline std::string fixture_path() {
  return data_dir() + "/example_migration.abm.json";
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::shared_ptr<const abmceg::AbmSpec> fixture_spec() {
  return std::make_shared<const abmceg::AbmSpec>(
      abmceg::parse_abm(read_file(fixture_path())));
}

inline abmceg::StagedTree fixture_staging() {
  return abmceg::derive_staging(
      std::make_shared<const abmceg::EventTree>(abmceg::build_tree(fixture_spec())));
}

// Situation id of the node whose context is exactly `assignment`.
inline int situation_at(
    const abmceg::EventTree& tree,
    const std::vector<std::pair<std::string, std::string>>& assignment) {
  const abmceg::Context want = abmceg::make_context(*tree.spec, assignment);
  for (int s = 0; s < tree.situation_count; ++s) {
    if (tree.nodes[s].context == want) return s;
  }
  throw std::runtime_error("no situation at the requested context");
}

}  // namespace testutil
