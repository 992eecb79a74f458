#pragma once

#include <string>
#include <vector>

#include "abmceg/staging.hpp"

namespace abmceg {

// A maximal set of same-stage situations with isomorphic colored futures.
struct Position {
  int id = 0;
  std::vector<int> members;  // situation ids, ascending
  int stage = 0;

  friend bool operator==(const Position&, const Position&) = default;
};

struct CegEdge {
  int source = 0;     // position id
  int outcome = 0;    // outcome index within the source variable
  std::string label;  // outcome label
  int target = 0;     // position id, or sink
};

// Quotient of the staged tree by positions with all leaves merged into one
// sink.  Edges are copied from each position's smallest member, so every
// position emits exactly its floret's outcomes; parallel edges with distinct
// labels are kept.
struct Ceg {
  StagedTree staged;
  std::vector<Position> positions;
  std::vector<CegEdge> edges;       // ordered by source position, then outcome
  std::vector<int> position_of;     // node id -> position id; leaves -> sink
  int sink = 0;                     // == positions.size()

  int node_count() const { return static_cast<int>(positions.size()) + 1; }
};

// Bottom-up recursive keying: all leaves share the sink key and a situation's
// key is (stage id, ordered child keys).  Position ids are dense, ordered by
// smallest member situation id.
std::vector<Position> compute_positions(const StagedTree& staged);

Ceg build_ceg(const StagedTree& staged);

struct DotOptions {
  enum class Labels { kIndices, kContexts };
  Labels labels = Labels::kIndices;
  std::string palette = "figure";
};

// Byte-deterministic Graphviz renderings.  Situations are labelled by
// w-index (or context), the CEG sink by "w_inf"; staged-tree and CEG nodes
// belonging to a non-singleton stage are filled with the stage color.
std::string export_dot(const EventTree& tree, const DotOptions& options = {});
std::string export_dot(const StagedTree& staged, const DotOptions& options = {});
std::string export_dot(const Ceg& ceg, const DotOptions& options = {});

}  // namespace abmceg
