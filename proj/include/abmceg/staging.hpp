#pragma once

#include <memory>
#include <string>
#include <vector>

#include "abmceg/event_tree.hpp"

namespace abmceg {

// A set of situations asserted to share one transition probability vector.
struct Stage {
  int id = 0;
  int variable = 0;
  std::vector<int> members;  // situation ids, ascending
  std::vector<int> clauses;  // provenance clause indices, ascending
  std::string color;         // render hint; empty = unfilled

  bool singleton() const { return members.size() == 1; }

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct StagedTree {
  std::shared_ptr<const EventTree> tree;
  std::vector<Stage> stages;
  std::vector<int> stage_of;  // node id -> stage id; kUnset for leaves
  int id = 0;                 // candidate index when models are enumerated
  std::string name = "rule";
  std::vector<std::string> warnings;
};

// "subject is independent of independent_of, given `given`" — the
// context-specific independence a non-singleton stage encodes.
struct IndependenceStatement {
  int subject = 0;
  std::vector<int> independent_of;  // variable indices, ascending
  Condition given;
};

// Rule-implied staging: two situations share a stage iff they carry the same
// variable and their contexts match the same clause.  Stage ids follow
// (variable order, clause order).  Clauses that match no reachable context
// and same-variable clauses with numerically identical probability vectors
// are reported in warnings; the latter stay distinct stages.
StagedTree derive_staging(std::shared_ptr<const EventTree> tree);

// Every situation in its own stage.
StagedTree saturated_staging(std::shared_ptr<const EventTree> tree);

// Merges two same-variable stages and recanonicalizes ids, memberships and
// colors.  Throws on out-of-range ids or a cross-variable pair.
StagedTree merge_stages(const StagedTree& staged, int a, int b);

std::vector<IndependenceStatement> extract_independencies(const StagedTree& staged);

// Alternative stagings reachable by repeatedly merging same-variable stage
// pairs, breadth-first from `staged` (which comes first), deduplicated by
// partition, capped at max_models.  Candidate pairs at each step are taken
// smallest combined member count first, ties by stage id.
std::vector<StagedTree> enumerate_coarsenings(const StagedTree& staged, int max_models);

std::string independence_to_string(const AbmSpec& spec, const IndependenceStatement& s);

// Plain-text listing of stages, member contexts and independence statements.
std::string staging_report(const StagedTree& staged);

// Fixed deterministic stage palette; index beyond the named colors yields
// generated hex values.
std::string stage_palette_color(const std::string& palette, int index);

}  // namespace abmceg
