#pragma once

#include <memory>
#include <string>
#include <vector>

#include "abmceg/abm_spec.hpp"
#include "abmceg/types.hpp"

namespace abmceg {

struct TreeNode {
  int id = 0;
  int parent = kUnset;    // kUnset for the root
  int variable = kUnset;  // kUnset for leaves
  int clause = kUnset;    // matching clause of `variable`; kUnset for leaves
  Context context;        // assignment of all earlier applicable variables
  std::vector<int> children;  // child node ids in outcome order; empty for leaves
  double reach_prob = 1.0;    // product of rule probabilities from the root

  bool is_leaf() const { return variable == kUnset; }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

// View of a situation together with its outgoing edges.
struct Floret {
  int variable;
  const std::vector<std::string>& outcomes;
  const std::vector<int>& children;
};

// The rooted directed tree a spec unrolls into.  Situations occupy the dense
// id range [0, situation_count) in breadth-first order (within a level by
// parent id, then edge order); leaves follow in the same order.  A node's
// variable is the first declared variable after its path whose applicability
// condition holds; when none does the node is a leaf.
struct EventTree {
  std::shared_ptr<const AbmSpec> spec;
  std::vector<TreeNode> nodes;
  int situation_count = 0;
  int leaf_count = 0;
  static constexpr int kRoot = 0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return node_count() - 1; }
  bool is_situation(int id) const { return id >= 0 && id < situation_count; }

  Floret floret(int situation) const;           // throws on leaves / bad ids
  const Context& context_of(int node) const;    // throws on bad ids
};

EventTree build_tree(std::shared_ptr<const AbmSpec> spec);

// Structural equality ignoring the spec pointer.
bool same_structure(const EventTree& a, const EventTree& b);

}  // namespace abmceg
