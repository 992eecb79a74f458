#include "abmceg/event_tree.hpp"

#include <deque>
#include <utility>

namespace abmceg {

namespace {

// First variable at or after `start` that is applicable in ctx; kUnset when
// the path is complete.
int next_variable(const AbmSpec& spec, const Context& ctx, int start) {
  const int nv = static_cast<int>(spec.variables.size());
  for (int v = start; v < nv; ++v) {
    if (spec.applicable(v, ctx)) return v;
  }
  return kUnset;
}

}  // namespace

EventTree build_tree(std::shared_ptr<const AbmSpec> spec) {
  const AbmSpec& s = *spec;
  const int nv = static_cast<int>(s.variables.size());

  struct Provisional {
    int parent;
    int variable;
    int clause;
    Context context;
    std::vector<int> children;
    double reach;
    int scan_from;  // first candidate variable index for children
  };

  std::vector<Provisional> prov;
  prov.push_back({kUnset, kUnset, kUnset, Context(nv, kUnset), {}, 1.0, 0});
  std::deque<int> queue = {0};

  while (!queue.empty()) {
    const int id = queue.front();
    queue.pop_front();
    const int v = next_variable(s, prov[id].context, prov[id].scan_from);
    if (v == kUnset) continue;  // leaf
    prov[id].variable = v;
    prov[id].clause = s.clause_for(v, prov[id].context);
    const auto& probs = s.rules[v][prov[id].clause].probs;
    const int n_out = static_cast<int>(s.variables[v].outcomes.size());
    for (int k = 0; k < n_out; ++k) {
      Context child_ctx = prov[id].context;
      child_ctx[v] = k;
      const int child = static_cast<int>(prov.size());
      prov[id].children.push_back(child);
      prov.push_back({id, kUnset, kUnset, std::move(child_ctx), {},
                      prov[id].reach * probs[k], v + 1});
      queue.push_back(child);
    }
  }

  // Renumber: situations take the dense range [0, S) in discovery order,
  // leaves follow in theirs.
  std::vector<int> new_id(prov.size());
  int next = 0;
  for (std::size_t i = 0; i < prov.size(); ++i) {
    if (prov[i].variable != kUnset) new_id[i] = next++;
  }
  EventTree tree;
  tree.situation_count = next;
  for (std::size_t i = 0; i < prov.size(); ++i) {
    if (prov[i].variable == kUnset) new_id[i] = next++;
  }
  tree.leaf_count = next - tree.situation_count;

  tree.spec = std::move(spec);
  tree.nodes.resize(prov.size());
  for (std::size_t i = 0; i < prov.size(); ++i) {
    TreeNode& node = tree.nodes[new_id[i]];
    node.id = new_id[i];
    node.parent = prov[i].parent == kUnset ? kUnset : new_id[prov[i].parent];
    node.variable = prov[i].variable;
    node.clause = prov[i].clause;
    node.context = std::move(prov[i].context);
    node.reach_prob = prov[i].reach;
    node.children.reserve(prov[i].children.size());
    for (int c : prov[i].children) node.children.push_back(new_id[c]);
  }
  return tree;
}

Floret EventTree::floret(int situation) const {
  if (situation < 0 || situation >= node_count()) {
    throw SpecError("node id " + std::to_string(situation) + " out of range");
  }
  if (!is_situation(situation)) {
    throw SpecError("node " + std::to_string(situation) +
                    " is a leaf and has no floret");
  }
  const TreeNode& node = nodes[situation];
  return Floret{node.variable, spec->variables[node.variable].outcomes,
                node.children};
}

const Context& EventTree::context_of(int node) const {
  if (node < 0 || node >= node_count()) {
    throw SpecError("node id " + std::to_string(node) + " out of range");
  }
  return nodes[node].context;
}

bool same_structure(const EventTree& a, const EventTree& b) {
  return a.situation_count == b.situation_count &&
         a.leaf_count == b.leaf_count && a.nodes == b.nodes;
}

}  // namespace abmceg
