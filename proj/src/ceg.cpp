#include "abmceg/ceg.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace abmceg {

std::vector<Position> compute_positions(const StagedTree& staged) {
  const EventTree& tree = *staged.tree;
  // Children carry larger ids than their parents in both id blocks, so a
  // descending sweep sees every child before its parent.
  std::vector<int> key(tree.node_count(), 0);  // 0 = the shared sink key
  std::map<std::pair<int, std::vector<int>>, int> memo;
  int next_key = 1;
  for (int id = tree.node_count() - 1; id >= 0; --id) {
    const TreeNode& node = tree.nodes[id];
    if (node.is_leaf()) continue;
    std::vector<int> child_keys;
    child_keys.reserve(node.children.size());
    for (int c : node.children) child_keys.push_back(key[c]);
    auto [it, inserted] = memo.try_emplace(
        {staged.stage_of[id], std::move(child_keys)}, next_key);
    if (inserted) ++next_key;
    key[id] = it->second;
  }

  std::map<int, std::vector<int>> groups;  // key -> members (ascending ids)
  for (int s = 0; s < tree.situation_count; ++s) {
    groups[key[s]].push_back(s);
  }
  std::vector<Position> positions;
  for (auto& [k, members] : groups) {
    (void)k;
    positions.push_back(Position{0, std::move(members), 0});
  }
  std::sort(positions.begin(), positions.end(),
            [](const Position& a, const Position& b) {
              return a.members.front() < b.members.front();
            });
  for (std::size_t i = 0; i < positions.size(); ++i) {
    positions[i].id = static_cast<int>(i);
    positions[i].stage = staged.stage_of[positions[i].members.front()];
  }
  return positions;
}

Ceg build_ceg(const StagedTree& staged) {
  const EventTree& tree = *staged.tree;
  Ceg ceg;
  ceg.staged = staged;
  ceg.positions = compute_positions(staged);
  ceg.sink = static_cast<int>(ceg.positions.size());
  ceg.position_of.assign(tree.node_count(), ceg.sink);
  for (const Position& p : ceg.positions) {
    for (int m : p.members) ceg.position_of[m] = p.id;
  }
  for (const Position& p : ceg.positions) {
    const TreeNode& rep = tree.nodes[p.members.front()];
    const auto& outcomes = tree.spec->variables[rep.variable].outcomes;
    for (std::size_t k = 0; k < rep.children.size(); ++k) {
      ceg.edges.push_back(CegEdge{p.id, static_cast<int>(k), outcomes[k],
                                  ceg.position_of[rep.children[k]]});
    }
  }
  return ceg;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += "\"";
  return out;
}

std::string node_label(const EventTree& tree, int id,
                       DotOptions::Labels labels) {
  if (labels == DotOptions::Labels::kContexts) {
    return context_to_string(*tree.spec, tree.context_of(id));
  }
  return "w_" + std::to_string(id);
}

// Palette colors re-derived per options so one staging can be rendered under
// different palettes.
std::vector<std::string> stage_fill_colors(const StagedTree& staged,
                                           const std::string& palette) {
  std::vector<std::string> colors(staged.stages.size());
  int rank = 0;
  for (const Stage& s : staged.stages) {
    if (s.singleton()) continue;
    colors[s.id] = stage_palette_color(palette, rank++);
  }
  return colors;
}

void emit_tree_nodes(std::ostringstream& out, const EventTree& tree,
                     const std::vector<std::string>* fill,
                     const std::vector<int>* stage_of,
                     const DotOptions& options) {
  for (int id = 0; id < tree.node_count(); ++id) {
    out << "  n" << id << " [label=" << quote(node_label(tree, id, options.labels));
    if (fill && !tree.nodes[id].is_leaf()) {
      const std::string& color = (*fill)[(*stage_of)[id]];
      if (!color.empty()) {
        out << ", style=filled, fillcolor=" << quote(color);
      }
    }
    out << "];\n";
  }
  for (int id = 0; id < tree.node_count(); ++id) {
    const TreeNode& node = tree.nodes[id];
    if (node.is_leaf()) continue;
    const auto& outcomes = tree.spec->variables[node.variable].outcomes;
    for (std::size_t k = 0; k < node.children.size(); ++k) {
      out << "  n" << id << " -> n" << node.children[k]
          << " [label=" << quote(outcomes[k]) << "];\n";
    }
  }
}

}  // namespace

std::string export_dot(const EventTree& tree, const DotOptions& options) {
  std::ostringstream out;
  out << "digraph event_tree {\n  rankdir=LR;\n";
  emit_tree_nodes(out, tree, nullptr, nullptr, options);
  out << "}\n";
  return out.str();
}

std::string export_dot(const StagedTree& staged, const DotOptions& options) {
  std::ostringstream out;
  out << "digraph staged_tree {\n  rankdir=LR;\n";
  const auto fill = stage_fill_colors(staged, options.palette);
  emit_tree_nodes(out, *staged.tree, &fill, &staged.stage_of, options);
  out << "}\n";
  return out.str();
}

std::string export_dot(const Ceg& ceg, const DotOptions& options) {
  const EventTree& tree = *ceg.staged.tree;
  const auto fill = stage_fill_colors(ceg.staged, options.palette);
  std::ostringstream out;
  out << "digraph ceg {\n  rankdir=LR;\n";
  for (const Position& p : ceg.positions) {
    std::string label;
    if (options.labels == DotOptions::Labels::kContexts) {
      label = context_to_string(*tree.spec, tree.context_of(p.members.front()));
    } else {
      label = "w_" + std::to_string(p.id);
    }
    out << "  p" << p.id << " [label=" << quote(label);
    const std::string& color = fill[p.stage];
    if (!color.empty()) out << ", style=filled, fillcolor=" << quote(color);
    out << "];\n";
  }
  out << "  p" << ceg.sink << " [label=\"w_inf\", shape=doublecircle];\n";
  for (const CegEdge& e : ceg.edges) {
    out << "  p" << e.source << " -> p" << e.target
        << " [label=" << quote(e.label) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace abmceg
