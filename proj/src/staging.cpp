#include "abmceg/staging.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace abmceg {

namespace {

const std::vector<std::string>& named_palette(const std::string& palette) {
  static const std::vector<std::string> figure = {"yellow", "green", "orange",
                                                  "pink"};
  static const std::vector<std::string> pastel = {"lightyellow", "palegreen",
                                                  "peachpuff", "lightpink"};
  if (palette == "pastel") return pastel;
  if (palette == "figure") return figure;
  throw SpecError("unknown palette '" + palette + "'");
}

// Overflow colors: golden-ratio hue stepping, fixed saturation/value.
std::string generated_color(int index) {
  const double h = std::fmod(0.618033988749895 * (index + 1), 1.0) * 6.0;
  const double s = 0.45, v = 0.93;
  const int i = static_cast<int>(h);
  const double f = h - i;
  const double p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  double r = 0, g = 0, b = 0;
  switch (i % 6) {
    case 0: r = v; g = t; b = p; break;
    case 1: r = q; g = v; b = p; break;
    case 2: r = p; g = v; b = t; break;
    case 3: r = p; g = q; b = v; break;
    case 4: r = t; g = p; b = v; break;
    case 5: r = v; g = p; b = q; break;
  }
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02X%02X%02X", static_cast<int>(r * 255),
                static_cast<int>(g * 255), static_cast<int>(b * 255));
  return buf;
}

// Non-singleton stages take palette colors in stage-id order; singletons stay
// unfilled, like the root.
void assign_colors(std::vector<Stage>& stages, const std::string& palette) {
  const auto& named = named_palette(palette);
  int rank = 0;
  for (Stage& stage : stages) {
    if (stage.singleton()) {
      stage.color.clear();
      continue;
    }
    stage.color = rank < static_cast<int>(named.size())
                      ? named[rank]
                      : generated_color(rank - static_cast<int>(named.size()));
    ++rank;
  }
}

// Rebuilds ids, stage_of and colors from raw member groups.  Stages are
// ordered by (variable, then provenance clause order when available, then
// smallest member).
StagedTree canonicalize(std::shared_ptr<const EventTree> tree,
                        std::vector<Stage> stages) {
  for (Stage& s : stages) {
    std::sort(s.members.begin(), s.members.end());
    std::sort(s.clauses.begin(), s.clauses.end());
    s.clauses.erase(std::unique(s.clauses.begin(), s.clauses.end()),
                    s.clauses.end());
  }
  std::sort(stages.begin(), stages.end(), [](const Stage& a, const Stage& b) {
    if (a.variable != b.variable) return a.variable < b.variable;
    if (a.clauses != b.clauses) return a.clauses < b.clauses;
    return a.members.front() < b.members.front();
  });
  StagedTree staged;
  staged.tree = std::move(tree);
  staged.stage_of.assign(staged.tree->node_count(), kUnset);
  for (std::size_t i = 0; i < stages.size(); ++i) {
    stages[i].id = static_cast<int>(i);
    for (int m : stages[i].members) staged.stage_of[m] = static_cast<int>(i);
  }
  assign_colors(stages, "figure");
  staged.stages = std::move(stages);
  return staged;
}

}  // namespace

std::string stage_palette_color(const std::string& palette, int index) {
  const auto& named = named_palette(palette);
  if (index < static_cast<int>(named.size())) return named[index];
  return generated_color(index - static_cast<int>(named.size()));
}

StagedTree derive_staging(std::shared_ptr<const EventTree> tree) {
  const AbmSpec& spec = *tree->spec;
  std::map<std::pair<int, int>, std::vector<int>> members;  // (var, clause)
  for (int s = 0; s < tree->situation_count; ++s) {
    const TreeNode& node = tree->nodes[s];
    members[{node.variable, node.clause}].push_back(s);
  }

  std::vector<Stage> stages;
  std::vector<std::string> warnings;
  for (std::size_t v = 0; v < spec.variables.size(); ++v) {
    bool variable_seen = false;
    for (std::size_t c = 0; c < spec.rules[v].size(); ++c) {
      auto it = members.find({static_cast<int>(v), static_cast<int>(c)});
      if (it == members.end()) continue;
      variable_seen = true;
      Stage stage;
      stage.variable = static_cast<int>(v);
      stage.members = it->second;
      stage.clauses = {static_cast<int>(c)};
      stages.push_back(std::move(stage));
    }
    if (!variable_seen) {
      warnings.push_back("variable '" + spec.variables[v].name +
                         "' is never applicable");
      continue;
    }
    for (std::size_t c = 0; c < spec.rules[v].size(); ++c) {
      if (!members.count({static_cast<int>(v), static_cast<int>(c)})) {
        warnings.push_back("rules." + spec.variables[v].name + "[" +
                           std::to_string(c) +
                           "] matches no reachable context");
      }
      for (std::size_t d = c + 1; d < spec.rules[v].size(); ++d) {
        if (spec.rules[v][c].probs == spec.rules[v][d].probs) {
          warnings.push_back(
              "clauses " + std::to_string(c) + " and " + std::to_string(d) +
              " of '" + spec.variables[v].name +
              "' have identical probability vectors; kept as distinct stages");
        }
      }
    }
  }

  StagedTree staged = canonicalize(std::move(tree), std::move(stages));
  staged.name = "rule";
  staged.warnings = std::move(warnings);
  return staged;
}

StagedTree saturated_staging(std::shared_ptr<const EventTree> tree) {
  std::vector<Stage> stages;
  for (int s = 0; s < tree->situation_count; ++s) {
    Stage stage;
    stage.variable = tree->nodes[s].variable;
    stage.members = {s};
    stage.clauses = {tree->nodes[s].clause};
    stages.push_back(std::move(stage));
  }
  StagedTree staged = canonicalize(std::move(tree), std::move(stages));
  staged.name = "saturated";
  return staged;
}

StagedTree merge_stages(const StagedTree& staged, int a, int b) {
  const int n = static_cast<int>(staged.stages.size());
  if (a < 0 || b < 0 || a >= n || b >= n || a == b) {
    throw SpecError("invalid stage pair (" + std::to_string(a) + ", " +
                    std::to_string(b) + ")");
  }
  if (staged.stages[a].variable != staged.stages[b].variable) {
    throw SpecError("stages " + std::to_string(a) + " and " +
                    std::to_string(b) + " carry different variables");
  }
  std::vector<Stage> stages;
  Stage merged;
  for (const Stage& s : staged.stages) {
    if (s.id == a || s.id == b) {
      merged.variable = s.variable;
      merged.members.insert(merged.members.end(), s.members.begin(),
                            s.members.end());
      merged.clauses.insert(merged.clauses.end(), s.clauses.begin(),
                            s.clauses.end());
    } else {
      stages.push_back(s);
    }
  }
  stages.push_back(std::move(merged));
  StagedTree out = canonicalize(staged.tree, std::move(stages));
  out.id = staged.id;
  out.name = staged.name + "/m" + std::to_string(a) + "+" + std::to_string(b);
  return out;
}

std::vector<IndependenceStatement> extract_independencies(
    const StagedTree& staged) {
  std::vector<IndependenceStatement> out;
  const AbmSpec& spec = *staged.tree->spec;
  for (const Stage& stage : staged.stages) {
    // Only rule-derived stages carry a single defining condition.
    if (stage.singleton() || stage.clauses.size() != 1) continue;
    const Condition& cond = spec.rules[stage.variable][stage.clauses[0]].condition;
    IndependenceStatement s;
    s.subject = stage.variable;
    s.given = cond;
    for (int v = 0; v < stage.variable; ++v) {
      if (!cond.constrains(v)) s.independent_of.push_back(v);
    }
    if (s.independent_of.empty()) continue;
    out.push_back(std::move(s));
  }
  return out;
}

std::string independence_to_string(const AbmSpec& spec,
                                   const IndependenceStatement& s) {
  std::string out = spec.variables[s.subject].name + " _||_ {";
  for (std::size_t i = 0; i < s.independent_of.size(); ++i) {
    if (i > 0) out += ", ";
    out += spec.variables[s.independent_of[i]].name;
  }
  out += "}";
  if (!s.given.empty()) out += " | " + condition_to_string(spec, s.given);
  return out;
}

std::vector<StagedTree> enumerate_coarsenings(const StagedTree& staged,
                                              int max_models) {
  if (max_models < 1) throw SpecError("max_models must be >= 1");

  auto signature = [](const StagedTree& st) {
    std::vector<std::vector<int>> sig;
    for (const Stage& s : st.stages) sig.push_back(s.members);
    return sig;
  };

  std::vector<StagedTree> out;
  out.push_back(staged);
  out.back().id = 0;
  std::set<std::vector<std::vector<int>>> seen = {signature(staged)};
  std::deque<std::size_t> frontier = {0};

  while (!frontier.empty() && static_cast<int>(out.size()) < max_models) {
    const StagedTree current = out[frontier.front()];
    frontier.pop_front();

    // Candidate pairs: same variable, smallest combined size first.
    std::vector<std::pair<int, int>> pairs;
    for (std::size_t i = 0; i < current.stages.size(); ++i) {
      for (std::size_t j = i + 1; j < current.stages.size(); ++j) {
        if (current.stages[i].variable == current.stages[j].variable) {
          pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
        }
      }
    }
    std::stable_sort(pairs.begin(), pairs.end(),
                     [&](const auto& p, const auto& q) {
                       const auto size = [&](const auto& pr) {
                         return current.stages[pr.first].members.size() +
                                current.stages[pr.second].members.size();
                       };
                       return size(p) < size(q);
                     });

    for (const auto& [i, j] : pairs) {
      if (static_cast<int>(out.size()) >= max_models) break;
      StagedTree merged = merge_stages(current, i, j);
      auto sig = signature(merged);
      if (!seen.insert(std::move(sig)).second) continue;
      merged.id = static_cast<int>(out.size());
      merged.name = "coarsen-" + std::to_string(merged.id);
      frontier.push_back(out.size());
      out.push_back(std::move(merged));
    }
  }
  return out;
}

std::string staging_report(const StagedTree& staged) {
  const AbmSpec& spec = *staged.tree->spec;
  std::ostringstream out;
  for (const Stage& stage : staged.stages) {
    out << "stage " << stage.id << "  var=" << spec.variables[stage.variable].name;
    if (stage.clauses.size() == 1) {
      const auto& cond = spec.rules[stage.variable][stage.clauses[0]].condition;
      out << "  if=" << condition_to_string(spec, cond);
    } else {
      out << "  clauses=[";
      for (std::size_t i = 0; i < stage.clauses.size(); ++i) {
        out << (i ? "," : "") << stage.clauses[i];
      }
      out << "]";
    }
    if (!stage.color.empty()) out << "  color=" << stage.color;
    out << "\n";
    for (int m : stage.members) {
      out << "  w_" << m << ": "
          << context_to_string(spec, staged.tree->context_of(m)) << "\n";
    }
  }
  for (const auto& s : extract_independencies(staged)) {
    out << independence_to_string(spec, s) << "\n";
  }
  for (const auto& w : staged.warnings) out << "warning: " << w << "\n";
  return out.str();
}

}  // namespace abmceg
