#include "abmceg/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "abmceg/ceg.hpp"
#include "abmceg/csv.hpp"
#include "abmceg/inference.hpp"
#include "abmceg/simulate.hpp"

namespace abmceg {

namespace {

using ordered_json = nlohmann::ordered_json;

// Exit codes: 0 success, 1 usage, 2 model/data validation or I/O failure.
constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kFailure = 2;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << content;
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", x);
  return buf;
}

struct Pipeline {
  std::shared_ptr<const AbmSpec> spec;
  std::shared_ptr<const EventTree> tree;
  StagedTree staged;
};

Pipeline load_pipeline(const std::string& spec_path) {
  auto spec = std::make_shared<const AbmSpec>(parse_abm(read_file(spec_path)));
  auto tree = std::make_shared<const EventTree>(build_tree(spec));
  StagedTree staged = derive_staging(tree);
  return Pipeline{std::move(spec), std::move(tree), std::move(staged)};
}

std::string stage_condition_label(const AbmSpec& spec, const Stage& stage) {
  if (stage.clauses.size() == 1) {
    return condition_to_string(
        spec, spec.rules[stage.variable][stage.clauses[0]].condition);
  }
  std::string out = "clauses[";
  for (std::size_t i = 0; i < stage.clauses.size(); ++i) {
    out += (i ? "," : "") + std::to_string(stage.clauses[i]);
  }
  return out + "]";
}

ordered_json context_json(const AbmSpec& spec, const Context& ctx) {
  ordered_json obj = ordered_json::object();
  for (std::size_t v = 0; v < ctx.size(); ++v) {
    if (ctx[v] != kUnset) {
      obj[spec.variables[v].name] = spec.variables[v].outcomes[ctx[v]];
    }
  }
  return obj;
}

struct Options {
  std::string spec_path;
  std::string dot_path;
  std::string what = "tree";
  std::string labels = "indices";
  std::string palette = "figure";
  std::string out_path;
  std::string data_path;
  std::string ess_grid;
  long long n = 0;
  std::uint64_t seed = 0;
  double ess = 1.0;
  int coarsenings = 1;
  bool saturated = false;
  bool json = false;
};

DotOptions dot_options(const Options& opt) {
  DotOptions d;
  if (opt.labels == "contexts") {
    d.labels = DotOptions::Labels::kContexts;
  } else if (opt.labels != "indices") {
    throw CLI::ValidationError("--labels", "expected 'indices' or 'contexts'");
  }
  d.palette = opt.palette;
  return d;
}

int cmd_validate(const Options& opt, std::ostream& out) {
  const AbmSpec spec = parse_abm_document(read_file(opt.spec_path));
  const auto diags = validate_partition(spec);
  if (opt.json) {
    ordered_json j;
    j["notes"] = spec.notes;
    j["diagnostics"] = ordered_json::array();
    for (const auto& d : diags) {
      ordered_json jd;
      jd["kind"] = d.kind == Diagnostic::Kind::kUncoveredContext
                       ? "uncovered"
                       : "doubly_covered";
      jd["variable"] = d.variable;
      jd["context"] = context_json(spec, d.context);
      jd["clauses"] = d.clauses;
      jd["message"] = d.message;
      j["diagnostics"].push_back(std::move(jd));
    }
    out << j.dump(2) << "\n";
  } else {
    for (const auto& note : spec.notes) out << "note: " << note << "\n";
    for (const auto& d : diags) out << d.message << "\n";
    out << diags.size() << " diagnostics\n";
  }
  return diags.empty() ? kOk : kFailure;
}

int cmd_tree(const Options& opt, std::ostream& out) {
  const Pipeline p = load_pipeline(opt.spec_path);
  if (!opt.dot_path.empty()) {
    write_file(opt.dot_path, export_dot(*p.tree, dot_options(opt)));
  }
  if (opt.json) {
    ordered_json j;
    j["situations"] = p.tree->situation_count;
    j["leaves"] = p.tree->leaf_count;
    j["edges"] = p.tree->edge_count();
    out << j.dump(2) << "\n";
  } else {
    out << "situations=" << p.tree->situation_count
        << " leaves=" << p.tree->leaf_count
        << " edges=" << p.tree->edge_count() << "\n";
  }
  return kOk;
}

int cmd_stage(const Options& opt, std::ostream& out) {
  const Pipeline p = load_pipeline(opt.spec_path);
  if (!opt.dot_path.empty()) {
    write_file(opt.dot_path, export_dot(p.staged, dot_options(opt)));
  }
  if (opt.json) {
    const AbmSpec& spec = *p.spec;
    ordered_json j;
    j["situations"] = p.tree->situation_count;
    j["stages"] = ordered_json::array();
    for (const Stage& s : p.staged.stages) {
      ordered_json js;
      js["id"] = s.id;
      js["variable"] = spec.variables[s.variable].name;
      js["condition"] = stage_condition_label(spec, s);
      js["color"] = s.color;
      js["members"] = s.members;
      js["contexts"] = ordered_json::array();
      for (int m : s.members) {
        js["contexts"].push_back(context_json(spec, p.tree->context_of(m)));
      }
      j["stages"].push_back(std::move(js));
    }
    j["independencies"] = ordered_json::array();
    for (const auto& s : extract_independencies(p.staged)) {
      j["independencies"].push_back(independence_to_string(*p.spec, s));
    }
    j["warnings"] = p.staged.warnings;
    out << j.dump(2) << "\n";
  } else {
    out << "situations=" << p.tree->situation_count
        << " stages=" << p.staged.stages.size() << "\n";
    out << staging_report(p.staged);
  }
  return kOk;
}

int cmd_ceg(const Options& opt, std::ostream& out) {
  const Pipeline p = load_pipeline(opt.spec_path);
  const Ceg ceg = build_ceg(p.staged);
  if (!opt.dot_path.empty()) {
    write_file(opt.dot_path, export_dot(ceg, dot_options(opt)));
  }
  if (opt.json) {
    ordered_json j;
    j["situations"] = p.tree->situation_count;
    j["stages"] = p.staged.stages.size();
    j["positions"] = ceg.positions.size();
    j["ceg_nodes"] = ceg.node_count();
    j["ceg_edges"] = ceg.edges.size();
    j["position_members"] = ordered_json::array();
    for (const Position& pos : ceg.positions) {
      j["position_members"].push_back(pos.members);
    }
    out << j.dump(2) << "\n";
  } else {
    out << "situations=" << p.tree->situation_count
        << " stages=" << p.staged.stages.size()
        << " positions=" << ceg.positions.size()
        << " ceg_nodes=" << ceg.node_count() << "\n";
  }
  return kOk;
}

int cmd_export_dot(const Options& opt, std::ostream& out) {
  const Pipeline p = load_pipeline(opt.spec_path);
  std::string dot;
  if (opt.what == "tree") {
    dot = export_dot(*p.tree, dot_options(opt));
  } else if (opt.what == "staged") {
    dot = export_dot(p.staged, dot_options(opt));
  } else if (opt.what == "ceg") {
    dot = export_dot(build_ceg(p.staged), dot_options(opt));
  } else {
    throw CLI::ValidationError("--what", "expected 'tree', 'staged' or 'ceg'");
  }
  if (opt.out_path.empty()) {
    out << dot;
  } else {
    write_file(opt.out_path, dot);
  }
  return kOk;
}

int cmd_simulate(const Options& opt, std::ostream& out) {
  const auto spec =
      std::make_shared<const AbmSpec>(parse_abm(read_file(opt.spec_path)));
  SimConfig config;
  config.n = opt.n;
  config.seed = opt.seed;
  const TrajectoryDataset data = simulate(*spec, config);
  const std::string csv = write_trajectory_csv(*spec, data, opt.seed);
  if (opt.json) {
    if (opt.out_path.empty()) {
      throw CLI::ValidationError("--json", "simulate --json requires --out");
    }
    write_file(opt.out_path, csv);
    ordered_json j;
    j["rows"] = data.n();
    j["seed"] = opt.seed;
    j["generator"] = generator_name();
    j["out"] = opt.out_path;
    out << j.dump(2) << "\n";
  } else if (opt.out_path.empty()) {
    out << csv;
  } else {
    write_file(opt.out_path, csv);
    out << "wrote " << data.n() << " rows to " << opt.out_path << "\n";
  }
  return kOk;
}

int cmd_fit(const Options& opt, std::ostream& out) {
  const Pipeline p = load_pipeline(opt.spec_path);
  const TrajectoryDataset data =
      read_trajectory_csv(*p.spec, read_file(opt.data_path), opt.data_path);
  PriorConfig config;
  config.ess = opt.ess;
  const auto counts = count_stage_outcomes(p.staged, data);
  const auto posts = posterior_update(allocate_priors(p.staged, config), counts);

  if (opt.json) {
    ordered_json j;
    j["ess"] = opt.ess;
    j["rows"] = data.n();
    j["stages"] = ordered_json::array();
    for (const Stage& s : p.staged.stages) {
      const StagePosterior& sp = posts[s.id];
      ordered_json js;
      js["id"] = s.id;
      js["variable"] = p.spec->variables[s.variable].name;
      js["condition"] = stage_condition_label(*p.spec, s);
      js["alpha_prior"] = sp.alpha_prior;
      js["counts"] = sp.counts;
      js["alpha_post"] = sp.alpha_post;
      js["mean"] = sp.posterior_mean();
      js["ci90"] = ordered_json::array();
      const double total = std::accumulate(sp.alpha_post.begin(),
                                           sp.alpha_post.end(), 0.0);
      for (double a : sp.alpha_post) {
        const auto [lo, hi] = beta_credible_interval(a, total - a, 0.90);
        js["ci90"].push_back(ordered_json::array({lo, hi}));
      }
      j["stages"].push_back(std::move(js));
    }
    out << j.dump(2) << "\n";
    return kOk;
  }

  out << "stage\tvariable\tif\toutcome\talpha_prior\tcount\talpha_post\tmean\t"
         "ci90_lo\tci90_hi\n";
  for (const Stage& s : p.staged.stages) {
    const StagePosterior& sp = posts[s.id];
    const auto mean = sp.posterior_mean();
    const double total =
        std::accumulate(sp.alpha_post.begin(), sp.alpha_post.end(), 0.0);
    const auto& outcomes = p.spec->variables[s.variable].outcomes;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      const auto [lo, hi] =
          beta_credible_interval(sp.alpha_post[k], total - sp.alpha_post[k], 0.90);
      out << s.id << "\t" << p.spec->variables[s.variable].name << "\t"
          << stage_condition_label(*p.spec, s) << "\t" << outcomes[k] << "\t"
          << fmt(sp.alpha_prior[k]) << "\t" << sp.counts[k] << "\t"
          << fmt(sp.alpha_post[k]) << "\t" << fmt(mean[k]) << "\t" << fmt(lo)
          << "\t" << fmt(hi) << "\n";
    }
  }
  return kOk;
}

std::vector<double> parse_ess_grid(const std::string& grid, double fallback) {
  if (grid.empty()) return {fallback};
  std::vector<double> values;
  std::stringstream ss(grid);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
      values.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--ess-grid",
                                 "'" + item + "' is not a number");
    }
  }
  if (values.empty()) {
    throw CLI::ValidationError("--ess-grid", "no values given");
  }
  return values;
}

int cmd_compare(const Options& opt, std::ostream& out) {
  const Pipeline p = load_pipeline(opt.spec_path);
  const TrajectoryDataset data =
      read_trajectory_csv(*p.spec, read_file(opt.data_path), opt.data_path);

  std::vector<StagedTree> candidates =
      enumerate_coarsenings(p.staged, opt.coarsenings + 1);
  if (opt.saturated) {
    StagedTree sat = saturated_staging(p.tree);
    sat.id = static_cast<int>(candidates.size());
    candidates.push_back(std::move(sat));
  }

  const std::vector<double> grid = parse_ess_grid(opt.ess_grid, opt.ess);
  ordered_json results = ordered_json::array();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    PriorConfig config;
    config.ess = grid[g];
    const ComparisonResult result = compare_models(candidates, data, config);
    const double best = result.ranking.front().log_marginal_likelihood;
    if (opt.json) {
      ordered_json jr;
      jr["ess"] = grid[g];
      jr["ranking"] = ordered_json::array();
      for (const ModelScore& m : result.ranking) {
        ordered_json jm;
        jm["id"] = m.staging_id;
        jm["name"] = m.staging_name;
        jm["stages"] = m.num_stages;
        jm["log_ml"] = m.log_marginal_likelihood;
        jm["delta"] = best - m.log_marginal_likelihood;
        jr["ranking"].push_back(std::move(jm));
      }
      results.push_back(std::move(jr));
    } else {
      if (grid.size() > 1) out << "# ess=" << grid[g] << "\n";
      out << "staging\tstages\tlog_ml\tdelta_vs_best\n";
      for (const ModelScore& m : result.ranking) {
        out << m.staging_id << "\t" << m.num_stages << "\t"
            << fmt(m.log_marginal_likelihood) << "\t"
            << fmt(best - m.log_marginal_likelihood) << "\n";
      }
    }
  }
  if (opt.json) {
    ordered_json j;
    j["results"] = std::move(results);
    out << j.dump(2) << "\n";
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Compile a rule-based single-agent model into a chain event "
               "graph and score stagings on trajectory data"};
  app.name("abmceg");
  app.require_subcommand(1);

  Options opt;
  int (*command)(const Options&, std::ostream&) = nullptr;

  auto add_spec = [&](CLI::App* sub) {
    sub->add_option("spec", opt.spec_path, "model document (.abm.json)")
        ->required();
    sub->add_flag("--json", opt.json, "machine-readable output");
  };

  CLI::App* validate = app.add_subcommand("validate", "check a model document");
  add_spec(validate);

  CLI::App* tree = app.add_subcommand("tree", "event tree summary");
  add_spec(tree);
  tree->add_option("--dot", opt.dot_path, "write a DOT rendering");

  CLI::App* stage = app.add_subcommand("stage", "staging report");
  add_spec(stage);
  stage->add_option("--dot", opt.dot_path, "write a DOT rendering");

  CLI::App* ceg = app.add_subcommand("ceg", "chain event graph summary");
  add_spec(ceg);
  ceg->add_option("--dot", opt.dot_path, "write a DOT rendering");

  CLI::App* export_dot_cmd =
      app.add_subcommand("export-dot", "write DOT for tree, staged tree or CEG");
  add_spec(export_dot_cmd);
  export_dot_cmd->add_option("--what", opt.what, "tree|staged|ceg")->required();
  export_dot_cmd->add_option("--labels", opt.labels, "indices|contexts");
  export_dot_cmd->add_option("--palette", opt.palette, "figure|pastel");
  export_dot_cmd->add_option("--out", opt.out_path, "output path (default stdout)");

  CLI::App* simulate_cmd =
      app.add_subcommand("simulate", "forward-sample trajectories");
  add_spec(simulate_cmd);
  simulate_cmd->add_option("--n", opt.n, "number of trajectories")->required();
  simulate_cmd->add_option("--seed", opt.seed, "RNG seed");
  simulate_cmd->add_option("--out", opt.out_path, "CSV path (default stdout)");

  CLI::App* fit = app.add_subcommand("fit", "posterior means and intervals");
  add_spec(fit);
  fit->add_option("--data", opt.data_path, "trajectory CSV")->required();
  fit->add_option("--ess", opt.ess, "effective sample size");

  CLI::App* compare = app.add_subcommand("compare", "score candidate stagings");
  add_spec(compare);
  compare->add_option("--data", opt.data_path, "trajectory CSV")->required();
  compare->add_option("--ess", opt.ess, "effective sample size");
  compare->add_option("--ess-grid", opt.ess_grid,
                      "comma-separated ess values (sensitivity analysis)");
  compare->add_option("--coarsenings", opt.coarsenings,
                      "number of coarsened candidates to enumerate");
  compare->add_flag("--saturated", opt.saturated,
                    "include the saturated staging");

  validate->callback([&] { command = cmd_validate; });
  tree->callback([&] { command = cmd_tree; });
  stage->callback([&] { command = cmd_stage; });
  ceg->callback([&] { command = cmd_ceg; });
  export_dot_cmd->callback([&] { command = cmd_export_dot; });
  simulate_cmd->callback([&] { command = cmd_simulate; });
  fit->callback([&] { command = cmd_fit; });
  compare->callback([&] { command = cmd_compare; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
    return command(opt, out);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run 'abmceg --help' for usage\n";
    return kUsage;
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace abmceg
