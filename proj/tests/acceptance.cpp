// Acceptance gate: eight end-to-end checks over the worked migration example
// and randomized property suites.  Prints one PASS/FAIL line per criterion;
// exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "abmceg/ceg.hpp"
#include "abmceg/csv.hpp"
#include "abmceg/simulate.hpp"
#include "support/oracles.hpp"
#include "support/random_spec.hpp"
#include "support/util.hpp"

namespace fs = std::filesystem;
using namespace abmceg;

namespace {

struct Criterion {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
};

int g_failed = 0;

void report(int number, const std::string& title, const Criterion& c) {
  if (c.failures.empty()) {
    std::cout << "PASS " << number << ": " << title << "\n";
    return;
  }
  ++g_failed;
  std::cout << "FAIL " << number << ": " << title;
  for (const auto& f : c.failures) std::cout << "\n  - " << f;
  std::cout << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

bool has_member_set(const std::vector<Stage>& stages, const std::vector<int>& want) {
  for (const Stage& s : stages) {
    if (s.members == want) return true;
  }
  return false;
}

bool has_position(const std::vector<Position>& positions, const std::vector<int>& want) {
  for (const Position& p : positions) {
    if (p.members == want) return true;
  }
  return false;
}

// ---- criterion 1: worked-example structure ------------------------------

void criterion_structure() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();

  const StagedTree staged = testutil::fixture_staging();
  const EventTree& tree = *staged.tree;
  c.expect(tree.situation_count == 11, "situation count != 11");
  c.expect(tree.leaf_count == 12, "leaf count != 12");
  c.expect(tree.edge_count() == 22, "edge count != 22");

  c.expect(staged.stages.size() == 6, "stage count != 6");
  c.expect(has_member_set(staged.stages, {0}), "missing root stage {0}");
  c.expect(has_member_set(staged.stages, {1, 2}), "missing offer stage {1,2}");
  c.expect(has_member_set(staged.stages, {3, 5}), "missing employment stage {3,5}");
  c.expect(has_member_set(staged.stages, {4, 7, 8}),
           "missing low-SES migration stage {4,7,8}");
  c.expect(has_member_set(staged.stages, {9}), "missing singleton stage {9}");
  c.expect(has_member_set(staged.stages, {6, 10}), "missing migration stage {6,10}");

  const Ceg ceg = build_ceg(staged);
  c.expect(has_position(ceg.positions, {4, 7, 8}),
           "low-SES migration situations are not one position");
  c.expect(has_position(ceg.positions, {6, 10}),
           "the two {6,10} migration situations are not one position");
  c.expect(ceg.node_count() == static_cast<int>(ceg.positions.size()) + 1,
           "CEG node count != positions + sink");
  c.expect(ceg.positions.size() == 8, "position count != 8");

  const double elapsed = seconds_since(start);
  c.expect(elapsed < 1.0, "took " + std::to_string(elapsed) + "s (budget 1s)");
  report(1, "worked example structure (11/12 tree, 6 stages, 8 positions)", c);
}

// ---- criterion 2: independence statements -------------------------------

void criterion_independencies() {
  Criterion c;
  const StagedTree staged = testutil::fixture_staging();
  const AbmSpec& spec = *staged.tree->spec;
  std::vector<std::string> rendered;
  for (const auto& s : extract_independencies(staged)) {
    rendered.push_back(independence_to_string(spec, s));
  }
  const auto contains = [&](const std::string& want) {
    for (const auto& r : rendered) {
      if (r == want) return true;
    }
    return false;
  };
  c.expect(contains("X_M _||_ {X_O, X_E} | X_I=low"),
           "missing: X_M _||_ {X_O, X_E} | X_I=low");
  c.expect(contains("X_M _||_ {X_O} | X_I=mid-high, X_E!=yes"),
           "missing: X_M _||_ {X_O} | X_I=mid-high, X_E!=yes");
  report(2, "rule-implied independence statements", c);
}

// ---- criterion 3: conjugacy oracle --------------------------------------

void criterion_conjugacy() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3003);

  for (int rep = 0; rep < 100; ++rep) {
    auto tree = testgen::random_tree(rng, 30);
    const StagedTree staged = testgen::random_staging(rng, tree);
    PriorConfig config;
    config.ess = std::uniform_real_distribution<double>(0.25, 6.0)(rng);
    const auto priors = allocate_priors(staged, config);

    SimConfig sim;
    sim.n = std::uniform_int_distribution<long long>(0, 20)(rng);
    sim.seed = rng();
    const TrajectoryDataset data = simulate(*tree->spec, sim);

    const auto counts = count_stage_outcomes(staged, data);
    const auto posts = posterior_update(priors, counts);
    for (std::size_t s = 0; s < posts.size(); ++s) {
      for (std::size_t k = 0; k < posts[s].alpha_post.size(); ++k) {
        if (posts[s].alpha_post[k] !=
            posts[s].alpha_prior[k] + static_cast<double>(counts[s][k])) {
          c.expect(false, "rep " + std::to_string(rep) + ": inexact update");
        }
      }
    }

    const double closed =
        log_marginal_likelihood(staged, priors, counts).log_marginal_likelihood;
    const double oracle = testoracle::sequential_log_marginal(staged, priors, data);
    if (std::abs(closed - oracle) > 1e-9) {
      c.expect(false, "rep " + std::to_string(rep) + ": |closed - sequential| = " +
                          std::to_string(std::abs(closed - oracle)));
    }
  }

  const double elapsed = seconds_since(start);
  c.expect(elapsed < 5.0, "took " + std::to_string(elapsed) + "s (budget 5s)");
  report(3, "conjugate update and closed-form score vs sequential oracle", c);
}

// ---- criterion 4: position oracle ----------------------------------------

void criterion_positions() {
  Criterion c;
  std::mt19937_64 rng(4004);
  for (int rep = 0; rep < 50; ++rep) {
    auto tree = testgen::random_tree(rng, 12);
    const StagedTree staged = testgen::random_staging(rng, tree);
    const auto oracle = testoracle::positions_by_pairwise_check(staged);
    const auto positions = compute_positions(staged);
    bool equal = positions.size() == oracle.size();
    for (std::size_t i = 0; equal && i < positions.size(); ++i) {
      equal = positions[i].members == oracle[i];
    }
    c.expect(equal, "rep " + std::to_string(rep) +
                        ": positions differ from the pairwise oracle");
  }
  report(4, "position computation vs pairwise-isomorphism oracle", c);
}

// ---- criterion 5: phantom-mass conservation ------------------------------

void criterion_phantom_mass() {
  Criterion c;
  std::mt19937_64 rng(5005);
  for (int rep = 0; rep < 50; ++rep) {
    auto tree = testgen::random_tree(rng, 60);
    PriorConfig config;
    config.ess = std::uniform_real_distribution<double>(0.1, 20.0)(rng);
    const PhantomMasses masses = phantom_masses(*tree, config);

    const StagedTree staged = derive_staging(tree);
    const auto priors = allocate_priors(staged, config);
    const int root_stage = staged.stage_of[EventTree::kRoot];
    double root_alpha = 0.0;
    for (double a : priors[root_stage].alpha_prior) root_alpha += a;
    c.expect(std::abs(root_alpha - config.ess) <= 1e-12 * config.ess,
             "rep " + std::to_string(rep) + ": root alpha sum != ess");

    for (int s = 0; s < tree->situation_count; ++s) {
      double out = 0.0;
      for (double m : masses.edge[s]) out += m;
      if (std::abs(out - masses.arrival[s]) >
          1e-12 * std::max(1.0, masses.arrival[s])) {
        c.expect(false, "rep " + std::to_string(rep) + ": mass not conserved at w_" +
                            std::to_string(s));
      }
    }
  }
  report(5, "phantom-sample mass conservation", c);
}

// ---- criterion 6: model selection at desk scale --------------------------

void criterion_model_selection() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();

  const StagedTree rule = testutil::fixture_staging();
  const AbmSpec& spec = *rule.tree->spec;

  // Candidates: the generating staging, an over-coarse merge, the saturated
  // staging.
  std::vector<StagedTree> candidates = enumerate_coarsenings(rule, 2);
  StagedTree sat = saturated_staging(rule.tree);
  sat.id = 2;
  candidates.push_back(sat);

  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SimConfig sim;
    sim.n = 1000;
    sim.seed = seed;
    const TrajectoryDataset data = simulate(spec, sim);
    const ComparisonResult result = compare_models(candidates, data, PriorConfig{});
    if (result.ranking.front().staging_id == rule.id) ++wins;
  }
  c.expect(wins >= 18, "generating staging won only " + std::to_string(wins) +
                           "/20 seeds (need 18)");

  const double elapsed = seconds_since(start);
  c.expect(elapsed < 30.0, "took " + std::to_string(elapsed) + "s (budget 30s)");
  report(6, "generating staging wins model comparison (n=1000, 20 seeds)", c);
}

// ---- criterion 7: posterior consistency -----------------------------------

void criterion_consistency() {
  Criterion c;
  const StagedTree staged = testutil::fixture_staging();
  const AbmSpec& spec = *staged.tree->spec;

  SimConfig sim;
  sim.n = 10000;
  sim.seed = 707;
  const TrajectoryDataset data = simulate(spec, sim);

  const auto counts = count_stage_outcomes(staged, data);
  const auto posts = posterior_update(allocate_priors(staged, PriorConfig{}), counts);
  for (const Stage& s : staged.stages) {
    long long visits = 0;
    for (long long n : posts[s.id].counts) visits += n;
    if (visits == 0) continue;
    const auto mean = posts[s.id].posterior_mean();
    const auto& probs = spec.rules[s.variable][s.clauses[0]].probs;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      if (std::abs(mean[k] - probs[k]) >= 0.02) {
        c.expect(false, "stage " + std::to_string(s.id) + " outcome " +
                            std::to_string(k) + ": |posterior mean - p| = " +
                            std::to_string(std::abs(mean[k] - probs[k])));
      }
    }
  }
  report(7, "posterior means track generating probabilities (n=10^4)", c);
}

// ---- criterion 8: CLI byte-determinism ------------------------------------

std::string run_cli_capture(const std::string& args, int& exit_code) {
  const std::string cmd = std::string(ABMCEG_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    exit_code = -1;
    return {};
  }
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
  exit_code = pclose(pipe);
  return out;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_cli_determinism() {
  Criterion c;
  const fs::path dir = fs::temp_directory_path() / "abmceg_acceptance";
  fs::create_directories(dir);
  const std::string fixture = testutil::fixture_path();
  const std::string sim_csv = (dir / "sim.csv").string();
  const std::string dot = (dir / "graph.dot").string();

  // Fixed trajectory data shared by fit/compare so their inputs do not vary.
  int code = 0;
  run_cli_capture("simulate " + fixture + " --n 200 --seed 4 --out " + sim_csv, code);
  c.expect(code == 0, "seed data generation failed");

  struct Command {
    std::string args;
    std::vector<std::string> output_files;
  };
  const std::vector<Command> commands = {
      {"validate " + fixture, {}},
      {"validate " + fixture + " --json", {}},
      {"tree " + fixture + " --dot " + dot, {dot}},
      {"tree " + fixture + " --json", {}},
      {"stage " + fixture + " --dot " + dot, {dot}},
      {"stage " + fixture + " --json", {}},
      {"ceg " + fixture + " --dot " + dot, {dot}},
      {"ceg " + fixture + " --json", {}},
      {"export-dot " + fixture + " --what tree", {}},
      {"export-dot " + fixture + " --what staged --labels contexts", {}},
      {"export-dot " + fixture + " --what ceg --palette pastel", {}},
      {"simulate " + fixture + " --n 50 --seed 123", {}},
      {"simulate " + fixture + " --n 50 --seed 123 --out " + sim_csv + ".b",
       {sim_csv + ".b"}},
      {"fit " + fixture + " --data " + sim_csv + " --ess 1", {}},
      {"fit " + fixture + " --data " + sim_csv + " --ess 4 --json", {}},
      {"compare " + fixture + " --data " + sim_csv + " --coarsenings 2 --saturated",
       {}},
      {"compare " + fixture + " --data " + sim_csv + " --ess-grid 0.5,1,2 --json",
       {}},
  };

  for (const Command& command : commands) {
    int code_a = 0, code_b = 0;
    const std::string out_a = run_cli_capture(command.args, code_a);
    std::vector<std::string> files_a;
    for (const auto& f : command.output_files) files_a.push_back(slurp(f));

    const std::string out_b = run_cli_capture(command.args, code_b);
    std::vector<std::string> files_b;
    for (const auto& f : command.output_files) files_b.push_back(slurp(f));

    if (code_a != 0 || code_b != 0) {
      c.expect(false, "'" + command.args + "' exited nonzero");
      continue;
    }
    c.expect(out_a == out_b, "'" + command.args + "' stdout differs between runs");
    c.expect(!out_a.empty() || !command.output_files.empty(),
             "'" + command.args + "' produced no output");
    c.expect(files_a == files_b,
             "'" + command.args + "' output files differ between runs");
  }

  report(8, "CLI commands are byte-deterministic", c);
}

}  // namespace

int main() {
  criterion_structure();
  criterion_independencies();
  criterion_conjugacy();
  criterion_positions();
  criterion_phantom_mass();
  criterion_model_selection();
  criterion_consistency();
  criterion_cli_determinism();

  if (g_failed > 0) {
    std::cout << g_failed << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 8 acceptance criteria passed\n";
  return 0;
}
