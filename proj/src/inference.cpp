#include "abmceg/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/beta.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace abmceg {

namespace {

double ln_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return lgamma_r(x, &sign);  // reentrant; signgam-free
#else
  return std::lgamma(x);
#endif
}

// Validates one row against the tree and returns its leaf; `visit` is called
// with (situation id, outcome index) along the path.
template <typename Visit>
int trace_row(const EventTree& tree, const Context& row, long long row_number,
              Visit&& visit) {
  const AbmSpec& spec = *tree.spec;
  if (row.size() != spec.variables.size()) {
    throw DataError(row_number, "expected " +
                                    std::to_string(spec.variables.size()) +
                                    " columns");
  }
  int node = EventTree::kRoot;
  while (!tree.nodes[node].is_leaf()) {
    const TreeNode& situation = tree.nodes[node];
    const int v = situation.variable;
    const int k = row[v];
    if (k == kUnset) {
      throw DataError(row_number,
                      "variable '" + spec.variables[v].name +
                          "' is applicable in context " +
                          context_to_string(spec, situation.context) +
                          " but has no value");
    }
    if (k < 0 || k >= static_cast<int>(spec.variables[v].outcomes.size())) {
      throw DataError(row_number, "outcome index out of range for variable '" +
                                      spec.variables[v].name + "'");
    }
    visit(node, k);
    node = situation.children[k];
  }
  const Context& leaf_ctx = tree.nodes[node].context;
  for (std::size_t v = 0; v < leaf_ctx.size(); ++v) {
    if (leaf_ctx[v] == kUnset && row[v] != kUnset) {
      std::string msg = "variable '" + spec.variables[v].name + "' has value '" +
                        spec.variables[v].outcomes[row[v]] +
                        "' but is not applicable on this path";
      if (!spec.variables[v].applicable_if.empty()) {
        msg += " (applicable only when " +
               condition_to_string(spec, spec.variables[v].applicable_if) +
               "; path has " + context_to_string(spec, leaf_ctx) + ")";
      }
      throw DataError(row_number, msg);
    }
  }
  return node;
}

std::vector<std::vector<long long>> zero_situation_counts(const EventTree& tree) {
  std::vector<std::vector<long long>> counts(tree.situation_count);
  for (int s = 0; s < tree.situation_count; ++s) {
    counts[s].assign(tree.spec->variables[tree.nodes[s].variable].outcomes.size(),
                     0);
  }
  return counts;
}

double stage_term(const std::vector<double>& alpha,
                  const std::vector<long long>& counts) {
  double alpha_sum = 0.0;
  long long n = 0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (alpha[k] <= 0.0) {
      throw SpecError("Dirichlet hyperparameter alpha[" + std::to_string(k) +
                      "] = " + std::to_string(alpha[k]) + " must be positive");
    }
    alpha_sum += alpha[k];
    n += counts[k];
  }
  if (n == 0) return 0.0;  // empty product
  double term = ln_gamma(alpha_sum) -
                ln_gamma(alpha_sum + static_cast<double>(n));
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (counts[k] == 0) continue;
    term += ln_gamma(alpha[k] + static_cast<double>(counts[k])) -
            ln_gamma(alpha[k]);
  }
  return term;
}

std::vector<std::vector<long long>> aggregate_stage_counts(
    const StagedTree& staged,
    const std::vector<std::vector<long long>>& visits) {
  std::vector<std::vector<long long>> counts(staged.stages.size());
  for (const Stage& stage : staged.stages) {
    counts[stage.id].assign(visits[stage.members.front()].size(), 0);
    for (int m : stage.members) {
      for (std::size_t k = 0; k < visits[m].size(); ++k) {
        counts[stage.id][k] += visits[m][k];
      }
    }
  }
  return counts;
}

std::vector<StagePosterior> priors_from_masses(const StagedTree& staged,
                                               const PhantomMasses& masses) {
  std::vector<StagePosterior> priors(staged.stages.size());
  for (const Stage& stage : staged.stages) {
    StagePosterior& sp = priors[stage.id];
    sp.stage = stage.id;
    sp.alpha_prior.assign(masses.edge[stage.members.front()].size(), 0.0);
    for (int m : stage.members) {
      for (std::size_t k = 0; k < sp.alpha_prior.size(); ++k) {
        sp.alpha_prior[k] += masses.edge[m][k];
      }
    }
    sp.counts.assign(sp.alpha_prior.size(), 0);
    sp.alpha_post = sp.alpha_prior;
  }
  return priors;
}

}  // namespace

std::vector<double> StagePosterior::posterior_mean() const {
  const double total = std::accumulate(alpha_post.begin(), alpha_post.end(), 0.0);
  std::vector<double> mean(alpha_post.size());
  for (std::size_t k = 0; k < alpha_post.size(); ++k) {
    mean[k] = alpha_post[k] / total;
  }
  return mean;
}

PhantomMasses phantom_masses(const EventTree& tree, const PriorConfig& config) {
  if (!(config.ess > 0.0)) {
    throw SpecError("effective sample size must be > 0");
  }
  const AbmSpec& spec = *tree.spec;
  PhantomMasses masses;
  masses.arrival.assign(tree.node_count(), 0.0);
  masses.edge.resize(tree.node_count());
  masses.arrival[EventTree::kRoot] = config.ess;
  // Parents precede children in both id blocks, so an ascending sweep over
  // situations propagates every arrival before it is split.
  for (int s = 0; s < tree.situation_count; ++s) {
    const TreeNode& node = tree.nodes[s];
    const auto& probs = spec.rules[node.variable][node.clause].probs;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] == 0.0) {
        throw SpecError(
            "rules." + spec.variables[node.variable].name + "[" +
            std::to_string(node.clause) + "] assigns probability 0 to outcome '" +
            spec.variables[node.variable].outcomes[k] +
            "': the Dirichlet prior mass would be 0; raise the entry with a "
            "small floor (e.g. 1e-6) if the outcome must stay");
      }
    }
    double arrival = masses.arrival[s];
    if (auto it = config.arrival_override.find(s);
        it != config.arrival_override.end()) {
      arrival = it->second;
    }
    masses.edge[s].resize(probs.size());
    for (std::size_t k = 0; k < probs.size(); ++k) {
      masses.edge[s][k] = arrival * probs[k];
      masses.arrival[node.children[k]] = masses.edge[s][k];
    }
  }
  return masses;
}

std::vector<StagePosterior> allocate_priors(const StagedTree& staged,
                                            const PriorConfig& config) {
  return priors_from_masses(staged, phantom_masses(*staged.tree, config));
}

std::vector<std::vector<long long>> count_situation_visits(
    const EventTree& tree, const TrajectoryDataset& data, Execution exec) {
  auto counts = zero_situation_counts(tree);
  const long long n = data.n();

#ifdef _OPENMP
  if (exec == Execution::kParallel && n > 1) {
    // Per-thread tallies merged after the loop; the first bad row (smallest
    // row number) wins so errors match serial execution.
    long long bad_row = -1;
    std::string bad_msg;
    #pragma omp parallel
    {
      auto local = zero_situation_counts(tree);
      long long my_bad_row = -1;
      std::string my_bad_msg;
      #pragma omp for schedule(static) nowait
      for (long long i = 0; i < n; ++i) {
        if (my_bad_row >= 0) continue;
        try {
          trace_row(tree, data.rows[i], i + 1,
                    [&](int s, int k) { ++local[s][k]; });
        } catch (const DataError& e) {
          my_bad_row = e.row();
          my_bad_msg = e.what();
        }
      }
      #pragma omp critical(abmceg_count_merge)
      {
        if (my_bad_row >= 0 && (bad_row < 0 || my_bad_row < bad_row)) {
          bad_row = my_bad_row;
          bad_msg = my_bad_msg;
        }
        for (int s = 0; s < tree.situation_count; ++s) {
          for (std::size_t k = 0; k < local[s].size(); ++k) {
            counts[s][k] += local[s][k];
          }
        }
      }
    }
    if (bad_row >= 0) {
      // Re-trace serially so the error text is identical to kSerial.
      trace_row(tree, data.rows[bad_row - 1], bad_row, [](int, int) {});
      throw SpecError("internal: " + bad_msg);  // unreachable
    }
    return counts;
  }
#else
  (void)exec;
#endif

  for (long long i = 0; i < n; ++i) {
    trace_row(tree, data.rows[i], i + 1, [&](int s, int k) { ++counts[s][k]; });
  }
  return counts;
}

std::vector<std::vector<long long>> count_stage_outcomes(
    const StagedTree& staged, const TrajectoryDataset& data, Execution exec) {
  return aggregate_stage_counts(staged,
                                count_situation_visits(*staged.tree, data, exec));
}

std::vector<StagePosterior> posterior_update(
    std::vector<StagePosterior> priors,
    const std::vector<std::vector<long long>>& counts) {
  if (counts.size() != priors.size()) {
    throw SpecError("posterior_update: " + std::to_string(priors.size()) +
                    " stages vs " + std::to_string(counts.size()) +
                    " count vectors");
  }
  for (std::size_t s = 0; s < priors.size(); ++s) {
    if (counts[s].size() != priors[s].alpha_prior.size()) {
      throw SpecError("posterior_update: dimension mismatch at stage " +
                      std::to_string(s));
    }
    priors[s].counts = counts[s];
    priors[s].alpha_post.resize(counts[s].size());
    for (std::size_t k = 0; k < counts[s].size(); ++k) {
      priors[s].alpha_post[k] =
          priors[s].alpha_prior[k] + static_cast<double>(counts[s][k]);
    }
  }
  return priors;
}

ModelScore log_marginal_likelihood(
    const StagedTree& staged, const std::vector<StagePosterior>& priors,
    const std::vector<std::vector<long long>>& counts) {
  if (priors.size() != staged.stages.size() || counts.size() != priors.size()) {
    throw SpecError("log_marginal_likelihood: stage count mismatch");
  }
  ModelScore score;
  score.staging_id = staged.id;
  score.staging_name = staged.name;
  score.num_stages = static_cast<int>(staged.stages.size());
  score.per_stage_terms.resize(priors.size());
  for (std::size_t s = 0; s < priors.size(); ++s) {
    if (counts[s].size() != priors[s].alpha_prior.size()) {
      throw SpecError("log_marginal_likelihood: dimension mismatch at stage " +
                      std::to_string(s));
    }
    score.per_stage_terms[s] = stage_term(priors[s].alpha_prior, counts[s]);
  }
  score.log_marginal_likelihood =
      std::accumulate(score.per_stage_terms.begin(), score.per_stage_terms.end(),
                      0.0);
  return score;
}

ComparisonResult compare_models(const std::vector<StagedTree>& candidates,
                                const TrajectoryDataset& data,
                                const PriorConfig& config, Execution exec) {
  if (candidates.empty()) throw SpecError("no candidate stagings");
  const EventTree& tree = *candidates.front().tree;
  for (const StagedTree& c : candidates) {
    if (c.tree.get() != candidates.front().tree.get() &&
        !same_structure(*c.tree, tree)) {
      throw SpecError("candidate stagings are over different event trees");
    }
  }

  // Shared phantom masses and per-situation visit counts serve every
  // candidate: this is what matches hyperparameters across models.
  const PhantomMasses masses = phantom_masses(tree, config);
  const auto visits = count_situation_visits(tree, data, exec);

  const int n = static_cast<int>(candidates.size());
  std::vector<ModelScore> scores(n);
#ifdef _OPENMP
  #pragma omp parallel for schedule(dynamic) if (exec == Execution::kParallel && n > 1)
#endif
  for (int i = 0; i < n; ++i) {
    const StagedTree& staged = candidates[i];
    const auto priors = priors_from_masses(staged, masses);
    const auto counts = aggregate_stage_counts(staged, visits);
    scores[i] = log_marginal_likelihood(staged, priors, counts);
  }

  std::sort(scores.begin(), scores.end(), [](const ModelScore& a,
                                             const ModelScore& b) {
    if (a.log_marginal_likelihood != b.log_marginal_likelihood) {
      return a.log_marginal_likelihood > b.log_marginal_likelihood;
    }
    if (a.num_stages != b.num_stages) return a.num_stages < b.num_stages;
    return a.staging_id < b.staging_id;
  });
  return ComparisonResult{std::move(scores)};
}

std::pair<double, double> beta_credible_interval(double a, double b,
                                                 double level) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw SpecError("Beta parameters must be positive");
  }
  if (!(level > 0.0) || !(level < 1.0)) {
    throw SpecError("credible level must be in (0, 1)");
  }
  const double tail = (1.0 - level) / 2.0;
  return {boost::math::ibeta_inv(a, b, tail),
          boost::math::ibeta_inv(a, b, 1.0 - tail)};
}

}  // namespace abmceg
