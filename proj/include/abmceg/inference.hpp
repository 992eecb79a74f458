#pragma once

#include <map>
#include <string>
#include <vector>

#include "abmceg/staging.hpp"

namespace abmceg {

struct PriorConfig {
  // Effective sample size: total phantom mass entering the root.
  double ess = 1.0;
  // Extension point: replaces the propagated arrival mass at the given
  // situations.  Breaks the mass-conservation identity by design; unused by
  // the standard pipeline.
  std::map<int, double> arrival_override;
};

// Dirichlet state of one stage: hyperparameters before and after the update.
struct StagePosterior {
  int stage = 0;
  std::vector<double> alpha_prior;
  std::vector<long long> counts;
  std::vector<double> alpha_post;  // alpha_prior + counts, elementwise

  std::vector<double> posterior_mean() const;
};

struct TrajectoryDataset {
  std::vector<Context> rows;  // one complete root-to-leaf assignment each
  std::string provenance;

  long long n() const { return static_cast<long long>(rows.size()); }
};

struct ModelScore {
  int staging_id = 0;
  std::string staging_name;
  int num_stages = 0;
  double log_marginal_likelihood = 0.0;
  std::vector<double> per_stage_terms;
};

// Phantom-sample propagation: the root receives `ess`, each situation splits
// its arrival mass over outcomes by its matched clause's probabilities, and
// each edge's mass becomes the child's arrival.  arrival/edge are indexed by
// node id (edge vectors empty for leaves).
struct PhantomMasses {
  std::vector<double> arrival;
  std::vector<std::vector<double>> edge;
};

PhantomMasses phantom_masses(const EventTree& tree, const PriorConfig& config);

// Per-stage Dirichlet priors with zero counts: alpha[k] is the summed edge-k
// phantom mass of the stage's members.  Rejects ess <= 0 and any reachable
// clause entry with probability 0 (a zero Dirichlet mass is invalid; raise
// the entry with a small floor, e.g. 1e-6, if the outcome must stay).
std::vector<StagePosterior> allocate_priors(const StagedTree& staged,
                                            const PriorConfig& config);

// Validates every row against the tree and tallies, per situation, how often
// each outcome was taken there.  Errors cite the 1-based data row.
std::vector<std::vector<long long>> count_situation_visits(
    const EventTree& tree, const TrajectoryDataset& data,
    Execution exec = Execution::kParallel);

std::vector<std::vector<long long>> count_stage_outcomes(
    const StagedTree& staged, const TrajectoryDataset& data,
    Execution exec = Execution::kParallel);

// Conjugate update: alpha_post = alpha_prior + counts.
std::vector<StagePosterior> posterior_update(
    std::vector<StagePosterior> priors,
    const std::vector<std::vector<long long>>& counts);

// Closed-form Dirichlet-multinomial log marginal likelihood under floret
// independence: per stage,
//   lnG(sum a) - lnG(sum a + N) + sum_k [lnG(a_k + N_k) - lnG(a_k)].
ModelScore log_marginal_likelihood(const StagedTree& staged,
                                   const std::vector<StagePosterior>& priors,
                                   const std::vector<std::vector<long long>>& counts);

struct ComparisonResult {
  std::vector<ModelScore> ranking;  // log marginal likelihood descending

  double log_bayes_factor(std::size_t i, std::size_t j) const {
    return ranking.at(i).log_marginal_likelihood -
           ranking.at(j).log_marginal_likelihood;
  }
};

// Scores every candidate staging over one shared event tree with matched
// hyperparameters: one phantom-mass propagation at the given ess serves all
// candidates, a merged stage's alphas being the sum of its members' masses.
// Ties are broken toward fewer stages, then lower staging id.
ComparisonResult compare_models(const std::vector<StagedTree>& candidates,
                                const TrajectoryDataset& data,
                                const PriorConfig& config,
                                Execution exec = Execution::kParallel);

// Equal-tailed credible interval of a Beta(a, b) marginal.
std::pair<double, double> beta_credible_interval(double a, double b,
                                                 double level = 0.90);

}  // namespace abmceg
