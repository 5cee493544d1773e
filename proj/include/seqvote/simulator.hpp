#pragma once

// Monte Carlo evaluation of the stopping rules: estimate categorical
// distributions from sample pools, replay each policy against simulated
// draws, and trace out average-runs-vs-consistency curves across a parameter
// grid. Consistency is measured against the mode of the estimating pool, not
// the gold answer.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqvote/solvers.hpp"
#include "seqvote/stopping.hpp"
#include "seqvote/tally.hpp"

namespace seqvote {

struct SyntheticDistribution {
  std::vector<std::pair<AnswerKey, double>> probs;  // first-seen order
  std::string source_question;
  AnswerKey true_mode;
  std::optional<AnswerKey> gold_answer;
};

// MLE probabilities from the pool's normalized samples; true_mode is the
// max-count answer with earliest-occurrence tie-break.
SyntheticDistribution estimate_distribution(const SamplePool& pool);

struct SimulationSummary {
  double avg_runs = 0.0;
  double consistency = 0.0;
  std::optional<double> hit_gold;
};

struct SimulationOptions {
  int threads = 1;
  MockCostModel cost;
};

// Run `trials` independent seeded runs of the policy against mock draws from
// the distribution. Trial seeds are counter-split from (seed, question,
// policy label, trial), so results are independent of execution order.
SimulationSummary simulate_question(const SyntheticDistribution& dist,
                                    const StoppingPolicy& policy, int trials,
                                    uint64_t seed, const SimulationOptions& options = {});

enum class PolicyFamily { kSelfConsistency, kPValue, kAdaCons, kSprt, kMsprt };

const char* to_string(PolicyFamily f);
PolicyFamily policy_family_from_string(const std::string& name);

// The swept parameter per family: SelfConsistency -> fixed_n, AdaCons ->
// confidence, PValue -> alpha_sig, Sprt/Msprt -> beta (other parameters stay
// at their calibrated defaults). Throws std::domain_error, naming the value,
// when it falls outside the family's domain.
StoppingPolicy make_swept_policy(PolicyFamily family, double param_value,
                                 std::optional<int> max_samples = std::nullopt);

struct SweepPoint {
  double param_value = 0.0;
  double avg_runs = 0.0;
  double consistency = 0.0;
  std::optional<double> accuracy;
  std::string policy_label;
};

// One SweepPoint per grid value, macro-averaged over all pools and sorted by
// avg_runs. accuracy is present only if every pool carries a gold answer.
std::vector<SweepPoint> sweep(const std::vector<SamplePool>& pools, PolicyFamily family,
                              const std::vector<double>& grid, int trials, uint64_t seed,
                              const SimulationOptions& options = {},
                              std::optional<int> max_samples = std::nullopt);

// Parameter ranges matching the published operating-characteristic curves.
std::vector<double> builtin_sweep_grid(PolicyFamily family);

// Deterministic synthetic pool suite: category probabilities drawn from a
// symmetric Dirichlet, then `pool_size` samples per pool. Useful for stress
// runs without any recorded data.
std::vector<SamplePool> sample_dirichlet_pools(int n_pools, int n_categories,
                                               double concentration, int pool_size,
                                               uint64_t seed);

// Serialize a sweep to CSV with the fixed header
// `policy,param,avg_runs,consistency,accuracy` (accuracy empty when absent).
std::string sweep_to_csv(const std::vector<SweepPoint>& points,
                         const std::string& metadata_comment = "");

}  // namespace seqvote
