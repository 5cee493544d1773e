#pragma once

// The sequential-testing loop: size the next batch as the best-case minimal
// number of additional samples that could fire the stop rule, dispatch that
// many queries concurrently, fold the answers in, and repeat until a stop
// decision or the sample cap.

#include <functional>
#include <optional>
#include <vector>

#include "seqvote/solvers.hpp"
#include "seqvote/stopping.hpp"
#include "seqvote/tally.hpp"

namespace seqvote {

struct SchedulerOptions {
  // Upper bound on in-flight solver calls within one turn; batches larger
  // than this are processed in waves.
  int concurrency_limit = 8;
};

// One turn's dispatch plan. batch_size is zero only when the stopping rule
// already fires on the current counts or the sample budget is exhausted, and
// never exceeds the remaining budget.
struct TurnPlan {
  int batch_size = 0;
  int turn_index = 0;
};

struct RunTrace {
  std::vector<QueryRecord> records;  // every issued query, errors included
  std::vector<int> turn_batches;
  Decision decision_kind = Decision::kContinue;  // kContinue = budget exhausted
  std::optional<AnswerKey> final_answer;
  VoteTally tally;

  int n_samples() const { return static_cast<int>(records.size()); }
  int total_prompt_tokens() const;
  int total_completion_tokens() const;
};

// Smallest T >= 0 such that T + n_first > 0 and the rule fires StopDominant
// on counts (n_first + T, n_second), scanning T = 0..max_samples; the result
// is clamped to the remaining budget max_samples - n_observed. Returns the
// clamped scan limit when no T fires. Only the dominance boundary is scanned;
// the acceptance boundary is evaluated on realized counts between turns.
int determine_trial(int n_first, int n_second, int max_samples, int n_observed,
                    const DecisionCache& cache);
int determine_trial(int n_first, int n_second, int max_samples, int n_observed,
                    const StoppingPolicy& policy);

// determine_trial packaged with its turn index, as the loop consumes it.
TurnPlan plan_turn(const TopTwo& counts, int max_samples, int n_observed,
                   int turn_index, const DecisionCache& cache);

// Run one problem to completion under the policy. Individual query failures
// consume budget and are recorded with error markers but never enter the
// tally. The final answer is the tally mode on every exit path.
RunTrace sequential_testing(const ProblemSpec& problem, const StoppingPolicy& policy,
                            Solver& solver, const SchedulerOptions& options = {});
RunTrace sequential_testing(const ProblemSpec& problem, const DecisionCache& cache,
                            Solver& solver, const SchedulerOptions& options = {});

namespace detail {
// Invoke fn(0..count-1) across at most `threads` workers and wait for all.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);
}  // namespace detail

}  // namespace seqvote
