#include "seqvote/scheduler.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace seqvote {

namespace detail {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

int RunTrace::total_prompt_tokens() const {
  int total = 0;
  for (const auto& r : records) total += r.prompt_tokens;
  return total;
}

int RunTrace::total_completion_tokens() const {
  int total = 0;
  for (const auto& r : records) total += r.completion_tokens;
  return total;
}

template <typename Decider>
static int determine_trial_impl(int n_first, int n_second, int max_samples,
                                int n_observed, const Decider& decider) {
  if (n_first < n_second) {
    throw std::invalid_argument("determine_trial requires n_first >= n_second");
  }
  if (n_observed > max_samples) {
    throw std::invalid_argument("n_observed exceeds max_samples");
  }
  int t = max_samples;
  for (int candidate = 0; candidate <= max_samples; ++candidate) {
    if (candidate + n_first <= 0) continue;
    if (decider(n_first + candidate, n_second, n_observed + candidate) ==
        Decision::kStopDominant) {
      t = candidate;
      break;
    }
  }
  return std::min(t, max_samples - n_observed);
}

int determine_trial(int n_first, int n_second, int max_samples, int n_observed,
                    const DecisionCache& cache) {
  return determine_trial_impl(n_first, n_second, max_samples, n_observed,
                              [&](int nf, int ns, int total) {
                                return cache.decide(nf, ns, total);
                              });
}

int determine_trial(int n_first, int n_second, int max_samples, int n_observed,
                    const StoppingPolicy& policy) {
  return determine_trial_impl(n_first, n_second, max_samples, n_observed,
                              [&](int nf, int ns, int total) {
                                return decide(policy, nf, ns, total);
                              });
}

TurnPlan plan_turn(const TopTwo& counts, int max_samples, int n_observed,
                   int turn_index, const DecisionCache& cache) {
  TurnPlan plan;
  plan.turn_index = turn_index;
  plan.batch_size =
      determine_trial(counts.n_first, counts.n_second, max_samples, n_observed, cache);
  return plan;
}

template <typename Decider>
static RunTrace sequential_testing_impl(const ProblemSpec& problem,
                                        const StoppingPolicy& policy,
                                        const Decider& decider, Solver& solver,
                                        const SchedulerOptions& options) {
  policy.validate();
  if (options.concurrency_limit < 1) {
    throw std::invalid_argument("concurrency_limit must be >= 1");
  }
  RunTrace trace;
  int n_observed = 0;
  int turn_index = 0;
  while (true) {
    const TopTwo tt = trace.tally.top_two();
    if (n_observed > 0) {
      // Realized-counts test; this is the only place the acceptance boundary
      // can stop the run.
      trace.decision_kind = decider(tt.n_first, tt.n_second, n_observed);
      if (trace.decision_kind != Decision::kContinue) break;
    }
    TurnPlan plan;
    plan.turn_index = turn_index;
    plan.batch_size = determine_trial_impl(tt.n_first, tt.n_second, policy.max_samples,
                                           n_observed, decider);
    const int batch = plan.batch_size;
    if (batch == 0) break;  // budget exhausted

    // Dispatch the whole turn concurrently and join before deciding again;
    // results are folded by dispatch index, not completion order.
    std::vector<QueryRecord> turn_records(static_cast<size_t>(batch));
    detail::parallel_for(batch, options.concurrency_limit, [&](int i) {
      QueryContext ctx;
      ctx.turn_index = turn_index;
      ctx.dispatch_index = i;
      ctx.sample_index = n_observed + i;
      try {
        turn_records[static_cast<size_t>(i)] = solver.solve(problem, ctx);
        turn_records[static_cast<size_t>(i)].turn_index = turn_index;
      } catch (const std::exception& ex) {
        QueryRecord failed;
        failed.turn_index = turn_index;
        failed.error = ex.what();
        turn_records[static_cast<size_t>(i)] = std::move(failed);
      }
    });
    for (auto& record : turn_records) {
      if (record.ok()) trace.tally.add(record.answer);
      trace.records.push_back(std::move(record));
    }
    trace.turn_batches.push_back(batch);
    n_observed += batch;
    ++turn_index;
  }
  trace.final_answer = trace.tally.mode();
  return trace;
}

RunTrace sequential_testing(const ProblemSpec& problem, const StoppingPolicy& policy,
                            Solver& solver, const SchedulerOptions& options) {
  return sequential_testing_impl(
      problem, policy,
      [&](int nf, int ns, int total) { return decide(policy, nf, ns, total); }, solver,
      options);
}

RunTrace sequential_testing(const ProblemSpec& problem, const DecisionCache& cache,
                            Solver& solver, const SchedulerOptions& options) {
  return sequential_testing_impl(
      problem, cache.policy(),
      [&](int nf, int ns, int total) { return cache.decide(nf, ns, total); }, solver,
      options);
}

}  // namespace seqvote
