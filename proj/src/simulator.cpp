#include "seqvote/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "seqvote/scheduler.hpp"

namespace seqvote {

const char* to_string(PolicyFamily f) {
  switch (f) {
    case PolicyFamily::kSelfConsistency: return "self_consistency";
    case PolicyFamily::kPValue: return "pvalue";
    case PolicyFamily::kAdaCons: return "adacons";
    case PolicyFamily::kSprt: return "sprt";
    case PolicyFamily::kMsprt: return "msprt";
  }
  return "unknown";
}

PolicyFamily policy_family_from_string(const std::string& name) {
  if (name == "self_consistency") return PolicyFamily::kSelfConsistency;
  if (name == "pvalue") return PolicyFamily::kPValue;
  if (name == "adacons") return PolicyFamily::kAdaCons;
  if (name == "sprt") return PolicyFamily::kSprt;
  if (name == "msprt") return PolicyFamily::kMsprt;
  throw std::domain_error("unknown policy family: " + name);
}

SyntheticDistribution estimate_distribution(const SamplePool& pool) {
  VoteTally tally;
  for (const auto& sample : pool.samples) tally.add(normalize_answer(sample));
  SyntheticDistribution dist;
  dist.source_question = pool.question_id;
  const double n = tally.total();
  for (const auto& [key, count] : tally.entries()) {
    dist.probs.emplace_back(key, count / n);
  }
  dist.true_mode = *tally.mode();
  if (pool.gold_answer.has_value()) {
    dist.gold_answer = normalize_answer(*pool.gold_answer);
  }
  return dist;
}

SimulationSummary simulate_question(const SyntheticDistribution& dist,
                                    const StoppingPolicy& policy, int trials,
                                    uint64_t seed, const SimulationOptions& options) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (dist.probs.empty()) throw std::domain_error("distribution must not be empty");

  const DecisionCache cache(policy);
  const uint64_t stream = mix_seed(seed, hash_text(dist.source_question),
                                   hash_text(policy.label()));
  ProblemSpec problem;
  problem.id = dist.source_question;

  std::vector<int> samples_used(static_cast<size_t>(trials), 0);
  std::vector<uint8_t> matched_mode(static_cast<size_t>(trials), 0);
  std::vector<uint8_t> matched_gold(static_cast<size_t>(trials), 0);

  detail::parallel_for(trials, options.threads, [&](int trial) {
    MockSolver solver(dist.probs, mix_seed(stream, static_cast<uint64_t>(trial)),
                      options.cost);
    SchedulerOptions scheduler_options;
    scheduler_options.concurrency_limit = 1;  // draws are cheap; threads run trials
    const RunTrace trace = sequential_testing(problem, cache, solver, scheduler_options);
    samples_used[static_cast<size_t>(trial)] = trace.n_samples();
    const bool has_answer = trace.final_answer.has_value();
    matched_mode[static_cast<size_t>(trial)] =
        has_answer && *trace.final_answer == dist.true_mode;
    if (dist.gold_answer.has_value()) {
      matched_gold[static_cast<size_t>(trial)] =
          has_answer && *trace.final_answer == *dist.gold_answer;
    }
  });

  long long total_samples = 0;
  long long mode_hits = 0;
  long long gold_hits = 0;
  for (int t = 0; t < trials; ++t) {
    total_samples += samples_used[static_cast<size_t>(t)];
    mode_hits += matched_mode[static_cast<size_t>(t)];
    gold_hits += matched_gold[static_cast<size_t>(t)];
  }
  SimulationSummary summary;
  summary.avg_runs = static_cast<double>(total_samples) / trials;
  summary.consistency = static_cast<double>(mode_hits) / trials;
  if (dist.gold_answer.has_value()) {
    summary.hit_gold = static_cast<double>(gold_hits) / trials;
  }
  return summary;
}

StoppingPolicy make_swept_policy(PolicyFamily family, double param_value,
                                 std::optional<int> max_samples) {
  auto bad = [&](const char* domain) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%s sweep value %g outside %s", to_string(family),
                  param_value, domain);
    return std::domain_error(buf);
  };
  switch (family) {
    case PolicyFamily::kSelfConsistency: {
      const int n = static_cast<int>(param_value);
      if (n < 1 || n != param_value) throw bad("positive integers");
      return StoppingPolicy::self_consistency(n);
    }
    case PolicyFamily::kPValue:
      if (!(param_value > 0.0) || !(param_value < 1.0)) throw bad("(0,1)");
      return StoppingPolicy::p_value(param_value, max_samples.value_or(40));
    case PolicyFamily::kAdaCons:
      if (!(param_value > 0.0) || !(param_value < 1.0)) throw bad("(0,1)");
      return StoppingPolicy::ada_cons(param_value, max_samples.value_or(40));
    case PolicyFamily::kSprt: {
      if (!(param_value > 0.0) || !(param_value < 1.0)) throw bad("(0,1)");
      SprtParams p;
      p.beta = param_value;
      return StoppingPolicy::sprt(p, max_samples.value_or(256));
    }
    case PolicyFamily::kMsprt: {
      if (!(param_value > 0.0) || !(param_value < 1.0)) throw bad("(0,1)");
      MsprtParams p;
      p.beta = param_value;
      return StoppingPolicy::msprt(p, max_samples.value_or(256));
    }
  }
  throw std::logic_error("unhandled policy family");
}

std::vector<SweepPoint> sweep(const std::vector<SamplePool>& pools, PolicyFamily family,
                              const std::vector<double>& grid, int trials, uint64_t seed,
                              const SimulationOptions& options,
                              std::optional<int> max_samples) {
  if (grid.empty()) throw std::invalid_argument("sweep grid must not be empty");
  if (pools.empty()) throw std::invalid_argument("sweep needs at least one pool");

  std::vector<SyntheticDistribution> dists;
  dists.reserve(pools.size());
  bool all_gold = true;
  for (const auto& pool : pools) {
    dists.push_back(estimate_distribution(pool));
    all_gold = all_gold && dists.back().gold_answer.has_value();
  }

  std::vector<SweepPoint> points;
  points.reserve(grid.size());
  for (double value : grid) {
    const StoppingPolicy policy = make_swept_policy(family, value, max_samples);
    SweepPoint point;
    point.param_value = value;
    point.policy_label = policy.label();
    double gold_sum = 0.0;
    for (const auto& dist : dists) {
      const SimulationSummary s = simulate_question(dist, policy, trials, seed, options);
      point.avg_runs += s.avg_runs;
      point.consistency += s.consistency;
      if (all_gold) gold_sum += *s.hit_gold;
    }
    const double n = static_cast<double>(dists.size());
    point.avg_runs /= n;
    point.consistency /= n;
    if (all_gold) point.accuracy = gold_sum / n;
    points.push_back(std::move(point));
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const SweepPoint& a, const SweepPoint& b) {
                     return a.avg_runs < b.avg_runs;
                   });
  return points;
}

std::vector<double> builtin_sweep_grid(PolicyFamily family) {
  switch (family) {
    case PolicyFamily::kSelfConsistency: {
      std::vector<double> grid;
      for (int n = 1; n <= 40; ++n) grid.push_back(n);
      return grid;
    }
    case PolicyFamily::kAdaCons:
      return {0.74, 0.80, 0.85, 0.90, 0.95, 0.98, 0.99, 0.995, 0.999, 0.9999};
    case PolicyFamily::kPValue:
      return {0.30, 0.20, 0.10, 0.05, 0.01, 0.001};
    case PolicyFamily::kSprt:
    case PolicyFamily::kMsprt:
      return {0.94979, 0.94982, 0.94985, 0.94988, 0.94991, 0.94994, 0.94997};
  }
  throw std::logic_error("unhandled policy family");
}

std::vector<SamplePool> sample_dirichlet_pools(int n_pools, int n_categories,
                                               double concentration, int pool_size,
                                               uint64_t seed) {
  if (n_pools < 1 || n_categories < 1 || pool_size < 1) {
    throw std::invalid_argument("pool suite dimensions must be positive");
  }
  if (!(concentration > 0.0)) {
    throw std::invalid_argument("concentration must be positive");
  }
  // Gamma draws via Marsaglia-Tsang with a counter-based uniform source so the
  // suite is identical across platforms and thread counts.
  auto gamma_draw = [](double shape, uint64_t s, uint64_t lane) {
    double boost = 1.0;
    uint64_t counter = 0;
    auto next_unit = [&] { return uniform_unit(s, lane, counter++); };
    if (shape < 1.0) {
      boost = std::pow(std::max(next_unit(), 1e-300), 1.0 / shape);
      shape += 1.0;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      // Box-Muller from two counter draws.
      const double u1 = std::max(next_unit(), 1e-300);
      const double u2 = next_unit();
      const double x = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
      const double v = (1.0 + c * x) * (1.0 + c * x) * (1.0 + c * x);
      if (v <= 0.0) continue;
      const double u = std::max(next_unit(), 1e-300);
      if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) {
        return boost * d * v;
      }
    }
  };

  std::vector<SamplePool> pools;
  pools.reserve(static_cast<size_t>(n_pools));
  for (int p = 0; p < n_pools; ++p) {
    const uint64_t pool_seed = mix_seed(seed, 0x9001, static_cast<uint64_t>(p));
    std::vector<double> weights(static_cast<size_t>(n_categories));
    double total = 0.0;
    for (int c = 0; c < n_categories; ++c) {
      weights[static_cast<size_t>(c)] =
          gamma_draw(concentration, pool_seed, static_cast<uint64_t>(c));
      total += weights[static_cast<size_t>(c)];
    }
    std::vector<std::string> samples;
    samples.reserve(static_cast<size_t>(pool_size));
    for (int i = 0; i < pool_size; ++i) {
      double u = uniform_unit(pool_seed, 0xd7aa, static_cast<uint64_t>(i)) * total;
      int chosen = n_categories - 1;
      for (int c = 0; c < n_categories; ++c) {
        u -= weights[static_cast<size_t>(c)];
        if (u < 0.0) {
          chosen = c;
          break;
        }
      }
      samples.push_back("ans" + std::to_string(chosen));
    }
    pools.emplace_back("synthetic-" + std::to_string(p), std::move(samples));
  }
  return pools;
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points,
                         const std::string& metadata_comment) {
  std::ostringstream out;
  if (!metadata_comment.empty()) out << "# " << metadata_comment << '\n';
  out << "policy,param,avg_runs,consistency,accuracy\n";
  char buf[256];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof(buf), "%s,%.10g,%.6f,%.6f,", p.policy_label.c_str(),
                  p.param_value, p.avg_runs, p.consistency);
    out << buf;
    if (p.accuracy.has_value()) {
      std::snprintf(buf, sizeof(buf), "%.6f", *p.accuracy);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace seqvote
