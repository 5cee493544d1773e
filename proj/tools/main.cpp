// seqvote command line: run benchmarks, simulate stopping rules against
// sample pools, sweep rule parameters, and render reports from results files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "seqvote/bench.hpp"
#include "seqvote/http_solver.hpp"
#include "seqvote/scheduler.hpp"
#include "seqvote/simulator.hpp"
#include "seqvote/solvers.hpp"
#include "seqvote/stopping.hpp"

namespace {

using namespace seqvote;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

struct PolicyFlags {
  std::string rule;
  int fixed_n = 40;
  double alpha_sig = 0.05;
  double confidence = 0.95;
  double p1 = 0.5001;
  double alpha = 0.05;
  std::optional<double> beta;
  double prior_alpha0 = 1e6;
  double prior_beta0 = 1e6;
  bool untruncated_prior = false;
  std::optional<int> max_samples;
};

void add_policy_flags(CLI::App* cmd, PolicyFlags& flags) {
  cmd->add_option("--policy", flags.rule, "Stopping rule")
      ->required()
      ->check(CLI::IsMember({"self_consistency", "pvalue", "adacons", "sprt", "msprt"}));
  cmd->add_option("--fixed-n", flags.fixed_n, "Sample size for self_consistency");
  cmd->add_option("--alpha-sig", flags.alpha_sig, "Significance level for pvalue");
  cmd->add_option("--confidence", flags.confidence, "Posterior confidence for adacons");
  cmd->add_option("--p1", flags.p1, "Alternative success probability for sprt");
  cmd->add_option("--alpha", flags.alpha, "Type I error for sprt/msprt thresholds");
  cmd->add_option("--beta", flags.beta, "Type II error for sprt/msprt thresholds");
  cmd->add_option("--prior-alpha0", flags.prior_alpha0, "Beta prior alpha for msprt");
  cmd->add_option("--prior-beta0", flags.prior_beta0, "Beta prior beta for msprt");
  cmd->add_flag("--untruncated-prior", flags.untruncated_prior,
                "Skip renormalizing the msprt prior after truncation to (1/2, 1]");
  cmd->add_option("--max-samples", flags.max_samples,
                  "Sample cap (default 40; 256 for sprt/msprt)");
}

StoppingPolicy build_policy(const PolicyFlags& flags) {
  if (flags.rule == "self_consistency") {
    StoppingPolicy p = StoppingPolicy::self_consistency(flags.fixed_n);
    if (flags.max_samples.has_value()) {
      p.max_samples = *flags.max_samples;
      p.validate();
    }
    return p;
  }
  if (flags.rule == "pvalue") {
    return StoppingPolicy::p_value(flags.alpha_sig, flags.max_samples.value_or(40));
  }
  if (flags.rule == "adacons") {
    return StoppingPolicy::ada_cons(flags.confidence, flags.max_samples.value_or(40));
  }
  if (flags.rule == "sprt") {
    SprtParams params;
    params.p1 = flags.p1;
    params.alpha = flags.alpha;
    params.beta = flags.beta.value_or(0.949976);
    return StoppingPolicy::sprt(params, flags.max_samples.value_or(256));
  }
  MsprtParams params;
  params.prior_alpha0 = flags.prior_alpha0;
  params.prior_beta0 = flags.prior_beta0;
  params.alpha = flags.alpha;
  params.beta = flags.beta.value_or(0.94994);
  params.truncated_prior = !flags.untruncated_prior;
  return StoppingPolicy::msprt(params, flags.max_samples.value_or(256));
}

json policy_config_json(const PolicyFlags& flags, const StoppingPolicy& policy) {
  json cfg;
  cfg["rule"] = flags.rule;
  cfg["label"] = policy.label();
  cfg["max_samples"] = policy.max_samples;
  switch (policy.rule) {
    case RuleKind::kSelfConsistency:
      cfg["fixed_n"] = std::get<SelfConsistencyParams>(policy.params).fixed_n;
      break;
    case RuleKind::kPValue:
      cfg["alpha_sig"] = std::get<PValueParams>(policy.params).alpha_sig;
      break;
    case RuleKind::kAdaCons:
      cfg["confidence"] = std::get<AdaConsParams>(policy.params).confidence;
      break;
    case RuleKind::kSprt: {
      const auto& p = std::get<SprtParams>(policy.params);
      cfg["p1"] = p.p1;
      cfg["alpha"] = p.alpha;
      cfg["beta"] = p.beta;
      break;
    }
    case RuleKind::kMsprt: {
      const auto& p = std::get<MsprtParams>(policy.params);
      cfg["prior_alpha0"] = p.prior_alpha0;
      cfg["prior_beta0"] = p.prior_beta0;
      cfg["alpha"] = p.alpha;
      cfg["beta"] = p.beta;
      cfg["truncated_prior"] = p.truncated_prior;
      break;
    }
  }
  return cfg;
}

struct SolverFlags {
  std::string kind;
  std::string pools_path;
  std::string replay_mode = "with_replacement";
  std::string base_url = "http://localhost:8000";
  std::string api_path = "/v1/chat/completions";
  std::string model;
  std::string reasoning_effort;
  std::string reasoning_effort_field = "reasoning_effort";
  std::optional<double> temperature;
  std::string credential_env = "SEQVOTE_API_KEY";
  int timeout_seconds = 300;
  int retries = 5;
  int mock_prompt_tokens = 64;
  int mock_completion_tokens = 512;
};

void add_solver_flags(CLI::App* cmd, SolverFlags& flags) {
  cmd->add_option("--solver", flags.kind, "Answer source")
      ->required()
      ->check(CLI::IsMember({"mock", "replay", "http"}));
  cmd->add_option("--pools", flags.pools_path, "Sample-pool JSONL for mock/replay");
  cmd->add_option("--replay-mode", flags.replay_mode, "Replay order")
      ->check(CLI::IsMember({"with_replacement", "sequential"}));
  cmd->add_option("--base-url", flags.base_url, "Endpoint scheme://host[:port]");
  cmd->add_option("--api-path", flags.api_path, "Chat-completions path");
  cmd->add_option("--model", flags.model, "Model name for http solves");
  cmd->add_option("--reasoning-effort", flags.reasoning_effort,
                  "Reasoning effort hint (low/medium/high)")
      ->check(CLI::IsMember({"", "low", "medium", "high"}));
  cmd->add_option("--reasoning-effort-field", flags.reasoning_effort_field,
                  "Request field name carrying the reasoning-effort hint");
  cmd->add_option("--temperature", flags.temperature, "Sampling temperature");
  cmd->add_option("--credential-env", flags.credential_env,
                  "Environment variable holding the API credential");
  cmd->add_option("--timeout", flags.timeout_seconds, "Per-query timeout, seconds");
  cmd->add_option("--retries", flags.retries, "Attempt limit per query");
  cmd->add_option("--mock-prompt-tokens", flags.mock_prompt_tokens,
                  "Synthesized prompt tokens per mock/replay sample");
  cmd->add_option("--mock-completion-tokens", flags.mock_completion_tokens,
                  "Synthesized completion tokens per mock/replay sample");
}

std::unique_ptr<Solver> build_solver(const SolverFlags& flags, uint64_t seed) {
  MockCostModel cost;
  cost.prompt_tokens = flags.mock_prompt_tokens;
  cost.completion_tokens = flags.mock_completion_tokens;
  if (flags.kind == "mock" || flags.kind == "replay") {
    if (flags.pools_path.empty()) {
      throw std::runtime_error("--pools is required for the " + flags.kind + " solver");
    }
    const auto pools = load_sample_pools(flags.pools_path);
    PoolBackedSolver::Mode mode = PoolBackedSolver::Mode::kMockFromPool;
    if (flags.kind == "replay") {
      mode = flags.replay_mode == "sequential"
                 ? PoolBackedSolver::Mode::kReplaySequential
                 : PoolBackedSolver::Mode::kReplayWithReplacement;
    }
    return std::make_unique<PoolBackedSolver>(pools, mode, seed, cost);
  }
  EndpointConfig config;
  config.base_url = flags.base_url;
  config.path = flags.api_path;
  config.model = flags.model;
  config.reasoning_effort_field = flags.reasoning_effort_field;
  config.credential_env = flags.credential_env;
  config.timeout_seconds = flags.timeout_seconds;
  config.max_attempts = flags.retries;
  return std::make_unique<HttpSolver>(config);
}

json solver_config_json(const SolverFlags& flags) {
  json cfg;
  cfg["kind"] = flags.kind;
  if (flags.kind == "mock" || flags.kind == "replay") {
    cfg["pools"] = flags.pools_path;
    cfg["prompt_tokens_per_sample"] = flags.mock_prompt_tokens;
    cfg["completion_tokens_per_sample"] = flags.mock_completion_tokens;
    if (flags.kind == "replay") cfg["replay_mode"] = flags.replay_mode;
  } else {
    cfg["base_url"] = flags.base_url;
    cfg["api_path"] = flags.api_path;
    cfg["model"] = flags.model;
    cfg["credential_env"] = flags.credential_env;  // the name, never the value
    cfg["timeout_seconds"] = flags.timeout_seconds;
    cfg["retries"] = flags.retries;
    if (!flags.reasoning_effort.empty()) cfg["reasoning_effort"] = flags.reasoning_effort;
    if (flags.temperature.has_value()) cfg["temperature"] = *flags.temperature;
  }
  return cfg;
}

std::optional<ReasoningEffort> parse_effort(const std::string& text) {
  if (text == "low") return ReasoningEffort::kLow;
  if (text == "medium") return ReasoningEffort::kMedium;
  if (text == "high") return ReasoningEffort::kHigh;
  return std::nullopt;
}

std::string config_comment(const json& cfg) {
  return std::string("seqvote v") + kVersion + " config=" + cfg.dump();
}

void write_text(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    return;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write output file: " + path);
  out << content;
}

int cmd_run(const PolicyFlags& policy_flags, const SolverFlags& solver_flags,
            const std::string& dataset_path, const std::string& results_path,
            uint64_t seed, int parallel, int concurrency) {
  const StoppingPolicy policy = build_policy(policy_flags);
  BenchmarkDataset dataset = load_dataset(dataset_path);
  auto solver = build_solver(solver_flags, seed);

  json cfg;
  cfg["command"] = "run";
  cfg["dataset"] = dataset_path;
  cfg["policy"] = policy_config_json(policy_flags, policy);
  cfg["solver"] = solver_config_json(solver_flags);
  cfg["seed"] = seed;
  cfg["parallel"] = parallel;
  cfg["concurrency"] = concurrency;
  cfg["version"] = kVersion;

  if (solver_flags.kind == "http") {
    for (auto& problem : dataset.problems) {
      problem.model_hints.model_name = solver_flags.model;
      problem.model_hints.reasoning_effort = parse_effort(solver_flags.reasoning_effort);
      problem.model_hints.temperature = solver_flags.temperature;
    }
  }

  BenchOptions options;
  options.parallel_questions = parallel;
  options.scheduler.concurrency_limit = concurrency;
  options.measure_wall_time = solver_flags.kind == "http";
  options.config_json = cfg.dump();
  const auto results = run_benchmark(dataset, policy, *solver, results_path, options);

  int failures = 0;
  for (const auto& r : results) failures += r.error.has_value();
  std::cerr << "run: " << results.size() << " results (" << failures << " failed) -> "
            << results_path << "\n";
  return 0;
}

int cmd_simulate(const PolicyFlags& policy_flags, const std::string& pools_path,
                 int trials, uint64_t seed, int threads, const std::string& out_path) {
  const StoppingPolicy policy = build_policy(policy_flags);
  const auto pools = load_sample_pools(pools_path);
  if (pools.empty()) throw std::runtime_error("no pools in " + pools_path);

  json cfg;
  cfg["command"] = "simulate";
  cfg["pools"] = pools_path;
  cfg["policy"] = policy_config_json(policy_flags, policy);
  cfg["trials"] = trials;
  cfg["seed"] = seed;
  cfg["version"] = kVersion;

  SimulationOptions options;
  options.threads = threads;
  std::ostringstream csv;
  csv << "# " << config_comment(cfg) << "\n";
  csv << "question,policy,avg_runs,consistency,accuracy\n";
  char buf[256];
  for (const auto& pool : pools) {
    const SyntheticDistribution dist = estimate_distribution(pool);
    const SimulationSummary s = simulate_question(dist, policy, trials, seed, options);
    std::snprintf(buf, sizeof(buf), "%s,%s,%.6f,%.6f,", pool.question_id.c_str(),
                  policy.label().c_str(), s.avg_runs, s.consistency);
    csv << buf;
    if (s.hit_gold.has_value()) {
      std::snprintf(buf, sizeof(buf), "%.6f", *s.hit_gold);
      csv << buf;
    }
    csv << "\n";
  }
  write_text(out_path, csv.str());
  return 0;
}

int cmd_sweep(const std::string& family_name, const std::string& grid_spec,
              const std::string& pools_path, int trials, uint64_t seed, int threads,
              std::optional<int> max_samples, const std::string& out_path) {
  const PolicyFamily family = policy_family_from_string(family_name);
  std::vector<double> grid;
  if (grid_spec == "paper") {
    grid = builtin_sweep_grid(family);
  } else {
    std::stringstream ss(grid_spec);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) grid.push_back(std::stod(token));
    }
  }
  if (grid.empty()) throw std::runtime_error("empty sweep grid: " + grid_spec);
  const auto pools = load_sample_pools(pools_path);

  json cfg;
  cfg["command"] = "sweep";
  cfg["family"] = family_name;
  cfg["grid"] = grid;
  cfg["pools"] = pools_path;
  cfg["trials"] = trials;
  cfg["seed"] = seed;
  if (max_samples.has_value()) cfg["max_samples"] = *max_samples;
  cfg["version"] = kVersion;

  SimulationOptions options;
  options.threads = threads;
  const auto points = sweep(pools, family, grid, trials, seed, options, max_samples);
  write_text(out_path, sweep_to_csv(points, config_comment(cfg)));
  return 0;
}

int cmd_report(const std::vector<std::string>& results_paths, const std::string& baseline,
               const std::string& out_dir, const std::string& tokens_mode) {
  std::vector<RunResult> results;
  for (const auto& path : results_paths) {
    const auto part = load_results(path);
    results.insert(results.end(), part.begin(), part.end());
  }
  if (results.empty()) throw std::runtime_error("no results loaded");

  json cfg;
  cfg["command"] = "report";
  cfg["results"] = results_paths;
  cfg["baseline"] = baseline;
  cfg["tokens"] = tokens_mode;
  cfg["version"] = kVersion;

  const TokenConvention convention = tokens_mode == "completion_only"
                                         ? TokenConvention::kCompletionOnly
                                         : TokenConvention::kPromptPlusCompletion;
  const ReportFiles files =
      emit_report(results, baseline, out_dir, convention, config_comment(cfg));
  std::cerr << "report: " << files.summary_csv << ", " << files.question_stats_csv
            << ", " << files.summary_text << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Early-stopping majority voting for stochastic answer sources"};
  app.set_version_flag("--version", std::string("seqvote ") + kVersion);
  app.set_config("--config", "", "Flat key=value config file (flags take precedence)");
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a benchmark dataset under one policy");
  PolicyFlags run_policy;
  SolverFlags run_solver;
  std::string run_dataset;
  std::string run_results = "out/results.jsonl";
  uint64_t run_seed = 0;
  int run_parallel = 1;
  int run_concurrency = 8;
  add_policy_flags(run, run_policy);
  add_solver_flags(run, run_solver);
  run->add_option("--dataset", run_dataset, "Dataset JSONL")->required();
  run->add_option("--results", run_results, "Results JSONL (appended, resumable)");
  run->add_option("--seed", run_seed, "Master seed for seeded solvers");
  run->add_option("--parallel", run_parallel, "Concurrent questions");
  run->add_option("--concurrency", run_concurrency, "In-flight queries per question");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo a policy over sample pools");
  PolicyFlags sim_policy;
  std::string sim_pools;
  std::string sim_out = "-";
  int sim_trials = 1000;
  uint64_t sim_seed = 0;
  int sim_threads = 2;
  add_policy_flags(simulate, sim_policy);
  simulate->add_option("--pools", sim_pools, "Sample-pool JSONL")->required();
  simulate->add_option("--trials", sim_trials, "Trials per question");
  simulate->add_option("--seed", sim_seed, "Master seed");
  simulate->add_option("--threads", sim_threads, "Worker threads");
  simulate->add_option("--out", sim_out, "Output CSV path (- for stdout)");

  auto* sweep_cmd =
      app.add_subcommand("sweep", "Trace avg-runs/consistency curves over a grid");
  std::string sweep_family;
  std::string sweep_grid = "paper";
  std::string sweep_pools;
  std::string sweep_out = "-";
  int sweep_trials = 400;
  uint64_t sweep_seed = 0;
  int sweep_threads = 2;
  std::optional<int> sweep_max;
  sweep_cmd->add_option("--family", sweep_family, "Policy family")
      ->required()
      ->check(CLI::IsMember({"self_consistency", "pvalue", "adacons", "sprt", "msprt"}));
  sweep_cmd->add_option("--grid", sweep_grid,
                        "\"paper\" or a comma-separated list of parameter values");
  sweep_cmd->add_option("--pools", sweep_pools, "Sample-pool JSONL")->required();
  sweep_cmd->add_option("--trials", sweep_trials, "Trials per (question, grid point)");
  sweep_cmd->add_option("--seed", sweep_seed, "Master seed");
  sweep_cmd->add_option("--threads", sweep_threads, "Worker threads");
  sweep_cmd->add_option("--max-samples", sweep_max, "Override the family's sample cap");
  sweep_cmd->add_option("--out", sweep_out, "Output CSV path (- for stdout)");

  auto* report = app.add_subcommand("report", "Summarize results files against a baseline");
  std::vector<std::string> report_results;
  std::string report_baseline;
  std::string report_out = "out/report";
  std::string report_tokens = "prompt_completion";
  report->add_option("--results", report_results, "Results JSONL file(s)")->required();
  report->add_option("--baseline", report_baseline, "Baseline policy label")->required();
  report->add_option("--out", report_out, "Report output directory");
  report->add_option("--tokens", report_tokens, "Token accounting convention")
      ->check(CLI::IsMember({"prompt_completion", "completion_only"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(run_policy, run_solver, run_dataset, run_results, run_seed,
                     run_parallel, run_concurrency);
    }
    if (simulate->parsed()) {
      return cmd_simulate(sim_policy, sim_pools, sim_trials, sim_seed, sim_threads,
                          sim_out);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_family, sweep_grid, sweep_pools, sweep_trials, sweep_seed,
                       sweep_threads, sweep_max, sweep_out);
    }
    if (report->parsed()) {
      return cmd_report(report_results, report_baseline, report_out, report_tokens);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
