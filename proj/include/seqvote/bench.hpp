#pragma once

// Dataset ingestion, benchmark execution across policies and solvers, metric
// computation (accuracy, token reduction, average runs), crash-safe result
// persistence, and report emission.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seqvote/scheduler.hpp"
#include "seqvote/solvers.hpp"
#include "seqvote/stopping.hpp"

namespace seqvote {

struct BenchmarkDataset {
  std::string name;
  std::vector<ProblemSpec> problems;
};

// JSON-lines dataset, one problem per line:
//   {"id": str, "question": str, "answer": str|null}
// Malformed lines and duplicate ids are reported with line numbers.
BenchmarkDataset load_dataset(const std::string& path);

struct RunResult {
  std::string problem_id;
  std::string policy_label;
  AnswerKey final_answer;
  std::optional<bool> correct;  // present iff the problem carries a gold answer
  int n_samples = 0;
  std::vector<int> turn_batches;
  int total_prompt_tokens = 0;
  int total_completion_tokens = 0;
  std::string decision_kind;
  int64_t wall_ms = 0;
  // Final tally in first-seen order; feeds the per-question distribution
  // statistics in reports.
  std::vector<std::pair<std::string, int>> answer_counts;
  std::optional<std::string> error;
};

std::string run_result_to_json(const RunResult& result);
RunResult run_result_from_json(const std::string& line);

// Results file layout: a schema-versioned header line followed by one
// RunResult object per line. `config_json` is embedded verbatim in the header
// so reports are reproducible from the file alone.
inline constexpr const char* kResultsSchema = "seqvote.results.v1";

struct BenchOptions {
  int parallel_questions = 1;
  SchedulerOptions scheduler;
  // Measure wall-clock per question; disabled for seeded solvers so result
  // files are byte-stable across invocations.
  bool measure_wall_time = false;
  std::string config_json = "{}";
};

// Run every problem under the policy, appending each RunResult to
// `results_path` as it completes. Existing results for the same problem ids
// are kept and skipped (resume semantics). Returns all results, preexisting
// ones included.
std::vector<RunResult> run_benchmark(const BenchmarkDataset& dataset,
                                     const StoppingPolicy& policy, Solver& solver,
                                     const std::string& results_path,
                                     const BenchOptions& options = {});

std::vector<RunResult> load_results(const std::string& path);

enum class TokenConvention { kPromptPlusCompletion, kCompletionOnly };

int64_t total_tokens(const std::vector<RunResult>& results, TokenConvention convention);

// (T_baseline - T) / T_baseline * 100.
double token_reduction(int64_t total_tokens_method, int64_t total_tokens_baseline);

// Fraction of results flagged correct; every result must carry the flag.
double accuracy(const std::vector<RunResult>& results);

struct ReportFiles {
  std::string summary_csv;
  std::string question_stats_csv;
  std::string summary_text;
};

// Aggregates results per policy label against the named baseline: a summary
// CSV (accuracy %, token reduction %), a per-question distribution-stats CSV,
// and a plain-text table. Throws if the baseline label is absent.
ReportFiles emit_report(const std::vector<RunResult>& results,
                        const std::string& baseline_label, const std::string& out_dir,
                        TokenConvention convention = TokenConvention::kPromptPlusCompletion,
                        const std::string& metadata_comment = "");

}  // namespace seqvote
