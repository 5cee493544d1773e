#pragma once

// Pluggable answer sources. The scheduler treats a solver as a black box
// that turns one problem into one QueryRecord; implementations must tolerate
// concurrent invocation. Seeded solvers derive every draw from
// (seed, sample_index) so results do not depend on thread interleaving.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "seqvote/tally.hpp"

namespace seqvote {

enum class ReasoningEffort { kLow, kMedium, kHigh };

const char* to_string(ReasoningEffort e);

struct ModelHints {
  std::string model_name;
  std::optional<ReasoningEffort> reasoning_effort;
  std::optional<double> temperature;
};

struct ProblemSpec {
  std::string id;
  std::string prompt;
  std::optional<AnswerKey> gold_answer;
  ModelHints model_hints;
};

// One solver response. A set error marks a query that failed after retries:
// it still consumes budget but never enters the tally.
struct QueryRecord {
  std::string raw_text;
  AnswerKey answer;
  int prompt_tokens = 0;
  int completion_tokens = 0;
  int latency_ms = 0;
  int turn_index = 0;
  std::optional<std::string> error;

  bool ok() const { return !error.has_value(); }
};

// Scheduling coordinates for one dispatch. sample_index is the 0-based global
// index of the query within its run and is the only entropy source seeded
// solvers may use, which makes runs reproducible under concurrency.
struct QueryContext {
  int turn_index = 0;
  int dispatch_index = 0;   // position within the turn
  int64_t sample_index = 0; // position within the run
};

class Solver {
 public:
  virtual ~Solver() = default;
  // Thread-safe: the scheduler issues many of these concurrently.
  virtual QueryRecord solve(const ProblemSpec& problem, const QueryContext& ctx) = 0;
};

// Cached samples for one question, used to estimate distributions and to
// replay recorded responses.
struct SamplePool {
  std::string question_id;
  std::vector<std::string> samples;
  std::optional<std::string> gold_answer;

  SamplePool(std::string question_id, std::vector<std::string> samples,
             std::optional<std::string> gold_answer = std::nullopt);
};

// JSON-lines pool file, one object per question:
//   {"id": str, "samples": [str, ...], "gold": str|null}
std::vector<SamplePool> load_sample_pools(const std::string& path);
void save_sample_pools(const std::vector<SamplePool>& pools, const std::string& path);

// Synthesized token/latency figures attached to mock and replay responses.
// Constant by default so token totals are proportional to sample counts.
struct MockCostModel {
  int prompt_tokens = 64;
  int completion_tokens = 512;
  int latency_ms = 0;
};

// Draws answers from a fixed categorical distribution. Probabilities must sum
// to 1 within 1e-9. Deterministic given (seed, sample_index).
class MockSolver : public Solver {
 public:
  MockSolver(std::vector<std::pair<AnswerKey, double>> distribution, uint64_t seed,
             MockCostModel cost = {});

  QueryRecord solve(const ProblemSpec& problem, const QueryContext& ctx) override;

 private:
  std::vector<std::pair<AnswerKey, double>> cumulative_;
  uint64_t seed_;
  MockCostModel cost_;
};

enum class ReplayMode {
  kWithReplacement,  // uniform draws from the pool
  kSequential,       // recorded order; errors past the end
};

class ReplaySolver : public Solver {
 public:
  ReplaySolver(SamplePool pool, ReplayMode mode, uint64_t seed = 0, MockCostModel cost = {});

  QueryRecord solve(const ProblemSpec& problem, const QueryContext& ctx) override;

 private:
  SamplePool pool_;
  ReplayMode mode_;
  uint64_t seed_;
  MockCostModel cost_;
};

// Routes each problem id to an answer source backed by its sample pool:
// either mock draws from the pool's empirical distribution or replay of the
// recorded samples. Problems without a pool yield error records.
class PoolBackedSolver : public Solver {
 public:
  enum class Mode { kMockFromPool, kReplaySequential, kReplayWithReplacement };

  PoolBackedSolver(const std::vector<SamplePool>& pools, Mode mode, uint64_t seed,
                   MockCostModel cost = {});

  QueryRecord solve(const ProblemSpec& problem, const QueryContext& ctx) override;

 private:
  std::map<std::string, std::unique_ptr<Solver>> by_problem_;
};

// Counter-based seed splitting (splitmix64 over mixed words). Streams derived
// from distinct key tuples are independent for every practical purpose and
// identical across platforms.
uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b = 0);
uint64_t hash_text(const std::string& text);
// Uniform double in [0, 1) from one mixed draw.
double uniform_unit(uint64_t seed, uint64_t a, uint64_t b = 0);

}  // namespace seqvote
