#include "seqvote/solvers.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace seqvote {

using nlohmann::json;

const char* to_string(ReasoningEffort e) {
  switch (e) {
    case ReasoningEffort::kLow: return "low";
    case ReasoningEffort::kMedium: return "medium";
    case ReasoningEffort::kHigh: return "high";
  }
  return "unknown";
}

uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
  auto splitmix = [](uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  return splitmix(splitmix(splitmix(seed) ^ a) ^ b);
}

uint64_t hash_text(const std::string& text) {
  // FNV-1a, platform-independent unlike std::hash.
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double uniform_unit(uint64_t seed, uint64_t a, uint64_t b) {
  return (mix_seed(seed, a, b) >> 11) * 0x1.0p-53;
}

SamplePool::SamplePool(std::string question_id_in, std::vector<std::string> samples_in,
                       std::optional<std::string> gold_answer_in)
    : question_id(std::move(question_id_in)),
      samples(std::move(samples_in)),
      gold_answer(std::move(gold_answer_in)) {
  if (samples.empty()) {
    throw std::domain_error("sample pool '" + question_id + "' must not be empty");
  }
}

std::vector<SamplePool> load_sample_pools(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open pool file: " + path);
  std::vector<SamplePool> pools;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& ex) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": invalid JSON: " + ex.what());
    }
    if (!obj.contains("id") || !obj.contains("samples")) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": pool line needs \"id\" and \"samples\"");
    }
    std::optional<std::string> gold;
    if (obj.contains("gold") && !obj["gold"].is_null()) {
      gold = obj["gold"].get<std::string>();
    }
    pools.emplace_back(obj["id"].get<std::string>(),
                       obj["samples"].get<std::vector<std::string>>(), std::move(gold));
  }
  return pools;
}

void save_sample_pools(const std::vector<SamplePool>& pools, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write pool file: " + path);
  for (const auto& pool : pools) {
    // Key order is part of the documented file format.
    nlohmann::ordered_json obj;
    obj["id"] = pool.question_id;
    obj["samples"] = pool.samples;
    obj["gold"] = pool.gold_answer.has_value() ? json(*pool.gold_answer) : json(nullptr);
    out << obj.dump() << '\n';
  }
}

MockSolver::MockSolver(std::vector<std::pair<AnswerKey, double>> distribution,
                       uint64_t seed, MockCostModel cost)
    : seed_(seed), cost_(cost) {
  if (distribution.empty()) {
    throw std::domain_error("mock distribution must not be empty");
  }
  double running = 0.0;
  for (auto& [key, prob] : distribution) {
    if (prob < 0.0) throw std::domain_error("mock distribution has a negative probability");
    running += prob;
    cumulative_.emplace_back(std::move(key), running);
  }
  if (std::fabs(running - 1.0) > 1e-9) {
    throw std::domain_error("mock distribution probabilities must sum to 1");
  }
  cumulative_.back().second = 1.0;  // guard the final bucket against rounding
}

QueryRecord MockSolver::solve(const ProblemSpec&, const QueryContext& ctx) {
  const double u = uniform_unit(seed_, static_cast<uint64_t>(ctx.sample_index));
  const AnswerKey* chosen = &cumulative_.back().first;
  for (const auto& [key, cum] : cumulative_) {
    if (u < cum) {
      chosen = &key;
      break;
    }
  }
  QueryRecord record;
  record.raw_text = chosen->canonical();
  record.answer = *chosen;
  record.prompt_tokens = cost_.prompt_tokens;
  record.completion_tokens = cost_.completion_tokens;
  record.latency_ms = cost_.latency_ms;
  record.turn_index = ctx.turn_index;
  return record;
}

ReplaySolver::ReplaySolver(SamplePool pool, ReplayMode mode, uint64_t seed,
                           MockCostModel cost)
    : pool_(std::move(pool)), mode_(mode), seed_(seed), cost_(cost) {}

PoolBackedSolver::PoolBackedSolver(const std::vector<SamplePool>& pools, Mode mode,
                                   uint64_t seed, MockCostModel cost) {
  for (const auto& pool : pools) {
    const uint64_t pool_seed = mix_seed(seed, hash_text(pool.question_id));
    std::unique_ptr<Solver> solver;
    if (mode == Mode::kMockFromPool) {
      VoteTally tally;
      for (const auto& sample : pool.samples) tally.add(normalize_answer(sample));
      std::vector<std::pair<AnswerKey, double>> dist;
      const double n = tally.total();
      for (const auto& [key, count] : tally.entries()) dist.emplace_back(key, count / n);
      solver = std::make_unique<MockSolver>(std::move(dist), pool_seed, cost);
    } else {
      const ReplayMode replay_mode = mode == Mode::kReplaySequential
                                         ? ReplayMode::kSequential
                                         : ReplayMode::kWithReplacement;
      solver = std::make_unique<ReplaySolver>(pool, replay_mode, pool_seed, cost);
    }
    by_problem_.emplace(pool.question_id, std::move(solver));
  }
}

QueryRecord PoolBackedSolver::solve(const ProblemSpec& problem, const QueryContext& ctx) {
  const auto it = by_problem_.find(problem.id);
  if (it == by_problem_.end()) {
    QueryRecord record;
    record.turn_index = ctx.turn_index;
    record.error = "no sample pool for problem \"" + problem.id + "\"";
    return record;
  }
  return it->second->solve(problem, ctx);
}

QueryRecord ReplaySolver::solve(const ProblemSpec&, const QueryContext& ctx) {
  QueryRecord record;
  record.turn_index = ctx.turn_index;
  record.prompt_tokens = cost_.prompt_tokens;
  record.completion_tokens = cost_.completion_tokens;
  record.latency_ms = cost_.latency_ms;
  size_t index = 0;
  if (mode_ == ReplayMode::kSequential) {
    if (ctx.sample_index >= static_cast<int64_t>(pool_.samples.size())) {
      record.error = "replay pool exhausted at sample " + std::to_string(ctx.sample_index);
      record.prompt_tokens = 0;
      record.completion_tokens = 0;
      return record;
    }
    index = static_cast<size_t>(ctx.sample_index);
  } else {
    const double u = uniform_unit(seed_, static_cast<uint64_t>(ctx.sample_index),
                                  hash_text(pool_.question_id));
    index = std::min(pool_.samples.size() - 1,
                     static_cast<size_t>(u * static_cast<double>(pool_.samples.size())));
  }
  record.raw_text = pool_.samples[index];
  record.answer = normalize_answer(record.raw_text);
  return record;
}

}  // namespace seqvote
