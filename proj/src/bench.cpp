#include "seqvote/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace seqvote {

using nlohmann::json;

BenchmarkDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  BenchmarkDataset dataset;
  dataset.name = std::filesystem::path(path).stem().string();
  std::set<std::string> seen_ids;
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
    if (!obj.contains("id") || !obj.contains("question")) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": dataset line needs \"id\" and \"question\"");
    }
    ProblemSpec problem;
    problem.id = obj["id"].get<std::string>();
    problem.prompt = obj["question"].get<std::string>();
    if (obj.contains("answer") && !obj["answer"].is_null()) {
      problem.gold_answer = normalize_answer(obj["answer"].get<std::string>());
    }
    if (!seen_ids.insert(problem.id).second) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": duplicate problem id \"" + problem.id + "\"");
    }
    dataset.problems.push_back(std::move(problem));
  }
  return dataset;
}

std::string run_result_to_json(const RunResult& r) {
  json obj;
  obj["problem_id"] = r.problem_id;
  obj["policy"] = r.policy_label;
  obj["final_answer"] = r.final_answer.canonical();
  obj["correct"] = r.correct.has_value() ? json(*r.correct) : json(nullptr);
  obj["n_samples"] = r.n_samples;
  obj["turn_batches"] = r.turn_batches;
  obj["total_prompt_tokens"] = r.total_prompt_tokens;
  obj["total_completion_tokens"] = r.total_completion_tokens;
  obj["decision"] = r.decision_kind;
  obj["wall_ms"] = r.wall_ms;
  json counts = json::array();
  for (const auto& [answer, count] : r.answer_counts) {
    counts.push_back(json::array({answer, count}));
  }
  obj["answer_counts"] = counts;
  if (r.error.has_value()) obj["error"] = *r.error;
  return obj.dump();
}

RunResult run_result_from_json(const std::string& line) {
  const json obj = json::parse(line);
  RunResult r;
  r.problem_id = obj.at("problem_id").get<std::string>();
  r.policy_label = obj.at("policy").get<std::string>();
  r.final_answer = AnswerKey(obj.at("final_answer").get<std::string>());
  if (!obj.at("correct").is_null()) r.correct = obj.at("correct").get<bool>();
  r.n_samples = obj.at("n_samples").get<int>();
  r.turn_batches = obj.at("turn_batches").get<std::vector<int>>();
  r.total_prompt_tokens = obj.at("total_prompt_tokens").get<int>();
  r.total_completion_tokens = obj.at("total_completion_tokens").get<int>();
  r.decision_kind = obj.at("decision").get<std::string>();
  r.wall_ms = obj.at("wall_ms").get<int64_t>();
  for (const auto& pair : obj.at("answer_counts")) {
    r.answer_counts.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<int>());
  }
  if (obj.contains("error") && !obj["error"].is_null()) {
    r.error = obj["error"].get<std::string>();
  }
  return r;
}

std::vector<RunResult> load_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file: " + path);
  std::vector<RunResult> results;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      const json header = json::parse(line);
      if (!header.contains("schema") || header["schema"] != kResultsSchema) {
        throw std::runtime_error(path + ": unrecognized results schema");
      }
      continue;
    }
    results.push_back(run_result_from_json(line));
  }
  return results;
}

namespace {

RunResult result_from_trace(const ProblemSpec& problem, const StoppingPolicy& policy,
                            const RunTrace& trace, int64_t wall_ms) {
  RunResult r;
  r.problem_id = problem.id;
  r.policy_label = policy.label();
  if (trace.final_answer.has_value()) r.final_answer = *trace.final_answer;
  if (problem.gold_answer.has_value()) {
    r.correct = trace.final_answer.has_value() && *trace.final_answer == *problem.gold_answer;
  }
  r.n_samples = trace.n_samples();
  r.turn_batches = trace.turn_batches;
  r.total_prompt_tokens = trace.total_prompt_tokens();
  r.total_completion_tokens = trace.total_completion_tokens();
  r.decision_kind = to_string(trace.decision_kind);
  r.wall_ms = wall_ms;
  for (const auto& [key, count] : trace.tally.entries()) {
    r.answer_counts.emplace_back(key.canonical(), count);
  }
  return r;
}

}  // namespace

std::vector<RunResult> run_benchmark(const BenchmarkDataset& dataset,
                                     const StoppingPolicy& policy, Solver& solver,
                                     const std::string& results_path,
                                     const BenchOptions& options) {
  policy.validate();
  if (options.parallel_questions < 1) {
    throw std::invalid_argument("parallel_questions must be >= 1");
  }

  std::vector<RunResult> existing;
  std::set<std::string> done;
  if (std::filesystem::exists(results_path)) {
    existing = load_results(results_path);
    for (const auto& r : existing) {
      if (r.policy_label == policy.label()) done.insert(r.problem_id);
    }
  }

  std::ofstream out;
  if (existing.empty() && !std::filesystem::exists(results_path)) {
    const auto parent = std::filesystem::path(results_path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    out.open(results_path, std::ios::out);
    if (!out) throw std::runtime_error("cannot write results file: " + results_path);
    json header;
    header["schema"] = kResultsSchema;
    header["tool_version"] = "0.1.0";
    header["config"] = json::parse(options.config_json);
    out << header.dump() << '\n';
    out.flush();
  } else {
    out.open(results_path, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to results file: " + results_path);
  }

  std::vector<const ProblemSpec*> pending;
  for (const auto& problem : dataset.problems) {
    if (!done.count(problem.id)) pending.push_back(&problem);
  }

  const DecisionCache cache(policy);
  std::mutex writer_mutex;
  std::vector<RunResult> fresh(pending.size());
  detail::parallel_for(static_cast<int>(pending.size()), options.parallel_questions,
                       [&](int i) {
                         const ProblemSpec& problem = *pending[static_cast<size_t>(i)];
                         const auto start = std::chrono::steady_clock::now();
                         RunResult result;
                         try {
                           const RunTrace trace =
                               sequential_testing(problem, cache, solver, options.scheduler);
                           int64_t wall = 0;
                           if (options.measure_wall_time) {
                             wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                                        std::chrono::steady_clock::now() - start)
                                        .count();
                           }
                           result = result_from_trace(problem, policy, trace, wall);
                         } catch (const std::exception& ex) {
                           result.problem_id = problem.id;
                           result.policy_label = policy.label();
                           result.decision_kind = to_string(Decision::kContinue);
                           result.error = ex.what();
                         }
                         {
                           std::lock_guard<std::mutex> lock(writer_mutex);
                           out << run_result_to_json(result) << '\n';
                           out.flush();
                         }
                         fresh[static_cast<size_t>(i)] = std::move(result);
                       });

  std::vector<RunResult> all = std::move(existing);
  for (auto& r : fresh) all.push_back(std::move(r));
  return all;
}

int64_t total_tokens(const std::vector<RunResult>& results, TokenConvention convention) {
  int64_t total = 0;
  for (const auto& r : results) {
    total += r.total_completion_tokens;
    if (convention == TokenConvention::kPromptPlusCompletion) {
      total += r.total_prompt_tokens;
    }
  }
  return total;
}

double token_reduction(int64_t total_tokens_method, int64_t total_tokens_baseline) {
  if (total_tokens_baseline <= 0) {
    throw std::domain_error("token_reduction requires a positive baseline total");
  }
  return static_cast<double>(total_tokens_baseline - total_tokens_method) /
         static_cast<double>(total_tokens_baseline) * 100.0;
}

double accuracy(const std::vector<RunResult>& results) {
  if (results.empty()) throw std::domain_error("accuracy requires at least one result");
  int64_t correct = 0;
  for (const auto& r : results) {
    if (!r.correct.has_value()) {
      throw std::domain_error("accuracy requires a gold answer for every result (problem " +
                              r.problem_id + " has none)");
    }
    correct += *r.correct ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(results.size());
}

ReportFiles emit_report(const std::vector<RunResult>& results,
                        const std::string& baseline_label, const std::string& out_dir,
                        TokenConvention convention, const std::string& metadata_comment) {
  std::map<std::string, std::vector<RunResult>> by_policy;
  for (const auto& r : results) by_policy[r.policy_label].push_back(r);
  if (!by_policy.count(baseline_label)) {
    throw std::runtime_error("baseline policy \"" + baseline_label +
                             "\" not present in results");
  }
  std::filesystem::create_directories(out_dir);
  const int64_t baseline_tokens = total_tokens(by_policy[baseline_label], convention);

  ReportFiles files;
  files.summary_csv = (std::filesystem::path(out_dir) / "summary.csv").string();
  files.question_stats_csv =
      (std::filesystem::path(out_dir) / "question_stats.csv").string();
  files.summary_text = (std::filesystem::path(out_dir) / "summary.txt").string();

  char buf[512];
  {
    std::ofstream csv(files.summary_csv);
    if (!metadata_comment.empty()) csv << "# " << metadata_comment << '\n';
    csv << "policy,n_questions,accuracy_pct,avg_samples,total_prompt_tokens,"
           "total_completion_tokens,total_tokens,token_reduction_pct\n";
    for (const auto& [label, rows] : by_policy) {
      const int64_t tokens = total_tokens(rows, convention);
      int64_t prompt = 0, completion = 0, samples = 0;
      bool has_gold = true;
      int64_t n_correct = 0;
      for (const auto& r : rows) {
        prompt += r.total_prompt_tokens;
        completion += r.total_completion_tokens;
        samples += r.n_samples;
        has_gold = has_gold && r.correct.has_value();
        n_correct += r.correct.value_or(false) ? 1 : 0;
      }
      std::string accuracy_cell;
      if (has_gold && !rows.empty()) {
        std::snprintf(buf, sizeof(buf), "%.1f",
                      100.0 * static_cast<double>(n_correct) /
                          static_cast<double>(rows.size()));
        accuracy_cell = buf;
      }
      std::snprintf(buf, sizeof(buf), "%s,%zu,%s,%.2f,%lld,%lld,%lld,%.1f\n",
                    label.c_str(), rows.size(), accuracy_cell.c_str(),
                    static_cast<double>(samples) / static_cast<double>(rows.size()),
                    static_cast<long long>(prompt), static_cast<long long>(completion),
                    static_cast<long long>(tokens),
                    token_reduction(tokens, baseline_tokens));
      csv << buf;
    }
  }
  {
    std::ofstream csv(files.question_stats_csv);
    if (!metadata_comment.empty()) csv << "# " << metadata_comment << '\n';
    csv << "problem_id,policy,n_samples,n_first,n_second,p1,p2,p1_over_p2,"
           "entropy_nats,correct,decision\n";
    for (const auto& [label, rows] : by_policy) {
      for (const auto& r : rows) {
        VoteTally tally;
        for (const auto& [answer, count] : r.answer_counts) {
          for (int i = 0; i < count; ++i) tally.add(AnswerKey(answer));
        }
        std::string p1 = "", p2 = "", ratio = "", entropy = "";
        int n_first = 0, n_second = 0;
        if (tally.total() > 0) {
          const TopTwo tt = tally.top_two();
          const DistributionStats stats = tally.distribution_stats();
          n_first = tt.n_first;
          n_second = tt.n_second;
          std::snprintf(buf, sizeof(buf), "%.6f", stats.p1);
          p1 = buf;
          std::snprintf(buf, sizeof(buf), "%.6f", stats.p2);
          p2 = buf;
          if (std::isfinite(stats.p1_over_p2)) {
            std::snprintf(buf, sizeof(buf), "%.6f", stats.p1_over_p2);
            ratio = buf;
          } else {
            ratio = "inf";
          }
          std::snprintf(buf, sizeof(buf), "%.6f", stats.entropy_nats);
          entropy = buf;
        }
        std::string correct_cell;
        if (r.correct.has_value()) correct_cell = *r.correct ? "1" : "0";
        std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%d,%s,%s,%s,%s,%s,%s\n",
                      r.problem_id.c_str(), label.c_str(), r.n_samples, n_first, n_second,
                      p1.c_str(), p2.c_str(), ratio.c_str(), entropy.c_str(),
                      correct_cell.c_str(), r.decision_kind.c_str());
        csv << buf;
      }
    }
  }
  {
    std::ofstream text(files.summary_text);
    text << "policy                                            "
            "  n   acc%   avg_n     tokens   reduction%\n";
    for (const auto& [label, rows] : by_policy) {
      const int64_t tokens = total_tokens(rows, convention);
      int64_t samples = 0;
      bool has_gold = true;
      int64_t n_correct = 0;
      for (const auto& r : rows) {
        samples += r.n_samples;
        has_gold = has_gold && r.correct.has_value();
        n_correct += r.correct.value_or(false) ? 1 : 0;
      }
      std::string acc = "   -";
      if (has_gold && !rows.empty()) {
        std::snprintf(buf, sizeof(buf), "%5.1f",
                      100.0 * static_cast<double>(n_correct) /
                          static_cast<double>(rows.size()));
        acc = buf;
      }
      std::snprintf(buf, sizeof(buf), "%-50s %3zu  %s  %6.2f %10lld       %6.1f\n",
                    label.c_str(), rows.size(), acc.c_str(),
                    static_cast<double>(samples) / static_cast<double>(rows.size()),
                    static_cast<long long>(tokens),
                    token_reduction(tokens, baseline_tokens));
      text << buf;
    }
  }
  return files;
}

}  // namespace seqvote
