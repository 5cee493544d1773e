#include "seqvote/http_solver.hpp"

#include <chrono>
#include <cstdlib>
#include <random>
#include <thread>

#ifdef SEQVOTE_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

namespace seqvote {

using nlohmann::json;

namespace {

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

int jittered_backoff_ms(int base_ms, int attempt) {
  static thread_local std::mt19937 rng{std::random_device{}()};
  const int ceiling = base_ms * (1 << std::min(attempt, 6));
  std::uniform_int_distribution<int> jitter(0, ceiling / 2 + 1);
  return ceiling + jitter(rng);
}

// Pull the answer field out of the structured completion. Returns nullopt on
// any shape mismatch.
std::optional<std::string> extract_answer(const json& response) {
  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty()) {
    return std::nullopt;
  }
  const json& message = response["choices"][0].value("message", json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    return std::nullopt;
  }
  json content;
  try {
    content = json::parse(message["content"].get<std::string>());
  } catch (const json::exception&) {
    return std::nullopt;
  }
  if (!content.contains("answer") || !content["answer"].is_string()) {
    return std::nullopt;
  }
  return content["answer"].get<std::string>();
}

void fill_usage(const json& response, QueryRecord& record) {
  if (!response.contains("usage")) return;
  const json& usage = response["usage"];
  record.prompt_tokens = usage.value("prompt_tokens", 0);
  record.completion_tokens = usage.value("completion_tokens", 0);
  // Some providers report reasoning tokens beside (not inside) the completion
  // count; fold them in so the totals reflect real spend. OpenAI-style
  // completion_tokens_details are already included in completion_tokens.
  if (usage.contains("reasoning_tokens") && usage["reasoning_tokens"].is_number()) {
    record.completion_tokens += usage["reasoning_tokens"].get<int>();
  }
}

}  // namespace

HttpSolver::HttpSolver(EndpointConfig config) : config_(std::move(config)) {
  if (config_.model.empty()) {
    throw std::invalid_argument("endpoint config needs a model name");
  }
  if (config_.max_attempts < 1) {
    throw std::invalid_argument("endpoint config needs max_attempts >= 1");
  }
}

std::string HttpSolver::build_request_body(const ProblemSpec& problem) const {
  json body;
  body["model"] = config_.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", problem.prompt}}});
  body["response_format"] = json{
      {"type", "json_schema"},
      {"json_schema",
       json{{"name", "final_answer"},
            {"strict", true},
            {"schema", json{{"type", "object"},
                            {"properties", json{{"answer", json{{"type", "string"}}}}},
                            {"required", json::array({"answer"})},
                            {"additionalProperties", false}}}}}};
  if (problem.model_hints.reasoning_effort.has_value()) {
    body[config_.reasoning_effort_field] = to_string(*problem.model_hints.reasoning_effort);
  }
  if (problem.model_hints.temperature.has_value()) {
    body["temperature"] = *problem.model_hints.temperature;
  }
  return body.dump();
}

QueryRecord HttpSolver::solve(const ProblemSpec& problem, const QueryContext& ctx) {
  QueryRecord record;
  record.turn_index = ctx.turn_index;

  httplib::Headers headers{{"Content-Type", "application/json"}};
  if (const char* credential = std::getenv(config_.credential_env.c_str());
      credential != nullptr && credential[0] != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + credential);
  }

  const auto start = std::chrono::steady_clock::now();
  std::string body = build_request_body(problem);
  std::string last_error = "no attempt made";
  bool reprompted = false;

  for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(jittered_backoff_ms(config_.backoff_base_ms, attempt - 1)));
    }
    // A client per request: httplib clients are not safe to share across the
    // scheduler's concurrent dispatches.
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(config_.timeout_seconds, 0);
    client.set_read_timeout(config_.timeout_seconds, 0);
    client.set_write_timeout(config_.timeout_seconds, 0);

    httplib::Result result = client.Post(config_.path, headers, body, "application/json");
    if (!result) {
      last_error = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (retryable_status(result->status)) {
      last_error = "retryable HTTP status " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      last_error = "HTTP status " + std::to_string(result->status);
      break;
    }
    json response;
    try {
      response = json::parse(result->body);
    } catch (const json::exception& ex) {
      last_error = std::string("invalid response JSON: ") + ex.what();
      continue;
    }
    fill_usage(response, record);
    const std::optional<std::string> answer = extract_answer(response);
    if (!answer.has_value()) {
      // Malformed structured output gets exactly one re-prompt before the
      // query is written off as failed.
      last_error = "missing or malformed structured answer";
      if (!reprompted) {
        reprompted = true;
        continue;
      }
      break;
    }
    record.raw_text = *answer;
    record.answer = normalize_answer(*answer);
    record.latency_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                             std::chrono::steady_clock::now() - start)
                                             .count());
    return record;
  }

  record.error = last_error;
  record.answer = AnswerKey{};
  record.raw_text.clear();
  record.latency_ms = static_cast<int>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                           std::chrono::steady_clock::now() - start)
                                           .count());
  return record;
}

}  // namespace seqvote
