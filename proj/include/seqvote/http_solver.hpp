#pragma once

// Live answer source speaking the chat-completions JSON protocol. The model
// is asked for a single-field structured object {"answer": string}; token
// usage is read from the response's usage block. Transient failures (HTTP
// 429/5xx, timeouts) are retried with exponential backoff.

#include <optional>
#include <string>

#include "seqvote/solvers.hpp"

namespace seqvote {

struct EndpointConfig {
  std::string base_url = "http://localhost:8000";  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  // Name of the request field carrying the reasoning-effort hint; some
  // providers use e.g. "reasoning_effort", others nest it differently.
  std::string reasoning_effort_field = "reasoning_effort";
  // Credential is read from this environment variable, never from flags or
  // config files. Empty value sends no Authorization header.
  std::string credential_env = "SEQVOTE_API_KEY";
  int timeout_seconds = 300;
  int max_attempts = 5;
  int backoff_base_ms = 1000;
};

class HttpSolver : public Solver {
 public:
  explicit HttpSolver(EndpointConfig config);

  QueryRecord solve(const ProblemSpec& problem, const QueryContext& ctx) override;

  // Request body for one problem; exposed for tests of the wire format.
  std::string build_request_body(const ProblemSpec& problem) const;

 private:
  EndpointConfig config_;
};

}  // namespace seqvote
