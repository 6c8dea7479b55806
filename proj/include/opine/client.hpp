#pragma once

#include <string>
#include <vector>

namespace opine {

struct CompletionRequest {
  std::string model;
  std::string prompt;
  int max_tokens = 16;
  double temperature = 0.0;
};

// Wire format: {"model": ..., "prompt": ..., "max_tokens": ..., "temperature": ...}
std::string completion_request_body(const CompletionRequest& request);

// Extracts choices[0].text from a completion response body.
std::string parse_completion_response(const std::string& body);

/// Client for a generic text-completion endpoint. Authenticates with a
/// bearer token; retries transport failures and 5xx responses a fixed number
/// of times.
class CompletionClient {
 public:
  CompletionClient(std::string url, std::string api_key);

  // Reads COMPLETION_API_URL and COMPLETION_API_KEY.
  static CompletionClient from_env();

  std::string complete(const CompletionRequest& request) const;

  // Runs requests concurrently under the in-flight cap; results are
  // index-matched to requests, never ordered by arrival.
  std::vector<std::string> complete_batch(
      const std::vector<CompletionRequest>& requests) const;

  int max_retries = 2;
  int timeout_seconds = 30;
  int max_in_flight = 4;

 private:
  std::string url_;
  std::string api_key_;
};

}  // namespace opine
