#include "opine/client.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "opine/error.hpp"

namespace opine {

using nlohmann::json;

std::string completion_request_body(const CompletionRequest& request) {
  json j;
  j["model"] = request.model;
  j["prompt"] = request.prompt;
  j["max_tokens"] = request.max_tokens;
  j["temperature"] = request.temperature;
  return j.dump();
}

std::string parse_completion_response(const std::string& body) {
  try {
    json j = json::parse(body);
    const auto& choices = j.at("choices");
    if (!choices.is_array() || choices.empty()) {
      throw Error(ErrorKind::Parse, "completion response has no choices");
    }
    return choices[0].at("text").get<std::string>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse,
                std::string("bad completion response: ") + e.what());
  }
}

CompletionClient::CompletionClient(std::string url, std::string api_key)
    : url_(std::move(url)), api_key_(std::move(api_key)) {
  if (url_.empty()) {
    throw Error(ErrorKind::Config, "completion endpoint URL is empty");
  }
}

CompletionClient CompletionClient::from_env() {
  const char* url = std::getenv("COMPLETION_API_URL");
  const char* key = std::getenv("COMPLETION_API_KEY");
  if (url == nullptr || *url == '\0') {
    throw Error(ErrorKind::Config, "COMPLETION_API_URL is not set");
  }
  if (key == nullptr || *key == '\0') {
    throw Error(ErrorKind::Config, "COMPLETION_API_KEY is not set");
  }
  return CompletionClient(url, key);
}

namespace {

// Splits "http://host:port/some/path" into the client base and the path.
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  const std::size_t host_start =
      scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) {
    return {url, "/"};
  }
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

std::string CompletionClient::complete(const CompletionRequest& request) const {
  const auto [base, path] = split_url(url_);
  const std::string body = completion_request_body(request);

  std::string last_failure;
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    httplib::Client client(base);
    client.set_connection_timeout(timeout_seconds, 0);
    client.set_read_timeout(timeout_seconds, 0);
    httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};
    auto result = client.Post(path, headers, body, "application/json");
    if (!result) {
      last_failure = "transport error: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 500) {
      last_failure = "server error: status " + std::to_string(result->status);
      continue;
    }
    if (result->status != 200) {
      throw Error(ErrorKind::Runtime,
                  "completion endpoint returned status " +
                      std::to_string(result->status));
    }
    return parse_completion_response(result->body);
  }
  throw Error(ErrorKind::Runtime,
              "completion request failed after " +
                  std::to_string(max_retries + 1) + " attempts: " +
                  last_failure);
}

std::vector<std::string> CompletionClient::complete_batch(
    const std::vector<CompletionRequest>& requests) const {
  std::vector<std::string> results(requests.size());
  std::vector<std::string> failures(requests.size());
  std::atomic<std::size_t> next{0};

  const std::size_t n_workers = std::min<std::size_t>(
      std::max(1, max_in_flight), std::max<std::size_t>(1, requests.size()));
  std::vector<std::thread> workers;
  workers.reserve(n_workers);
  for (std::size_t w = 0; w < n_workers; ++w) {
    workers.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= requests.size()) break;
        try {
          results[i] = complete(requests[i]);
        } catch (const std::exception& e) {
          failures[i] = e.what();
        }
      }
    });
  }
  for (auto& worker : workers) worker.join();

  for (std::size_t i = 0; i < failures.size(); ++i) {
    if (!failures[i].empty()) {
      throw Error(ErrorKind::Runtime,
                  "request " + std::to_string(i) + " failed: " + failures[i]);
    }
  }
  return results;
}

}  // namespace opine
