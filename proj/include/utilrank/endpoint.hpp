#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace utilrank {

enum class EndpointRole { Controller, Judge, Embedding };

/// A self-hosted model behind an OpenAI-compatible HTTP API. A base_url of
/// "mock" selects the built-in deterministic stand-in where one exists.
struct ModelEndpoint {
  std::string base_url;
  std::string model_name;
  EndpointRole role = EndpointRole::Judge;
  std::chrono::milliseconds timeout{30000};
  int max_retries = 2;
  double temperature = 0.0;

  bool operator==(const ModelEndpoint&) const = default;
};

inline constexpr int kMaxRetriesLimit = 5;

bool is_mock_endpoint(const ModelEndpoint& endpoint);

/// Throws InvalidConfig when max_retries is outside [0, 5] or the timeout is
/// not positive.
void validate_endpoint(const ModelEndpoint& endpoint);

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// POSTs a JSON body to base_url + path. Returns nullopt on a transport
/// failure (connection refused, timeout, bad URL).
std::optional<HttpResponse> http_post_json(const std::string& base_url, std::string_view path,
                                           const std::string& body, std::chrono::milliseconds timeout);

/// One chat-completion round trip; returns the first choice's message
/// content. Throws ModelUnavailable on transport errors, non-2xx statuses or
/// an unreadable response envelope.
std::string chat_complete(const ModelEndpoint& endpoint, const std::string& prompt);

}  // namespace utilrank
