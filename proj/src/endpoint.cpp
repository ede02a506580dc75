#include "utilrank/endpoint.hpp"

#include "httplib.h"
#include "json.hpp"
#include "utilrank/error.hpp"

namespace utilrank {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing slash
};

std::optional<SplitUrl> split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  if (path_start != std::string::npos) out.prefix = url.substr(path_start);
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

}  // namespace

bool is_mock_endpoint(const ModelEndpoint& endpoint) {
  return endpoint.base_url == "mock" || endpoint.base_url.starts_with("mock:");
}

void validate_endpoint(const ModelEndpoint& endpoint) {
  if (endpoint.max_retries < 0 || endpoint.max_retries > kMaxRetriesLimit) {
    throw Error(ErrorCode::InvalidConfig, "max_retries must be in [0, 5], got " + std::to_string(endpoint.max_retries));
  }
  if (endpoint.timeout.count() <= 0) throw Error(ErrorCode::InvalidConfig, "endpoint timeout must be positive");
}

std::optional<HttpResponse> http_post_json(const std::string& base_url, std::string_view path,
                                           const std::string& body, std::chrono::milliseconds timeout) {
  const auto url = split_url(base_url);
  if (!url) return std::nullopt;
  httplib::Client client(url->origin);
  if (!client.is_valid()) return std::nullopt;
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());
  auto result = client.Post(url->prefix + std::string(path), body, "application/json");
  if (!result) return std::nullopt;
  return HttpResponse{result->status, result->body};
}

std::string chat_complete(const ModelEndpoint& endpoint, const std::string& prompt) {
  const nlohmann::json request = {
      {"model", endpoint.model_name},
      {"temperature", endpoint.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  const auto response = http_post_json(endpoint.base_url, "/chat/completions", request.dump(), endpoint.timeout);
  if (!response) throw Error(ErrorCode::ModelUnavailable, "no response from " + endpoint.base_url);
  if (response->status < 200 || response->status >= 300) {
    throw Error(ErrorCode::ModelUnavailable,
                endpoint.base_url + " returned HTTP " + std::to_string(response->status));
  }
  const auto body = nlohmann::json::parse(response->body, nullptr, false);
  if (body.is_discarded() || !body.contains("choices") || !body["choices"].is_array() || body["choices"].empty()) {
    throw Error(ErrorCode::ModelUnavailable, endpoint.base_url + " returned an unreadable chat completion");
  }
  const auto& message = body["choices"][0].value("message", nlohmann::json::object());
  if (!message.contains("content") || !message["content"].is_string()) {
    throw Error(ErrorCode::ModelUnavailable, endpoint.base_url + " returned a completion without message content");
  }
  return message["content"].get<std::string>();
}

}  // namespace utilrank
