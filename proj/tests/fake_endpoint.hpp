#pragma once

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

// Eigen must precede httplib: <resolv.h> defines a _res macro.
#include <Eigen/Core>

#include "httplib.h"
#include "json.hpp"

namespace testing {

/// OpenAI-compatible chat endpoint on a free local port. The handler maps a
/// prompt to (HTTP status, assistant content).
class FakeChatServer {
 public:
  using Handler = std::function<std::pair<int, std::string>(const std::string& prompt)>;

  explicit FakeChatServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      const std::string prompt = body["messages"][0]["content"].get<std::string>();
      {
        std::lock_guard lock(mutex_);
        prompts_.push_back(prompt);
      }
      const auto [status, content] = handler_(prompt);
      res.status = status;
      const nlohmann::json reply = {
          {"choices", nlohmann::json::array({{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}})}};
      res.set_content(reply.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeChatServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  std::vector<std::string> prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
  }
  std::size_t calls() const { return prompts().size(); }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  mutable std::mutex mutex_;
  std::vector<std::string> prompts_;
};

/// A base URL nothing listens on.
inline std::string dead_url() { return "http://127.0.0.1:1"; }

}  // namespace testing
