#include "utilrank/service.hpp"

#include "httplib.h"
#include "utilrank/error.hpp"

namespace utilrank {
namespace {

Json error_body(std::string_view code, const std::string& message) {
  return Json{{"error", code}, {"message", message}};
}

void reply(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(2) + "\n", "application/json");
}

// Throws InvalidParams / InvalidThreshold for an unusable request body.
std::pair<QueryStatement, PipelineConfig> parse_request(const std::string& body, PipelineConfig config) {
  const Json j = Json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::InvalidParams, "body must be a JSON object");
  if (!j.contains("query") || !j["query"].is_string()) {
    throw Error(ErrorCode::InvalidParams, "\"query\" must be a string");
  }
  QueryStatement q;
  q.query = j["query"].get<std::string>();
  if (j.contains("financial_statement")) {
    if (!j["financial_statement"].is_string()) {
      throw Error(ErrorCode::InvalidParams, "\"financial_statement\" must be a string");
    }
    q.financial_statement = j["financial_statement"].get<std::string>();
  }
  if (j.contains("top_k") && !j["top_k"].is_null()) {
    if (!j["top_k"].is_number_integer() || j["top_k"].get<long long>() < 1) {
      throw Error(ErrorCode::InvalidParams, "\"top_k\" must be a positive integer");
    }
    config.top_k = j["top_k"].get<std::size_t>();
  }
  if (j.contains("u_threshold") && !j["u_threshold"].is_null()) {
    if (!j["u_threshold"].is_number()) throw Error(ErrorCode::InvalidParams, "\"u_threshold\" must be a number");
    config.u_threshold = j["u_threshold"].get<double>();
    validate_threshold(config.u_threshold);
  }
  return {std::move(q), std::move(config)};
}

}  // namespace

struct QueryService::Impl {
  std::shared_ptr<const IndexedCorpus> corpus;
  PipelineConfig config;
  PipelineServices services;
  httplib::Server server;

  void handle_query(const httplib::Request& req, httplib::Response& res) {
    QueryStatement q;
    PipelineConfig cfg;
    try {
      std::tie(q, cfg) = parse_request(req.body, config);
    } catch (const Error& e) {
      return reply(res, 400, error_body(to_string(e.code()), e.detail()));
    }
    try {
      auto record = run_query(*corpus, q, cfg, *services.embedder, *services.judge);
      if (!cfg.run_store_path.empty()) persist_run(record, cfg.run_store_path);
      reply(res, record.status == RunStatus::Succeeded ? 200 : 503, result_document(record));
    } catch (const Error& e) {
      const bool user_error = e.code() == ErrorCode::InvalidParams || e.code() == ErrorCode::InvalidThreshold;
      reply(res, user_error ? 400 : 500, error_body(to_string(e.code()), e.detail()));
    }
  }

  void handle_run(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.path_params.at("id");
    if (config.run_store_path.empty()) return reply(res, 404, error_body("RunNotFound", "no run store configured"));
    try {
      reply(res, 200, Json(load_run(config.run_store_path, id)));
    } catch (const Error& e) {
      reply(res, e.code() == ErrorCode::RunNotFound ? 404 : 500, error_body(to_string(e.code()), e.detail()));
    }
  }
};

QueryService::QueryService(std::shared_ptr<const IndexedCorpus> corpus, PipelineConfig config,
                           PipelineServices services)
    : impl_(std::make_unique<Impl>()) {
  impl_->corpus = std::move(corpus);
  impl_->config = std::move(config);
  impl_->services = std::move(services);
  auto* impl = impl_.get();
  impl->server.Post("/query", [impl](const httplib::Request& req, httplib::Response& res) { impl->handle_query(req, res); });
  impl->server.Get("/runs/:id", [impl](const httplib::Request& req, httplib::Response& res) { impl->handle_run(req, res); });
  impl->server.Get("/health", [impl](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, Json{{"status", "ok"}, {"segments", impl->corpus->corpus().segments.size()}});
  });
}

QueryService::~QueryService() { stop(); }

bool QueryService::listen(const std::string& host, int port) { return impl_->server.listen(host, port); }
int QueryService::bind_any_port(const std::string& host) { return impl_->server.bind_to_any_port(host); }
bool QueryService::serve() { return impl_->server.listen_after_bind(); }
void QueryService::wait_until_ready() const { impl_->server.wait_until_ready(); }
void QueryService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace utilrank
