#pragma once

#include <memory>
#include <string>

#include "utilrank/corpus.hpp"
#include "utilrank/pipeline.hpp"

namespace utilrank {

/// HTTP query endpoint over a read-only corpus.
///
///   POST /query      {"query", "financial_statement", "top_k"?, "u_threshold"?}
///   GET  /runs/{id}  persisted RunRecord
///   GET  /health
///
/// Responses: 400 malformed body, 404 unknown run, 503 failed run (judge or
/// embedding endpoint unreachable).
class QueryService {
 public:
  QueryService(std::shared_ptr<const IndexedCorpus> corpus, PipelineConfig config, PipelineServices services);
  ~QueryService();
  QueryService(const QueryService&) = delete;
  QueryService& operator=(const QueryService&) = delete;

  /// Binds and serves until stop(). Returns false if the bind fails.
  bool listen(const std::string& host, int port);
  /// Binds to a free port and returns it, or -1.
  int bind_any_port(const std::string& host);
  /// Serves on the port taken by bind_any_port until stop().
  bool serve();
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace utilrank
