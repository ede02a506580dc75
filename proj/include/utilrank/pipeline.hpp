#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "utilrank/controller.hpp"
#include "utilrank/corpus.hpp"
#include "utilrank/embedding.hpp"
#include "utilrank/extract.hpp"
#include "utilrank/judge.hpp"
#include "utilrank/json_io.hpp"

namespace utilrank {

struct PipelineConfig {
  std::size_t top_k = kDefaultTopK;
  double u_threshold = kDefaultUtilityThreshold;
  JudgeMode judge_mode = JudgeMode::Single;
  ModelEndpoint controller{"", "", EndpointRole::Controller};
  ModelEndpoint judge{"", "", EndpointRole::Judge};
  /// Empty base_url selects the built-in hash embedder.
  ModelEndpoint embedding{"", "", EndpointRole::Embedding};
  std::size_t parallelism = 4;
  std::string corpus_path;
  std::string run_store_path;

  /// Throws InvalidThreshold or InvalidConfig.
  void validate() const;
  bool operator==(const PipelineConfig&) const = default;
};

void to_json(Json& j, const PipelineConfig& v);
void from_json(const Json& j, PipelineConfig& v);

enum class RunStatus { Succeeded, Failed };
NLOHMANN_JSON_SERIALIZE_ENUM(RunStatus, {{RunStatus::Succeeded, "succeeded"}, {RunStatus::Failed, "failed"}})

struct StageError {
  std::string stage;       // "retrieve", "judge", "extract"
  std::string segment_id;  // empty for stage-wide failures
  std::string message;

  bool operator==(const StageError&) const = default;
};

/// The persisted audit artifact for one query.
struct RunRecord {
  std::string run_id;
  std::string timestamp;
  RunStatus status = RunStatus::Succeeded;
  QueryStatement query;
  PipelineConfig config;
  std::vector<ScoredCandidate> c0;
  std::vector<JudgeVerdict> verdicts;
  std::vector<std::string> c1_ids;
  std::vector<std::string> j1_ids;
  std::vector<EvidenceItem> evidence;
  std::vector<StageError> errors;

  bool operator==(const RunRecord&) const = default;
};

void to_json(Json& j, const StageError& v);
void from_json(const Json& j, StageError& v);
void to_json(Json& j, const RunRecord& v);
void from_json(const Json& j, RunRecord& v);

/// Embedding provider and judge selected by a configuration.
struct PipelineServices {
  std::shared_ptr<const EmbeddingProvider> embedder;
  std::shared_ptr<const Judge> judge;
};

/// Hash embedder unless an embedding URL is set; mock judge when the judge
/// URL is "mock", otherwise the configured endpoints.
PipelineServices make_services(const PipelineConfig& config, int expected_dimension = 0);

/// Retrieval (raw query text) -> judging (query + statement) -> gate ->
/// utility threshold -> extraction. Stage failures are recorded on the
/// record; a run with a failed retrieval, or in which every judge call fails,
/// ends with status Failed. Throws only for invalid input (empty query,
/// bad threshold or config).
RunRecord run_query(const IndexedCorpus& corpus, const QueryStatement& query, const PipelineConfig& config,
                    const EmbeddingProvider& embedder, const Judge& judge);

/// Result document: run_id, query, status, evidence (with utility), stage
/// counts and errors.
Json result_document(const RunRecord& record);

/// Human-readable invariant violations (empty when the record is sound):
/// J1 ⊆ C1 ⊆ C0, every C0 id has a verdict or error, evidence aligned with J1.
std::vector<std::string> audit_violations(const RunRecord& record);

std::string generate_run_id();
std::string utc_timestamp();

/// Append-only store: one `runs/<run_id>.json` file per run plus an
/// `index.jsonl` listing.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  /// Throws StoreUnavailable (including when the run id already exists).
  std::string persist(const RunRecord& record) const;
  /// Throws RunNotFound or CorruptRecord.
  RunRecord load(const std::string& run_id) const;
  std::vector<std::string> list() const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

std::string persist_run(const RunRecord& record, const std::filesystem::path& store_path);
RunRecord load_run(const std::filesystem::path& store_path, const std::string& run_id);

}  // namespace utilrank
