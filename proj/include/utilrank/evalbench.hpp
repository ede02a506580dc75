#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "utilrank/corpus.hpp"
#include "utilrank/judge.hpp"
#include "utilrank/json_io.hpp"
#include "utilrank/pipeline.hpp"

namespace utilrank {

enum class Label { Gold, Decoy, Neutral };
NLOHMANN_JSON_SERIALIZE_ENUM(Label, {{Label::Gold, "Gold"}, {Label::Decoy, "Decoy"}, {Label::Neutral, "Neutral"}})

struct BenchQuery {
  std::string query_id;
  QueryStatement query;
};

struct CorpusFile {
  std::string name;
  std::string text;  // front matter + markdown body
};

/// Synthetic financial corpus with planted evidence. Gold passages state the
/// query's metric together with the figures from its statement; decoys repeat
/// the metric name in boilerplate without any figure.
struct LabeledCorpus {
  Corpus corpus;
  std::vector<CorpusFile> files;
  std::map<std::pair<std::string, std::string>, Label> labels;  // (query_id, segment_id); absent = Neutral
  std::vector<BenchQuery> queries;
  std::uint64_t seed = 0;

  Label label(const std::string& query_id, const std::string& segment_id) const;
  /// Labels of every segment for one query.
  std::map<std::string, Label> labels_for(const std::string& query_id) const;
};

inline constexpr std::size_t kMaxBenchQueries = 24;

/// Deterministic in (seed, n_docs, n_queries). Throws InvalidParams unless
/// n_docs >= 2 and 1 <= n_queries <= 24.
LabeledCorpus generate_synthetic_corpus(std::uint64_t seed, std::size_t n_docs, std::size_t n_queries);

/// Writes every corpus file into dir (created if needed).
void write_corpus(const LabeledCorpus& corpus, const std::filesystem::path& dir);

/// |Gold ∩ top-k| / min(k, |results|); 0 for empty results.
double precision_at_k(std::span<const std::string> results, const std::map<std::string, Label>& labels,
                      std::size_t k);
/// |Gold ∩ top-k| / |Gold|. Throws NoGoldLabels.
double recall_at_k(std::span<const std::string> results, const std::map<std::string, Label>& labels, std::size_t k);

enum class BenchSystem { DenseOnly, HybridOnly, FullPipeline };
NLOHMANN_JSON_SERIALIZE_ENUM(BenchSystem, {{BenchSystem::DenseOnly, "DenseOnly"},
                                           {BenchSystem::HybridOnly, "HybridOnly"},
                                           {BenchSystem::FullPipeline, "FullPipeline"}})

struct QueryScores {
  std::string query_id;
  std::map<std::size_t, double> precision;  // keyed by k
  std::map<std::size_t, double> recall;
  std::vector<std::string> results;
};

struct SystemScores {
  BenchSystem system = BenchSystem::DenseOnly;
  std::vector<QueryScores> per_query;  // in query order
  std::map<std::size_t, double> mean_precision;
  std::map<std::size_t, double> mean_recall;
};

struct BenchFailure {
  std::string query_id;
  BenchSystem system = BenchSystem::FullPipeline;
  std::string message;
};

struct BenchReport {
  std::uint64_t seed = 0;
  std::size_t n_docs = 0;
  std::size_t n_queries = 0;
  std::size_t top_k = 0;
  double u_threshold = 0.0;
  std::vector<std::size_t> ks;
  std::vector<SystemScores> systems;  // DenseOnly, HybridOnly, FullPipeline
  std::vector<BenchFailure> failures;

  const SystemScores& scores(BenchSystem system) const;
};

/// C0 ordered by max(min-max normalized BM25 score, cosine score), ties by
/// segment_id.
std::vector<std::string> hybrid_ranking(const std::vector<ScoredCandidate>& c0);

/// Runs the three systems on every query. Per-query pipeline failures count
/// as empty results and are listed in the report. Throws InvalidParams for an
/// empty or zero k list.
BenchReport run_benchmark(const LabeledCorpus& corpus, const PipelineConfig& config, std::span<const std::size_t> ks);
BenchReport run_benchmark(const LabeledCorpus& corpus, const PipelineConfig& config, std::span<const std::size_t> ks,
                          const PipelineServices& services);

Json report_to_json(const BenchReport& report);
/// Plain-text table of mean precision and recall per system and k.
std::string render_report(const BenchReport& report);

}  // namespace utilrank
