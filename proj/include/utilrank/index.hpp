#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "utilrank/embedding.hpp"
#include "utilrank/ingest.hpp"

namespace utilrank {

inline constexpr double kBm25K1 = 1.2;
inline constexpr double kBm25B = 0.75;
inline constexpr std::size_t kDefaultTopK = 50;

struct Posting {
  std::string segment_id;
  int term_frequency = 0;

  bool operator==(const Posting&) const = default;
};

/// Inverted index for BM25. Posting lists are sorted by segment_id.
struct LexicalIndex {
  std::map<std::string, std::vector<Posting>> postings;
  std::map<std::string, int> doc_lengths;
  double avg_doc_length = 0.0;
  std::size_t corpus_size = 0;

  bool operator==(const LexicalIndex&) const = default;
};

/// Row i of `vectors` is the unit-norm embedding of ids[i]; ids are sorted.
struct DenseIndex {
  std::vector<std::string> ids;
  Eigen::MatrixXd vectors;
  int dimension = 0;
  std::string model_id;
};

enum class Provenance { Keyword, Embed, Both };

struct ScoredCandidate {
  std::string segment_id;
  std::optional<double> lexical_score;
  std::optional<double> dense_score;
  Provenance provenance = Provenance::Keyword;

  bool operator==(const ScoredCandidate&) const = default;
};

/// Throws DuplicateSegmentId.
LexicalIndex build_lexical_index(std::span<const Segment> segments);

/// BM25 with k1 = 1.2, b = 0.75 and idf = ln(1 + (N - df + 0.5) / (df + 0.5)).
/// Each distinct query token contributes once. Only positive scores are
/// returned; ties go to the smaller segment_id.
std::vector<ScoredCandidate> lexical_top_k(const LexicalIndex& index, std::span<const std::string> query_tokens,
                                           std::size_t k);

DenseIndex build_dense_index(std::span<const Segment> segments, const EmbeddingProvider& provider);

/// Exact cosine scan. Throws DimensionMismatch.
std::vector<ScoredCandidate> dense_top_k(const DenseIndex& index, const Embedding& query, std::size_t k);

/// C0 = TopK_kw(q) ∪ TopK_embed(q), deduplicated by segment_id and returned
/// in ascending segment_id order (the union carries no ranking).
std::vector<ScoredCandidate> hybrid_retrieve(const LexicalIndex& lexical, const DenseIndex& dense,
                                             const EmbeddingProvider& provider, std::string_view query,
                                             std::size_t k = kDefaultTopK);

}  // namespace utilrank
