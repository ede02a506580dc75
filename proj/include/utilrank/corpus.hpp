#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "utilrank/embedding.hpp"
#include "utilrank/index.hpp"
#include "utilrank/ingest.hpp"

namespace utilrank {

struct Corpus {
  std::vector<DocumentSource> documents;
  std::vector<Segment> segments;

  void add(ParsedDocument doc);
};

struct IngestFailure {
  std::string path;
  std::string message;
};

struct IngestReport {
  Corpus corpus;
  std::vector<IngestFailure> failures;
};

/// Parses every `*.md` file in dir (sorted by name). Files that fail to parse,
/// or repeat an earlier doc_id, are reported and skipped. Throws
/// InvalidParams when dir is not a directory.
IngestReport load_corpus_directory(const std::filesystem::path& dir);

/// A corpus with both retrieval indexes. Immutable once built; safe to share
/// across query threads.
class IndexedCorpus {
 public:
  static IndexedCorpus build(Corpus corpus, const EmbeddingProvider& provider);

  /// Reads documents.jsonl, segments.jsonl, lexical.idx.json and
  /// dense.idx.json from dir.
  static IndexedCorpus load(const std::filesystem::path& dir);
  void save(const std::filesystem::path& dir) const;

  const Corpus& corpus() const { return corpus_; }
  const LexicalIndex& lexical() const { return lexical_; }
  const DenseIndex& dense() const { return dense_; }

  const Segment& segment(std::string_view segment_id) const;
  /// The document title, or the doc_id when the document is unknown.
  std::string document_title(std::string_view doc_id) const;

 private:
  IndexedCorpus(Corpus corpus, LexicalIndex lexical, DenseIndex dense);

  Corpus corpus_;
  LexicalIndex lexical_;
  DenseIndex dense_;
  std::map<std::string, std::size_t, std::less<>> segment_pos_;
  std::map<std::string, std::size_t, std::less<>> document_pos_;
};

}  // namespace utilrank
