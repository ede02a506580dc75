#include "utilrank/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "utilrank/error.hpp"
#include "utilrank/json_io.hpp"

namespace utilrank {
namespace fs = std::filesystem;
namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidParams, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::StoreUnavailable, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::StoreUnavailable, "write failed for " + path.string());
}

template <typename T>
std::vector<T> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidParams, path.string() + " is missing; run ingest first");
  std::vector<T> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      out.push_back(Json::parse(line).get<T>());
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::CorruptRecord, path.string() + ": " + e.what());
    }
  }
  return out;
}

template <typename T>
std::string to_jsonl(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) {
    out += Json(item).dump();
    out += '\n';
  }
  return out;
}

}  // namespace

void Corpus::add(ParsedDocument doc) {
  documents.push_back(std::move(doc.source));
  for (auto& s : doc.segments) segments.push_back(std::move(s));
}

IngestReport load_corpus_directory(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw Error(ErrorCode::InvalidParams, dir.string() + " is not a directory");

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".md") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  IngestReport report;
  std::set<std::string> seen;
  for (const auto& file : files) {
    try {
      auto doc = parse_markdown_file(read_file(file), file.string());
      if (!seen.insert(doc.source.doc_id).second) {
        throw Error(ErrorCode::DuplicateSegmentId, "doc_id '" + doc.source.doc_id + "' already ingested");
      }
      report.corpus.add(std::move(doc));
    } catch (const Error& e) {
      report.failures.push_back(IngestFailure{file.string(), e.what()});
    }
  }
  return report;
}

IndexedCorpus::IndexedCorpus(Corpus corpus, LexicalIndex lexical, DenseIndex dense)
    : corpus_(std::move(corpus)), lexical_(std::move(lexical)), dense_(std::move(dense)) {
  for (std::size_t i = 0; i < corpus_.segments.size(); ++i) segment_pos_.emplace(corpus_.segments[i].segment_id, i);
  for (std::size_t i = 0; i < corpus_.documents.size(); ++i) document_pos_.emplace(corpus_.documents[i].doc_id, i);
}

IndexedCorpus IndexedCorpus::build(Corpus corpus, const EmbeddingProvider& provider) {
  auto lexical = build_lexical_index(corpus.segments);
  auto dense = build_dense_index(corpus.segments, provider);
  return IndexedCorpus(std::move(corpus), std::move(lexical), std::move(dense));
}

IndexedCorpus IndexedCorpus::load(const fs::path& dir) {
  Corpus corpus;
  corpus.documents = read_jsonl<DocumentSource>(dir / "documents.jsonl");
  corpus.segments = read_jsonl<Segment>(dir / "segments.jsonl");
  try {
    auto lexical = lexical_index_from_json(Json::parse(read_file(dir / "lexical.idx.json")));
    auto dense = dense_index_from_json(Json::parse(read_file(dir / "dense.idx.json")));
    return IndexedCorpus(std::move(corpus), std::move(lexical), std::move(dense));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptRecord, dir.string() + ": " + e.what());
  }
}

void IndexedCorpus::save(const fs::path& dir) const {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorCode::StoreUnavailable, "cannot create " + dir.string());
  write_file(dir / "documents.jsonl", to_jsonl(corpus_.documents));
  write_file(dir / "segments.jsonl", to_jsonl(corpus_.segments));
  write_file(dir / "lexical.idx.json", lexical_index_to_json(lexical_).dump());
  write_file(dir / "dense.idx.json", dense_index_to_json(dense_).dump());
}

const Segment& IndexedCorpus::segment(std::string_view segment_id) const {
  const auto it = segment_pos_.find(segment_id);
  if (it == segment_pos_.end()) throw Error(ErrorCode::InvalidParams, "unknown segment " + std::string(segment_id));
  return corpus_.segments[it->second];
}

std::string IndexedCorpus::document_title(std::string_view doc_id) const {
  const auto it = document_pos_.find(doc_id);
  if (it == document_pos_.end() || corpus_.documents[it->second].title.empty()) return std::string(doc_id);
  return corpus_.documents[it->second].title;
}

}  // namespace utilrank
