#include "utilrank/json_io.hpp"

#include "utilrank/error.hpp"

namespace utilrank {
namespace {

template <typename T>
Json optional_to_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

void to_json(Json& j, const CharSpan& v) { j = Json::array({v.start, v.end}); }
void from_json(const Json& j, CharSpan& v) {
  v.start = j.at(0).get<std::size_t>();
  v.end = j.at(1).get<std::size_t>();
}

void to_json(Json& j, const DocumentSource& v) {
  j = Json{{"doc_id", v.doc_id},
           {"title", v.title},
           {"source_path", v.source_path},
           {"language", v.language},
           {"page_count", v.page_count}};
}
void from_json(const Json& j, DocumentSource& v) {
  j.at("doc_id").get_to(v.doc_id);
  j.at("title").get_to(v.title);
  j.at("source_path").get_to(v.source_path);
  j.at("language").get_to(v.language);
  j.at("page_count").get_to(v.page_count);
}

void to_json(Json& j, const Cell& v) { j = Json{{"text", v.text}, {"row_span", v.row_span}, {"col_span", v.col_span}}; }
void from_json(const Json& j, Cell& v) {
  j.at("text").get_to(v.text);
  j.at("row_span").get_to(v.row_span);
  j.at("col_span").get_to(v.col_span);
}

void to_json(Json& j, const TableBlock& v) {
  j = Json{{"rows", v.rows},
           {"header_row_count", v.header_row_count},
           {"col_count", v.col_count},
           {"complexity", v.complexity}};
}
void from_json(const Json& j, TableBlock& v) {
  j.at("rows").get_to(v.rows);
  j.at("header_row_count").get_to(v.header_row_count);
  j.at("col_count").get_to(v.col_count);
  j.at("complexity").get_to(v.complexity);
}

void to_json(Json& j, const Segment& v) {
  j = Json{{"segment_id", v.segment_id},
           {"doc_id", v.doc_id},
           {"section_title", v.section_title},
           {"page_start", v.page_start},
           {"page_end", v.page_end},
           {"kind", v.kind},
           {"text", v.text},
           {"table", optional_to_json(v.table)},
           {"char_span", v.char_span}};
}
void from_json(const Json& j, Segment& v) {
  j.at("segment_id").get_to(v.segment_id);
  j.at("doc_id").get_to(v.doc_id);
  j.at("section_title").get_to(v.section_title);
  j.at("page_start").get_to(v.page_start);
  j.at("page_end").get_to(v.page_end);
  j.at("kind").get_to(v.kind);
  j.at("text").get_to(v.text);
  v.table = optional_from_json<TableBlock>(j, "table");
  j.at("char_span").get_to(v.char_span);
}

void to_json(Json& j, const ScoredCandidate& v) {
  j = Json{{"segment_id", v.segment_id},
           {"lexical_score", optional_to_json(v.lexical_score)},
           {"dense_score", optional_to_json(v.dense_score)},
           {"provenance", v.provenance}};
}
void from_json(const Json& j, ScoredCandidate& v) {
  j.at("segment_id").get_to(v.segment_id);
  v.lexical_score = optional_from_json<double>(j, "lexical_score");
  v.dense_score = optional_from_json<double>(j, "dense_score");
  j.at("provenance").get_to(v.provenance);
}

void to_json(Json& j, const QueryStatement& v) {
  j = Json{{"query", v.query}, {"financial_statement", v.financial_statement}};
}
void from_json(const Json& j, QueryStatement& v) {
  j.at("query").get_to(v.query);
  v.financial_statement = j.value("financial_statement", "");
}

void to_json(Json& j, const JudgeVerdict& v) {
  j = Json{{"segment_id", v.segment_id}, {"relevant", v.relevant}, {"supported", v.supported},
           {"utility", v.utility},       {"rationale", v.rationale}, {"model_id", v.model_id}};
}
void from_json(const Json& j, JudgeVerdict& v) {
  j.at("segment_id").get_to(v.segment_id);
  j.at("relevant").get_to(v.relevant);
  j.at("supported").get_to(v.supported);
  j.at("utility").get_to(v.utility);
  j.at("rationale").get_to(v.rationale);
  j.at("model_id").get_to(v.model_id);
}

void to_json(Json& j, const Citation& v) {
  j = Json{{"document", v.document},
           {"section", v.section},
           {"page_start", v.page_start},
           {"page_end", v.page_end},
           {"pages", v.pages()}};
}
void from_json(const Json& j, Citation& v) {
  j.at("document").get_to(v.document);
  j.at("section").get_to(v.section);
  j.at("page_start").get_to(v.page_start);
  j.at("page_end").get_to(v.page_end);
}

void to_json(Json& j, const EvidenceItem& v) {
  j = Json{{"segment_id", v.segment_id},
           {"mode", v.mode},
           {"content", v.content},
           {"citation", v.citation},
           {"matched_rows", optional_to_json(v.matched_rows)},
           {"no_match", v.no_match},
           {"utility", v.utility}};
}
void from_json(const Json& j, EvidenceItem& v) {
  j.at("segment_id").get_to(v.segment_id);
  j.at("mode").get_to(v.mode);
  j.at("content").get_to(v.content);
  j.at("citation").get_to(v.citation);
  v.matched_rows = optional_from_json<std::vector<std::size_t>>(j, "matched_rows");
  j.at("no_match").get_to(v.no_match);
  j.at("utility").get_to(v.utility);
}

void to_json(Json& j, const ModelEndpoint& v) {
  j = Json{{"base_url", v.base_url},
           {"model_name", v.model_name},
           {"role", v.role},
           {"timeout_ms", v.timeout.count()},
           {"max_retries", v.max_retries},
           {"temperature", v.temperature}};
}
void from_json(const Json& j, ModelEndpoint& v) {
  j.at("base_url").get_to(v.base_url);
  j.at("model_name").get_to(v.model_name);
  j.at("role").get_to(v.role);
  v.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<std::int64_t>());
  j.at("max_retries").get_to(v.max_retries);
  j.at("temperature").get_to(v.temperature);
}

Json lexical_index_to_json(const LexicalIndex& index) {
  Json postings = Json::object();
  for (const auto& [term, list] : index.postings) {
    Json entries = Json::array();
    for (const auto& p : list) entries.push_back(Json::array({p.segment_id, p.term_frequency}));
    postings[term] = std::move(entries);
  }
  return Json{{"scoring", {{"function", "bm25"}, {"k1", kBm25K1}, {"b", kBm25B}}},
              {"corpus_size", index.corpus_size},
              {"avg_doc_length", index.avg_doc_length},
              {"doc_lengths", index.doc_lengths},
              {"postings", std::move(postings)}};
}

LexicalIndex lexical_index_from_json(const Json& j) {
  LexicalIndex index;
  j.at("corpus_size").get_to(index.corpus_size);
  j.at("avg_doc_length").get_to(index.avg_doc_length);
  j.at("doc_lengths").get_to(index.doc_lengths);
  for (const auto& [term, entries] : j.at("postings").items()) {
    auto& list = index.postings[term];
    for (const auto& e : entries) list.push_back(Posting{e.at(0).get<std::string>(), e.at(1).get<int>()});
  }
  return index;
}

Json dense_index_to_json(const DenseIndex& index) {
  Json vectors = Json::object();
  for (std::size_t i = 0; i < index.ids.size(); ++i) {
    const Eigen::VectorXd row = index.vectors.row(static_cast<Eigen::Index>(i)).transpose();
    vectors[index.ids[i]] = std::vector<double>(row.data(), row.data() + row.size());
  }
  return Json{{"dimension", index.dimension}, {"model_id", index.model_id}, {"vectors", std::move(vectors)}};
}

DenseIndex dense_index_from_json(const Json& j) {
  DenseIndex index;
  j.at("dimension").get_to(index.dimension);
  j.at("model_id").get_to(index.model_id);
  const auto& vectors = j.at("vectors");
  index.vectors.resize(static_cast<Eigen::Index>(vectors.size()), index.dimension);
  Eigen::Index row = 0;
  for (const auto& [id, values] : vectors.items()) {
    if (static_cast<int>(values.size()) != index.dimension) {
      throw Error(ErrorCode::DimensionMismatch, "stored vector for " + id + " has the wrong dimension");
    }
    index.ids.push_back(id);
    for (int c = 0; c < index.dimension; ++c) index.vectors(row, c) = values.at(static_cast<std::size_t>(c)).get<double>();
    ++row;
  }
  return index;
}

}  // namespace utilrank
