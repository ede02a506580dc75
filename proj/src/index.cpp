#include "utilrank/index.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "utilrank/error.hpp"
#include "utilrank/text.hpp"

namespace utilrank {
namespace {

void require_k(std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidParams, "k must be at least 1");
}

bool ranks_before(double score_a, const std::string& id_a, double score_b, const std::string& id_b) {
  if (score_a != score_b) return score_a > score_b;
  return id_a < id_b;
}

}  // namespace

LexicalIndex build_lexical_index(std::span<const Segment> segments) {
  LexicalIndex index;
  for (const auto& seg : segments) {
    if (index.doc_lengths.contains(seg.segment_id)) {
      throw Error(ErrorCode::DuplicateSegmentId, "segment id '" + seg.segment_id + "' appears twice");
    }
    const auto tokens = tokenize(seg.text);
    index.doc_lengths[seg.segment_id] = static_cast<int>(tokens.size());
    std::map<std::string, int> counts;
    for (const auto& t : tokens) ++counts[t];
    for (const auto& [term, tf] : counts) index.postings[term].push_back(Posting{seg.segment_id, tf});
  }
  for (auto& [term, list] : index.postings) {
    std::sort(list.begin(), list.end(), [](const Posting& a, const Posting& b) { return a.segment_id < b.segment_id; });
  }
  index.corpus_size = index.doc_lengths.size();
  if (index.corpus_size > 0) {
    double total = 0.0;
    for (const auto& [id, len] : index.doc_lengths) total += len;
    index.avg_doc_length = total / static_cast<double>(index.corpus_size);
  }
  return index;
}

std::vector<ScoredCandidate> lexical_top_k(const LexicalIndex& index, std::span<const std::string> query_tokens,
                                           std::size_t k) {
  require_k(k);
  const std::set<std::string> terms(query_tokens.begin(), query_tokens.end());
  const auto n = static_cast<double>(index.corpus_size);
  const double avgdl = index.avg_doc_length > 0.0 ? index.avg_doc_length : 1.0;

  std::map<std::string, double> scores;
  for (const auto& term : terms) {
    const auto it = index.postings.find(term);
    if (it == index.postings.end()) continue;
    const auto df = static_cast<double>(it->second.size());
    const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
    for (const auto& posting : it->second) {
      const double tf = posting.term_frequency;
      const double len = index.doc_lengths.at(posting.segment_id);
      const double norm = kBm25K1 * (1.0 - kBm25B + kBm25B * len / avgdl);
      scores[posting.segment_id] += idf * tf * (kBm25K1 + 1.0) / (tf + norm);
    }
  }

  std::vector<ScoredCandidate> ranked;
  ranked.reserve(scores.size());
  for (const auto& [id, score] : scores) {
    if (score > 0.0) ranked.push_back(ScoredCandidate{id, score, std::nullopt, Provenance::Keyword});
  }
  const auto keep = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(),
                    [](const ScoredCandidate& a, const ScoredCandidate& b) {
                      return ranks_before(*a.lexical_score, a.segment_id, *b.lexical_score, b.segment_id);
                    });
  ranked.resize(keep);
  return ranked;
}

DenseIndex build_dense_index(std::span<const Segment> segments, const EmbeddingProvider& provider) {
  std::vector<const Segment*> sorted;
  for (const auto& s : segments) sorted.push_back(&s);
  std::sort(sorted.begin(), sorted.end(), [](const Segment* a, const Segment* b) { return a->segment_id < b->segment_id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i]->segment_id == sorted[i - 1]->segment_id) {
      throw Error(ErrorCode::DuplicateSegmentId, "segment id '" + sorted[i]->segment_id + "' appears twice");
    }
  }

  std::vector<std::string> texts;
  DenseIndex index;
  for (const auto* s : sorted) {
    index.ids.push_back(s->segment_id);
    texts.push_back(s->text);
  }
  const auto vectors = provider.embed_batch(texts);
  index.dimension = vectors.empty() ? provider.dimension() : static_cast<int>(vectors.front().size());
  index.model_id = provider.model_id();
  index.vectors.resize(static_cast<Eigen::Index>(vectors.size()), index.dimension);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].size() != index.dimension) {
      throw Error(ErrorCode::DimensionMismatch, "provider returned vectors of differing dimension");
    }
    index.vectors.row(static_cast<Eigen::Index>(i)) = vectors[i].transpose();
  }
  return index;
}

std::vector<ScoredCandidate> dense_top_k(const DenseIndex& index, const Embedding& query, std::size_t k) {
  require_k(k);
  if (query.size() != index.dimension) {
    throw Error(ErrorCode::DimensionMismatch, "query vector has dimension " + std::to_string(query.size()) +
                                                  ", index has " + std::to_string(index.dimension));
  }
  if (index.ids.empty()) return {};
  const Eigen::VectorXd scores = index.vectors * query;

  std::vector<std::size_t> order(index.ids.size());
  std::iota(order.begin(), order.end(), 0);
  const auto keep = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return ranks_before(scores[static_cast<Eigen::Index>(a)], index.ids[a],
                                          scores[static_cast<Eigen::Index>(b)], index.ids[b]);
                    });
  std::vector<ScoredCandidate> ranked;
  ranked.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    const double cosine = std::clamp(scores[static_cast<Eigen::Index>(order[i])], -1.0, 1.0);
    ranked.push_back(ScoredCandidate{index.ids[order[i]], std::nullopt, cosine, Provenance::Embed});
  }
  return ranked;
}

std::vector<ScoredCandidate> hybrid_retrieve(const LexicalIndex& lexical, const DenseIndex& dense,
                                             const EmbeddingProvider& provider, std::string_view query,
                                             std::size_t k) {
  require_k(k);
  const auto keyword = lexical_top_k(lexical, tokenize(query), k);
  const auto semantic = dense.ids.empty() ? std::vector<ScoredCandidate>{}
                                          : dense_top_k(dense, embed_text(provider, query), k);

  std::map<std::string, ScoredCandidate> pool;
  for (const auto& c : keyword) pool.emplace(c.segment_id, c);
  for (const auto& c : semantic) {
    auto [it, inserted] = pool.emplace(c.segment_id, c);
    if (!inserted) {
      it->second.dense_score = c.dense_score;
      it->second.provenance = Provenance::Both;
    }
  }
  std::vector<ScoredCandidate> c0;
  c0.reserve(pool.size());
  for (auto& [id, c] : pool) c0.push_back(std::move(c));
  return c0;
}

}  // namespace utilrank
