#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <set>

#include "doctest.h"
#include "support.hpp"
#include "utilrank/error.hpp"
#include "utilrank/evalbench.hpp"
#include "utilrank/text.hpp"

using namespace utilrank;

namespace {

PipelineConfig mock_config() {
  PipelineConfig cfg;
  cfg.judge.base_url = "mock";
  return cfg;
}

std::map<std::string, Label> labels(std::initializer_list<std::pair<const char*, Label>> items) {
  std::map<std::string, Label> out;
  for (const auto& [id, l] : items) out[id] = l;
  return out;
}

const std::vector<std::size_t> kKs = {1, 5, 10};

}  // namespace

TEST_CASE("precision and recall examples") {
  const auto l = labels({{"g1", Label::Gold}, {"d", Label::Decoy}, {"g2", Label::Gold}, {"n", Label::Neutral}});
  const std::vector<std::string> top = {"g1", "d", "g2"};
  CHECK(precision_at_k(top, l, 3) == doctest::Approx(2.0 / 3.0));
  CHECK(precision_at_k({}, l, 3) == 0.0);
  CHECK(precision_at_k(std::vector<std::string>{"g1", "g2"}, l, 5) == 1.0);
  CHECK(precision_at_k(top, l, 1) == 1.0);

  CHECK(recall_at_k(std::vector<std::string>{"g1", "d"}, l, 5) == 0.5);
  CHECK(recall_at_k(top, l, 10) == 1.0);
  CHECK(recall_at_k({}, l, 10) == 0.0);
  try {
    recall_at_k(top, labels({{"d", Label::Decoy}}), 3);
    FAIL("expected NoGoldLabels");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoGoldLabels);
  }
}

TEST_CASE("generator parameter checks") {
  CHECK_THROWS_AS(generate_synthetic_corpus(1, 1, 1), Error);
  CHECK_THROWS_AS(generate_synthetic_corpus(1, 2, 0), Error);
  CHECK_THROWS_AS(generate_synthetic_corpus(1, 2, 25), Error);
  const auto minimal = generate_synthetic_corpus(1, 2, 1);
  CHECK(minimal.corpus.documents.size() == 2);
  CHECK(minimal.queries.size() == 1);
}

TEST_CASE("generator is deterministic in the seed") {
  const auto a = generate_synthetic_corpus(7, 6, 4);
  const auto b = generate_synthetic_corpus(7, 6, 4);
  const auto c = generate_synthetic_corpus(8, 6, 4);
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) CHECK(a.files[i].text == b.files[i].text);
  CHECK(a.labels == b.labels);
  CHECK(a.corpus.segments == b.corpus.segments);
  bool differs = false;
  for (std::size_t i = 0; i < a.files.size(); ++i) differs |= a.files[i].text != c.files[i].text;
  CHECK(differs);
}

TEST_CASE("construction checks over many seeds") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto lc = generate_synthetic_corpus(seed, 2 + seed % 9, 1 + seed % 24);
    std::set<std::string> all_metric_terms;
    for (const auto& q : lc.queries) {
      for (const auto& t : content_terms(q.query.query)) all_metric_terms.insert(t);
    }
    for (const auto& q : lc.queries) {
      const auto terms = content_terms(q.query.query);
      std::size_t gold = 0, decoy = 0;
      for (const auto& seg : lc.corpus.segments) {
        const auto label = lc.label(q.query_id, seg.segment_id);
        const auto tokens = tokenize(seg.text);
        const bool shares = std::any_of(terms.begin(), terms.end(), [&](const std::string& t) {
          return std::find(tokens.begin(), tokens.end(), t) != tokens.end();
        });
        if (label == Label::Gold) {
          ++gold;
          CHECK(shares);
          CHECK(contains_digit(seg.text));
        } else if (label == Label::Decoy) {
          ++decoy;
          CHECK(shares);
          CHECK_FALSE(contains_digit(seg.text));
          CHECK(seg.kind == SegmentKind::Narrative);
        }
      }
      CHECK(gold >= 1);
      CHECK(decoy >= 1);
    }
    // Segments labeled for no query never mention any metric term.
    for (const auto& seg : lc.corpus.segments) {
      bool labeled = false;
      for (const auto& q : lc.queries) labeled |= lc.label(q.query_id, seg.segment_id) != Label::Neutral;
      if (labeled || seg.kind == SegmentKind::Table) continue;
      for (const auto& t : tokenize(seg.text)) CHECK_FALSE(all_metric_terms.contains(t));
    }
  }
}

TEST_CASE("written corpus re-ingests to the same segments") {
  testing::TempDir dir;
  const auto lc = generate_synthetic_corpus(3, 4, 3);
  write_corpus(lc, dir.path());
  const auto report = load_corpus_directory(dir.path());
  CHECK(report.failures.empty());
  CHECK(report.corpus.segments == lc.corpus.segments);
}

TEST_CASE("benchmark report shape and determinism") {
  const auto lc = generate_synthetic_corpus(11, 5, 3);
  const auto a = run_benchmark(lc, mock_config(), kKs);
  const auto b = run_benchmark(lc, mock_config(), kKs);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(a.ks == kKs);
  REQUIRE(a.systems.size() == 3);
  CHECK(a.failures.empty());
  for (auto sys : {BenchSystem::DenseOnly, BenchSystem::HybridOnly, BenchSystem::FullPipeline}) {
    const auto& s = a.scores(sys);
    CHECK(s.per_query.size() == 3);
    for (auto k : kKs) {
      CHECK(s.mean_precision.at(k) >= 0.0);
      CHECK(s.mean_precision.at(k) <= 1.0);
      CHECK(s.mean_recall.at(k) >= 0.0);
      CHECK(s.mean_recall.at(k) <= 1.0);
    }
    for (const auto& q : s.per_query) {
      CHECK(q.recall.at(1) <= q.recall.at(5));
      CHECK(q.recall.at(5) <= q.recall.at(10));
    }
  }
  const auto text = render_report(a);
  CHECK(text.find("DenseOnly") != std::string::npos);
  CHECK(text.find("FullPipeline") != std::string::npos);
  CHECK(text.find("P@5") != std::string::npos);
  CHECK_THROWS_AS(run_benchmark(lc, mock_config(), std::vector<std::size_t>{}), Error);
  CHECK_THROWS_AS(run_benchmark(lc, mock_config(), std::vector<std::size_t>{0}), Error);
}

TEST_CASE("single query: means equal per-query values") {
  const auto lc = generate_synthetic_corpus(5, 3, 1);
  const auto r = run_benchmark(lc, mock_config(), kKs);
  for (const auto& s : r.systems) {
    for (auto k : kKs) {
      CHECK(s.mean_precision.at(k) == s.per_query[0].precision.at(k));
      CHECK(s.mean_recall.at(k) == s.per_query[0].recall.at(k));
    }
  }
}

TEST_CASE("gap property: the full pipeline never trails the dense baseline at 5") {
  for (std::uint64_t seed = 100; seed < 115; ++seed) {
    const auto lc = generate_synthetic_corpus(seed, 4 + seed % 10, 1 + seed % 12);
    const auto r = run_benchmark(lc, mock_config(), kKs);
    const auto& dense = r.scores(BenchSystem::DenseOnly);
    const auto& full = r.scores(BenchSystem::FullPipeline);
    for (std::size_t i = 0; i < dense.per_query.size(); ++i) {
      const auto& q = dense.per_query[i];
      bool decoy_in_top5 = false;
      for (std::size_t j = 0; j < std::min<std::size_t>(5, q.results.size()); ++j) {
        decoy_in_top5 |= lc.label(q.query_id, q.results[j]) == Label::Decoy;
      }
      CHECK(full.per_query[i].precision.at(5) >= q.precision.at(5));
      if (decoy_in_top5) CHECK(full.per_query[i].precision.at(5) > q.precision.at(5));
    }
  }
}

TEST_CASE("hybrid ranking") {
  const std::vector<ScoredCandidate> c0 = {
      {"a", 2.0, 0.1, Provenance::Both}, {"b", 4.0, std::nullopt, Provenance::Keyword},
      {"c", std::nullopt, 0.9, Provenance::Embed}, {"d", 3.0, 0.2, Provenance::Both}};
  CHECK(hybrid_ranking(c0) == std::vector<std::string>{"b", "c", "d", "a"});
}

TEST_CASE("failing pipeline queries are recorded, not fatal") {
  const auto lc = generate_synthetic_corpus(2, 3, 2);
  PipelineConfig cfg;
  cfg.judge.base_url = "http://127.0.0.1:1";
  cfg.judge.max_retries = 0;
  cfg.judge.timeout = std::chrono::milliseconds(200);
  const auto r = run_benchmark(lc, cfg, kKs);
  CHECK(r.failures.size() == 2);
  for (const auto& q : r.scores(BenchSystem::FullPipeline).per_query) CHECK(q.precision.at(5) == 0.0);
}
