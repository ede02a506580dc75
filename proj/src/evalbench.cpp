#include "utilrank/evalbench.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "utilrank/error.hpp"
#include "utilrank/text.hpp"

namespace utilrank {
namespace {

constexpr std::array<std::string_view, 24> kMetrics = {
    "net leverage ratio", "interest coverage",   "operating cash flow", "gross margin",
    "working capital",    "revenue growth",      "capex intensity",     "dividend payout",
    "inventory turnover", "receivable days",     "adjusted ebitda",     "tax provision",
    "goodwill impairment", "debt maturity",      "liquidity headroom",  "return on equity",
    "funding spread",     "supplier credit",     "order backlog",       "lease liabilities",
    "pension deficit",    "covenant compliance", "share buyback",       "hedging reserve",
};

constexpr std::array<std::string_view, 6> kGoldHeadings = {
    "Results overview", "Financial review", "Performance summary", "Year in review", "Key developments",
    "Trading update"};

constexpr std::array<std::string_view, 5> kDecoyHeadings = {"Risk management", "Governance", "Strategy",
                                                             "Policy framework", "Outlook"};

constexpr std::array<std::string_view, 6> kNeutralHeadings = {"Corporate information", "Board activities",
                                                              "People and culture",    "Sustainability",
                                                              "Technology",            "Operations"};

constexpr std::array<std::string_view, 8> kFiller = {
    "The group operates across several regions and serves a broad customer base.",
    "The board met regularly during the year and reviewed strategy.",
    "Employees completed mandatory training on conduct and ethics.",
    "The company continued to invest in digital systems and data security.",
    "Sustainability reporting follows the recognised voluntary framework.",
    "Offices were consolidated into fewer locations to simplify operations.",
    "The registered office address is unchanged from the prior year.",
    "Customer satisfaction surveys were conducted in each major market.",
};

// {P} is the capitalized metric, {p} the lowercase metric, {a}/{b} the
// current and prior figures.
constexpr std::array<std::string_view, 3> kGoldTemplates = {
    "{P}: {a} (FY2023) versus {b} (FY2022).",
    "{P} was {a} in FY2023 against {b} in FY2022.",
    "For FY2023 the group reported {p} of {a}, compared with {b} in FY2022.",
};

constexpr std::array<std::string_view, 4> kDecoyTemplates = {
    "{P} remains a key focus for management. The board reviews {p} regularly and considers {p} in its planning.",
    "Our approach to {p} is described in the policy framework. {P} is monitored against internal guidelines.",
    "{P} is defined in the glossary. Readers should consider {p} alongside other measures.",
    "Management discusses {p} with the audit committee and believes {p} is appropriately governed.",
};

enum class SectionKind { Gold, Decoy, Neutral, PipeTable, HtmlTable };

struct PlannedSection {
  SectionKind kind = SectionKind::Neutral;
  std::string heading;
  std::string body;
  std::vector<std::size_t> queries;  // queries this section is labeled for
};

struct QueryPlan {
  std::string metric;
  int current = 0;
  int prior = 0;
};

class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  // Modulo draws keep the stream identical across standard libraries.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 rng_;
};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string fill(std::string_view tmpl, const QueryPlan& q) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && tmpl[i + 2] == '}') {
      switch (tmpl[i + 1]) {
        case 'P': out += capitalize(q.metric); break;
        case 'p': out += q.metric; break;
        case 'a': out += std::to_string(q.current); break;
        case 'b': out += std::to_string(q.prior); break;
        default: out.append(tmpl.substr(i, 3));
      }
      i += 2;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

std::vector<std::size_t> pick_queries(Draw& draw, std::size_t n_queries, std::size_t count) {
  std::vector<std::size_t> all(n_queries);
  for (std::size_t i = 0; i < n_queries; ++i) all[i] = i;
  draw.shuffle(all);
  all.resize(std::min(count, n_queries));
  std::sort(all.begin(), all.end());
  return all;
}

std::string pipe_table(const std::vector<std::size_t>& rows, const std::vector<QueryPlan>& plans) {
  std::string out = "| Metric | FY2023 | FY2022 |\n|---|---:|---:|\n";
  for (auto q : rows) {
    out += "| " + capitalize(plans[q].metric) + " | " + std::to_string(plans[q].current) + " | " +
           std::to_string(plans[q].prior) + " |\n";
  }
  out.pop_back();
  return out;
}

std::string html_table(const std::vector<std::size_t>& rows, const std::vector<QueryPlan>& plans) {
  std::string out =
      "<table>\n"
      "<tr><th rowspan=\"2\">Metric</th><th colspan=\"2\">Fiscal year</th></tr>\n"
      "<tr><th>FY2023</th><th>FY2022</th></tr>\n";
  for (auto q : rows) {
    out += "<tr><td>" + capitalize(plans[q].metric) + "</td><td>" + std::to_string(plans[q].current) +
           "</td><td>" + std::to_string(plans[q].prior) + "</td></tr>\n";
  }
  out += "</table>";
  return out;
}

std::string two_digits(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02zu", n);
  return buf;
}

}  // namespace

Label LabeledCorpus::label(const std::string& query_id, const std::string& segment_id) const {
  const auto it = labels.find({query_id, segment_id});
  return it == labels.end() ? Label::Neutral : it->second;
}

std::map<std::string, Label> LabeledCorpus::labels_for(const std::string& query_id) const {
  std::map<std::string, Label> out;
  for (const auto& seg : corpus.segments) out[seg.segment_id] = label(query_id, seg.segment_id);
  return out;
}

LabeledCorpus generate_synthetic_corpus(std::uint64_t seed, std::size_t n_docs, std::size_t n_queries) {
  if (n_docs < 2) throw Error(ErrorCode::InvalidParams, "n_docs must be at least 2");
  if (n_queries < 1 || n_queries > kMaxBenchQueries) {
    throw Error(ErrorCode::InvalidParams, "n_queries must be between 1 and " + std::to_string(kMaxBenchQueries));
  }
  Draw draw(seed);

  std::vector<std::size_t> metric_order(kMetrics.size());
  for (std::size_t i = 0; i < metric_order.size(); ++i) metric_order[i] = i;
  draw.shuffle(metric_order);

  LabeledCorpus out;
  out.seed = seed;
  std::vector<QueryPlan> plans;
  for (std::size_t q = 0; q < n_queries; ++q) {
    QueryPlan plan;
    plan.metric = std::string(kMetrics[metric_order[q]]);
    plan.current = 100 + static_cast<int>(draw.below(900));
    plan.prior = 100 + static_cast<int>(draw.below(899));
    if (plan.prior >= plan.current) ++plan.prior;
    plans.push_back(plan);
    out.queries.push_back(BenchQuery{
        "q" + two_digits(q + 1),
        QueryStatement{plan.metric, "FY2023 " + std::to_string(plan.current) + " FY2022 " + std::to_string(plan.prior)}});
  }

  std::vector<std::vector<PlannedSection>> docs(n_docs);
  for (std::size_t q = 0; q < n_queries; ++q) {
    const std::size_t n_gold = 2 + draw.below(2);
    for (std::size_t g = 0; g < n_gold; ++g) {
      const auto tmpl = g == 0 ? kGoldTemplates[0] : kGoldTemplates[draw.below(kGoldTemplates.size())];
      docs[draw.below(n_docs)].push_back(PlannedSection{
          SectionKind::Gold, std::string(kGoldHeadings[draw.below(kGoldHeadings.size())]), fill(tmpl, plans[q]), {q}});
    }
    for (std::size_t d = 0; d < 3; ++d) {
      const auto tmpl = kDecoyTemplates[draw.below(kDecoyTemplates.size())];
      docs[draw.below(n_docs)].push_back(PlannedSection{SectionKind::Decoy,
                                                        std::string(kDecoyHeadings[draw.below(kDecoyHeadings.size())]),
                                                        fill(tmpl, plans[q]),
                                                        {q}});
    }
  }
  for (std::size_t d = 0; d < n_docs; ++d) {
    const std::size_t n_neutral = 2 + draw.below(3);
    for (std::size_t i = 0; i < n_neutral; ++i) {
      std::string body(kFiller[draw.below(kFiller.size())]);
      body += ' ';
      body += kFiller[draw.below(kFiller.size())];
      docs[d].push_back(PlannedSection{
          SectionKind::Neutral, std::string(kNeutralHeadings[draw.below(kNeutralHeadings.size())]), body, {}});
    }
    if (d % 3 == 0) {
      auto rows = pick_queries(draw, n_queries, 2);
      docs[d].push_back(PlannedSection{SectionKind::PipeTable, "Key figures", pipe_table(rows, plans), rows});
    }
    if (d % 4 == 1) {
      auto rows = pick_queries(draw, n_queries, 2);
      docs[d].push_back(PlannedSection{SectionKind::HtmlTable, "Comparative figures", html_table(rows, plans), rows});
    }
    draw.shuffle(docs[d]);
  }

  for (std::size_t d = 0; d < n_docs; ++d) {
    const std::string doc_id = "issuer-" + two_digits(d + 1);
    const std::string title = "Issuer " + two_digits(d + 1) + " annual report";
    std::string body = "This report covers the financial year ended 31 December 2023.\n\n";
    struct Placed {
      std::size_t start, end;
      const PlannedSection* section;
    };
    std::vector<Placed> placed;
    int page = 1;
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      if (i > 0 && i % 2 == 0) body += "<!-- page: " + std::to_string(++page) + " -->\n\n";
      const auto& s = docs[d][i];
      const std::size_t start = body.size();
      body += "## " + s.heading + "\n\n" + s.body + "\n";
      placed.push_back(Placed{start, body.size(), &s});
      body += "\n";
    }
    const std::string front = "---\ndoc_id: " + doc_id + "\ntitle: " + title + "\nlanguage: en\n---\n";
    const std::string name = doc_id + ".md";
    auto parsed = parse_markdown_file(front + body, name);

    for (const auto& seg : parsed.segments) {
      const auto it = std::find_if(placed.begin(), placed.end(), [&](const Placed& p) {
        return seg.char_span.start >= p.start && seg.char_span.start < p.end;
      });
      if (it == placed.end()) continue;
      const auto& s = *it->section;
      Label label = Label::Neutral;
      switch (s.kind) {
        case SectionKind::Gold: label = Label::Gold; break;
        case SectionKind::Decoy: label = Label::Decoy; break;
        case SectionKind::PipeTable:
        case SectionKind::HtmlTable:
          if (seg.kind == SegmentKind::Table) label = Label::Gold;
          break;
        case SectionKind::Neutral: break;
      }
      if (label == Label::Neutral) continue;
      for (auto q : s.queries) out.labels[{out.queries[q].query_id, seg.segment_id}] = label;
    }
    out.corpus.add(std::move(parsed));
    out.files.push_back(CorpusFile{name, front + body});
  }
  return out;
}

void write_corpus(const LabeledCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::InvalidParams, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& f : corpus.files) {
    std::ofstream out(dir / f.name, std::ios::binary | std::ios::trunc);
    out << f.text;
    if (!out) throw Error(ErrorCode::InvalidParams, "cannot write " + (dir / f.name).string());
  }
}

double precision_at_k(std::span<const std::string> results, const std::map<std::string, Label>& labels,
                      std::size_t k) {
  const std::size_t n = std::min(k, results.size());
  if (n == 0) return 0.0;
  std::size_t gold = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = labels.find(results[i]);
    if (it != labels.end() && it->second == Label::Gold) ++gold;
  }
  return static_cast<double>(gold) / static_cast<double>(n);
}

double recall_at_k(std::span<const std::string> results, const std::map<std::string, Label>& labels, std::size_t k) {
  const auto total = std::count_if(labels.begin(), labels.end(), [](const auto& kv) { return kv.second == Label::Gold; });
  if (total == 0) throw Error(ErrorCode::NoGoldLabels, "query has no gold segments");
  const std::size_t n = std::min(k, results.size());
  std::size_t gold = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = labels.find(results[i]);
    if (it != labels.end() && it->second == Label::Gold) ++gold;
  }
  return static_cast<double>(gold) / static_cast<double>(total);
}

const SystemScores& BenchReport::scores(BenchSystem system) const {
  for (const auto& s : systems) {
    if (s.system == system) return s;
  }
  throw Error(ErrorCode::InvalidParams, "system missing from report");
}

std::vector<std::string> hybrid_ranking(const std::vector<ScoredCandidate>& c0) {
  double lo = 0.0;
  double hi = 0.0;
  bool any = false;
  for (const auto& c : c0) {
    if (!c.lexical_score) continue;
    lo = any ? std::min(lo, *c.lexical_score) : *c.lexical_score;
    hi = any ? std::max(hi, *c.lexical_score) : *c.lexical_score;
    any = true;
  }
  std::vector<std::pair<double, std::string>> scored;
  for (const auto& c : c0) {
    double best = -1.0;
    if (c.lexical_score) best = hi > lo ? (*c.lexical_score - lo) / (hi - lo) : 1.0;
    if (c.dense_score) best = std::max(best, *c.dense_score);
    scored.emplace_back(best, c.segment_id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  std::vector<std::string> ids;
  for (auto& s : scored) ids.push_back(std::move(s.second));
  return ids;
}

BenchReport run_benchmark(const LabeledCorpus& corpus, const PipelineConfig& config, std::span<const std::size_t> ks) {
  return run_benchmark(corpus, config, ks, make_services(config));
}

BenchReport run_benchmark(const LabeledCorpus& corpus, const PipelineConfig& config, std::span<const std::size_t> ks,
                          const PipelineServices& services) {
  if (ks.empty() || std::find(ks.begin(), ks.end(), 0) != ks.end()) {
    throw Error(ErrorCode::InvalidParams, "k values must be positive");
  }
  config.validate();
  BenchReport report;
  report.seed = corpus.seed;
  report.n_docs = corpus.corpus.documents.size();
  report.n_queries = corpus.queries.size();
  report.top_k = config.top_k;
  report.u_threshold = config.u_threshold;
  report.ks.assign(ks.begin(), ks.end());
  std::sort(report.ks.begin(), report.ks.end());
  report.ks.erase(std::unique(report.ks.begin(), report.ks.end()), report.ks.end());
  const std::size_t max_k = report.ks.back();

  const auto indexed = IndexedCorpus::build(corpus.corpus, *services.embedder);
  for (auto system : {BenchSystem::DenseOnly, BenchSystem::HybridOnly, BenchSystem::FullPipeline}) {
    report.systems.push_back(SystemScores{system, {}, {}, {}});
  }

  for (const auto& bq : corpus.queries) {
    const auto labels = corpus.labels_for(bq.query_id);
    std::array<std::vector<std::string>, 3> results;
    try {
      const auto q = embed_text(*services.embedder, bq.query.query);
      for (auto& c : dense_top_k(indexed.dense(), q, max_k)) results[0].push_back(c.segment_id);
    } catch (const Error& e) {
      report.failures.push_back(BenchFailure{bq.query_id, BenchSystem::DenseOnly, e.what()});
    }
    try {
      results[1] = hybrid_ranking(
          hybrid_retrieve(indexed.lexical(), indexed.dense(), *services.embedder, bq.query.query, config.top_k));
    } catch (const Error& e) {
      report.failures.push_back(BenchFailure{bq.query_id, BenchSystem::HybridOnly, e.what()});
    }
    try {
      const auto record = run_query(indexed, bq.query, config, *services.embedder, *services.judge);
      if (record.status == RunStatus::Succeeded) {
        results[2] = record.j1_ids;
      } else {
        report.failures.push_back(BenchFailure{bq.query_id, BenchSystem::FullPipeline,
                                               record.errors.empty() ? "run failed" : record.errors.front().message});
      }
    } catch (const Error& e) {
      report.failures.push_back(BenchFailure{bq.query_id, BenchSystem::FullPipeline, e.what()});
    }

    for (std::size_t s = 0; s < 3; ++s) {
      QueryScores qs;
      qs.query_id = bq.query_id;
      for (auto k : report.ks) {
        qs.precision[k] = precision_at_k(results[s], labels, k);
        qs.recall[k] = recall_at_k(results[s], labels, k);
      }
      if (results[s].size() > max_k) results[s].resize(max_k);
      qs.results = std::move(results[s]);
      report.systems[s].per_query.push_back(std::move(qs));
    }
  }

  for (auto& sys : report.systems) {
    for (auto k : report.ks) {
      double p = 0.0;
      double r = 0.0;
      for (const auto& qs : sys.per_query) {
        p += qs.precision.at(k);
        r += qs.recall.at(k);
      }
      const double n = static_cast<double>(std::max<std::size_t>(sys.per_query.size(), 1));
      sys.mean_precision[k] = p / n;
      sys.mean_recall[k] = r / n;
    }
  }
  return report;
}

Json report_to_json(const BenchReport& report) {
  auto by_k = [](const std::map<std::size_t, double>& m) {
    Json j = Json::object();
    for (const auto& [k, v] : m) j[std::to_string(k)] = v;
    return j;
  };
  Json systems = Json::object();
  for (const auto& sys : report.systems) {
    Json per_query = Json::array();
    for (const auto& qs : sys.per_query) {
      per_query.push_back(Json{{"query_id", qs.query_id},
                               {"precision", by_k(qs.precision)},
                               {"recall", by_k(qs.recall)},
                               {"results", qs.results}});
    }
    systems[Json(sys.system).get<std::string>()] = Json{
        {"mean_precision", by_k(sys.mean_precision)}, {"mean_recall", by_k(sys.mean_recall)}, {"per_query", per_query}};
  }
  Json failures = Json::array();
  for (const auto& f : report.failures) {
    failures.push_back(Json{{"query_id", f.query_id}, {"system", f.system}, {"message", f.message}});
  }
  return Json{{"seed", report.seed},           {"n_docs", report.n_docs}, {"n_queries", report.n_queries},
              {"top_k", report.top_k},         {"u_threshold", report.u_threshold}, {"ks", report.ks},
              {"systems", std::move(systems)}, {"failures", std::move(failures)}};
}

std::string render_report(const BenchReport& report) {
  std::ostringstream out;
  char buf[64];
  out << "seed " << report.seed << ", " << report.n_docs << " documents, " << report.n_queries
      << " queries, top_k " << report.top_k << ", threshold " << report.u_threshold << "\n\n";
  out << "system        ";
  for (auto k : report.ks) {
    std::snprintf(buf, sizeof buf, " %7s", ("P@" + std::to_string(k)).c_str());
    out << buf;
  }
  for (auto k : report.ks) {
    std::snprintf(buf, sizeof buf, " %7s", ("R@" + std::to_string(k)).c_str());
    out << buf;
  }
  out << '\n';
  for (const auto& sys : report.systems) {
    std::snprintf(buf, sizeof buf, "%-14s", Json(sys.system).get<std::string>().c_str());
    out << buf;
    for (auto k : report.ks) {
      std::snprintf(buf, sizeof buf, " %7.3f", sys.mean_precision.at(k));
      out << buf;
    }
    for (auto k : report.ks) {
      std::snprintf(buf, sizeof buf, " %7.3f", sys.mean_recall.at(k));
      out << buf;
    }
    out << '\n';
  }
  if (!report.failures.empty()) out << '\n' << report.failures.size() << " query failures\n";
  return out.str();
}

}  // namespace utilrank
