#include "utilrank/cli.hpp"

#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "utilrank/config.hpp"
#include "utilrank/corpus.hpp"
#include "utilrank/error.hpp"
#include "utilrank/evalbench.hpp"
#include "utilrank/pipeline.hpp"
#include "utilrank/service.hpp"

namespace utilrank {
namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ModelUnavailable:
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::MalformedVerdict:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::StoreUnavailable:
    case ErrorCode::CorruptRecord:
      return kExitSystem;
    default:
      return kExitUser;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidParams, "cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Flags shared by every command that builds a PipelineConfig. Values are
// applied only when given, after the config file and environment.
struct PipelineFlags {
  std::string config_path;
  std::size_t top_k = 0;
  double threshold = 0.0;
  std::string judge_mode;
  std::size_t parallelism = 0;
  bool mock_judge = false;
  std::string judge_url, judge_model, controller_url, controller_model, embed_url, embed_model;
  int timeout_ms = 0;
  int max_retries = 0;
  std::string runs;
  std::vector<CLI::Option*> given;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool with_query_flags) {
    app->add_option("--config", config_path, "key = value configuration file");
    if (with_query_flags) {
      opts["top-k"] = app->add_option("--top-k", top_k, "candidates per retriever")->check(CLI::PositiveNumber);
      opts["threshold"] = app->add_option("--threshold", threshold, "utility threshold in [0, 1]");
      opts["judge-mode"] =
          app->add_option("--judge-mode", judge_mode, "single or staged")->check(CLI::IsMember({"single", "staged"}));
      opts["parallelism"] =
          app->add_option("--parallelism", parallelism, "concurrent judge calls")->check(CLI::PositiveNumber);
      app->add_flag("--mock-judge", mock_judge, "use the deterministic offline judge");
      opts["judge-url"] = app->add_option("--judge-url", judge_url, "judge endpoint base URL");
      opts["judge-model"] = app->add_option("--judge-model", judge_model, "judge model name");
      opts["controller-url"] = app->add_option("--controller-url", controller_url, "controller endpoint base URL");
      opts["controller-model"] = app->add_option("--controller-model", controller_model, "controller model name");
      opts["timeout-ms"] = app->add_option("--timeout-ms", timeout_ms, "endpoint timeout");
      opts["max-retries"] = app->add_option("--max-retries", max_retries, "endpoint retries");
      opts["runs"] = app->add_option("--runs", runs, "run store directory");
    }
    opts["embed-url"] = app->add_option("--embed-url", embed_url, "embedding endpoint base URL");
    opts["embed-model"] = app->add_option("--embed-model", embed_model, "embedding model name");
  }

  bool has(const std::string& name) const {
    const auto it = opts.find(name);
    return it != opts.end() && it->second->count() > 0;
  }

  PipelineConfig resolve() const {
    PipelineConfig cfg;
    cfg.judge.model_name = "judge";
    cfg.controller.model_name = "controller";
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    apply_environment(cfg);
    if (has("top-k")) cfg.top_k = top_k;
    if (has("threshold")) cfg.u_threshold = threshold;
    if (has("judge-mode")) cfg.judge_mode = judge_mode == "staged" ? JudgeMode::Staged : JudgeMode::Single;
    if (has("parallelism")) cfg.parallelism = parallelism;
    if (has("judge-url")) cfg.judge.base_url = judge_url;
    if (has("judge-model")) cfg.judge.model_name = judge_model;
    if (has("controller-url")) cfg.controller.base_url = controller_url;
    if (has("controller-model")) cfg.controller.model_name = controller_model;
    if (has("embed-url")) cfg.embedding.base_url = embed_url;
    if (has("embed-model")) cfg.embedding.model_name = embed_model;
    for (auto* ep : {&cfg.judge, &cfg.controller}) {
      if (has("timeout-ms")) ep->timeout = std::chrono::milliseconds(timeout_ms);
      if (has("max-retries")) ep->max_retries = max_retries;
    }
    if (has("runs")) cfg.run_store_path = runs;
    if (mock_judge) {
      cfg.judge_mode = JudgeMode::Single;
      cfg.judge.base_url = "mock";
    }
    return cfg;
  }
};

void require_judge(const PipelineConfig& cfg) {
  if (cfg.judge.base_url.empty()) {
    throw Error(ErrorCode::InvalidConfig,
                "no judge endpoint: pass --judge-url, set UTILRANK_JUDGE_URL, or use --mock-judge");
  }
}

struct Loaded {
  std::shared_ptr<const IndexedCorpus> corpus;
  PipelineServices services;
};

Loaded load_index(const std::string& dir, const PipelineConfig& cfg) {
  Loaded out;
  out.corpus = std::make_shared<const IndexedCorpus>(IndexedCorpus::load(dir));
  out.services = make_services(cfg, out.corpus->dense().dimension);
  return out;
}

int cmd_ingest(const std::string& corpus_dir, const std::string& out_dir, const PipelineFlags& flags,
               std::ostream& out, std::ostream& err) {
  const auto cfg = flags.resolve();
  auto report = load_corpus_directory(corpus_dir);
  for (const auto& f : report.failures) err << "warning: skipped " << f.path << ": " << f.message << '\n';
  if (report.corpus.documents.empty()) {
    err << "error: no documents ingested from " << corpus_dir << '\n';
    return kExitUser;
  }
  std::size_t tables = 0;
  std::size_t complex = 0;
  for (const auto& s : report.corpus.segments) {
    if (s.kind != SegmentKind::Table) continue;
    ++tables;
    if (s.table && s.table->complexity == TableComplexity::Complex) ++complex;
  }
  const std::size_t docs = report.corpus.documents.size();
  const std::size_t segments = report.corpus.segments.size();
  const auto services = make_services(cfg);
  const auto indexed = IndexedCorpus::build(std::move(report.corpus), *services.embedder);
  indexed.save(out_dir);
  out << "ingested " << docs << " documents, " << segments << " segments (" << tables << " tables, " << complex
      << " complex)\n";
  return kExitOk;
}

int cmd_query(const std::string& index_dir, const QueryStatement& q, const PipelineFlags& flags, std::ostream& out,
              std::ostream& err) {
  auto cfg = flags.resolve();
  validate_threshold(cfg.u_threshold);
  require_judge(cfg);
  if (cfg.run_store_path.empty()) cfg.run_store_path = (std::filesystem::path(index_dir) / "runs").string();
  cfg.corpus_path = index_dir;
  const auto loaded = load_index(index_dir, cfg);
  const auto record = run_query(*loaded.corpus, q, cfg, *loaded.services.embedder, *loaded.services.judge);
  persist_run(record, cfg.run_store_path);
  out << result_document(record).dump(2) << '\n';
  if (record.status != RunStatus::Succeeded) {
    for (const auto& e : record.errors) err << "error: " << e.stage << ' ' << e.segment_id << ": " << e.message << '\n';
    return kExitSystem;
  }
  for (const auto& e : record.errors) err << "warning: " << e.stage << ' ' << e.segment_id << ": " << e.message << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Utility-grounded evidence retrieval", "utilrank"};
  app.require_subcommand(1);

  std::string corpus_dir, out_dir;
  PipelineFlags ingest_flags;
  auto* ingest = app.add_subcommand("ingest", "segment a markdown corpus and build both indexes");
  ingest->add_option("--corpus", corpus_dir, "directory of .md files")->required();
  ingest->add_option("--out", out_dir, "index output directory")->required();
  ingest_flags.add(ingest, false);

  std::string index_dir, query_text, statement_file, statement_text;
  PipelineFlags query_flags;
  auto* query = app.add_subcommand("query", "run the pipeline for one query");
  query->add_option("--index", index_dir, "index directory written by ingest")->required();
  query->add_option("--query", query_text, "query text")->required();
  auto* stmt_file = query->add_option("--statement", statement_file, "file holding the financial statement");
  query->add_option("--statement-text", statement_text, "financial statement inline")->excludes(stmt_file);
  query_flags.add(query, true);

  std::uint64_t seed = 7;
  std::size_t n_docs = 20, n_queries = 10;
  std::string k_list = "1,5,10", report_path = "bench_report.json", write_dir;
  PipelineFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "run the synthetic benchmark");
  bench->add_option("--seed", seed, "generator seed");
  bench->add_option("--docs", n_docs, "number of documents");
  bench->add_option("--queries", n_queries, "number of queries");
  bench->add_option("--k", k_list, "comma-separated cutoffs");
  bench->add_option("--out", report_path, "report JSON path");
  bench->add_option("--write-corpus", write_dir, "also write the generated corpus here");
  bench_flags.add(bench, true);

  std::string serve_index, host = "127.0.0.1";
  int port = 8080;
  PipelineFlags serve_flags;
  auto* serve = app.add_subcommand("serve", "serve POST /query over HTTP");
  serve->add_option("--index", serve_index, "index directory written by ingest")->required();
  serve->add_option("--host", host, "bind address");
  serve->add_option("--port", port, "bind port")->check(CLI::Range(1, 65535));
  serve_flags.add(serve, true);

  std::string show_runs, show_id;
  auto* show = app.add_subcommand("show-run", "print a persisted run record");
  show->add_option("--runs", show_runs, "run store directory")->required();
  show->add_option("--id", show_id, "run id")->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUser;
  }

  try {
    if (*ingest) return cmd_ingest(corpus_dir, out_dir, ingest_flags, out, err);
    if (*query) {
      QueryStatement q{query_text, statement_text};
      if (!statement_file.empty()) q.financial_statement = read_file(statement_file);
      return cmd_query(index_dir, q, query_flags, out, err);
    }
    if (*bench) {
      std::vector<std::size_t> ks;
      std::stringstream ss(k_list);
      std::string item;
      while (std::getline(ss, item, ',')) {
        try {
          std::size_t used = 0;
          const long long k = std::stoll(item, &used);
          if (used != item.size() || k < 1) throw std::invalid_argument(item);
          ks.push_back(static_cast<std::size_t>(k));
        } catch (const std::logic_error&) {
          throw Error(ErrorCode::InvalidParams, "bad k value '" + item + "'");
        }
      }
      auto cfg = bench_flags.resolve();
      if (cfg.judge.base_url.empty()) cfg.judge.base_url = "mock";
      const auto corpus = generate_synthetic_corpus(seed, n_docs, n_queries);
      if (!write_dir.empty()) write_corpus(corpus, write_dir);
      const auto report = run_benchmark(corpus, cfg, ks);
      std::ofstream file(report_path, std::ios::binary | std::ios::trunc);
      file << report_to_json(report).dump(2) << '\n';
      if (!file) throw Error(ErrorCode::StoreUnavailable, "cannot write " + report_path);
      out << render_report(report);
      return kExitOk;
    }
    if (*serve) {
      auto cfg = serve_flags.resolve();
      require_judge(cfg);
      if (cfg.run_store_path.empty()) cfg.run_store_path = (std::filesystem::path(serve_index) / "runs").string();
      cfg.corpus_path = serve_index;
      cfg.validate();
      auto loaded = load_index(serve_index, cfg);
      QueryService service(loaded.corpus, cfg, loaded.services);
      out << "serving " << loaded.corpus->corpus().segments.size() << " segments on http://" << host << ':' << port
          << std::endl;
      if (!service.listen(host, port)) {
        err << "error: cannot bind " << host << ':' << port << '\n';
        return kExitSystem;
      }
      return kExitOk;
    }
    if (*show) {
      out << Json(load_run(show_runs, show_id)).dump(2) << '\n';
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitSystem;
  }
  return kExitUser;
}

}  // namespace utilrank
