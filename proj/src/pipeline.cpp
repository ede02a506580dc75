#include "utilrank/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "utilrank/error.hpp"
#include "utilrank/text.hpp"

namespace utilrank {
namespace fs = std::filesystem;

void PipelineConfig::validate() const {
  if (top_k < 1) throw Error(ErrorCode::InvalidConfig, "top_k must be at least 1");
  validate_threshold(u_threshold);
  if (parallelism < 1) throw Error(ErrorCode::InvalidConfig, "parallelism must be at least 1");
  validate_endpoint(controller);
  validate_endpoint(judge);
  validate_endpoint(embedding);
  if (judge_mode == JudgeMode::Staged && controller.base_url.empty()) {
    throw Error(ErrorCode::InvalidConfig, "staged judge mode needs a controller endpoint");
  }
}

void to_json(Json& j, const PipelineConfig& v) {
  j = Json{{"top_k", v.top_k},
           {"u_threshold", v.u_threshold},
           {"judge_mode", v.judge_mode},
           {"controller", v.controller},
           {"judge", v.judge},
           {"embedding", v.embedding},
           {"parallelism", v.parallelism},
           {"corpus_path", v.corpus_path},
           {"run_store_path", v.run_store_path}};
}

void from_json(const Json& j, PipelineConfig& v) {
  j.at("top_k").get_to(v.top_k);
  j.at("u_threshold").get_to(v.u_threshold);
  j.at("judge_mode").get_to(v.judge_mode);
  j.at("controller").get_to(v.controller);
  j.at("judge").get_to(v.judge);
  j.at("embedding").get_to(v.embedding);
  j.at("parallelism").get_to(v.parallelism);
  j.at("corpus_path").get_to(v.corpus_path);
  j.at("run_store_path").get_to(v.run_store_path);
}

void to_json(Json& j, const StageError& v) {
  j = Json{{"stage", v.stage}, {"segment_id", v.segment_id}, {"message", v.message}};
}
void from_json(const Json& j, StageError& v) {
  j.at("stage").get_to(v.stage);
  j.at("segment_id").get_to(v.segment_id);
  j.at("message").get_to(v.message);
}

void to_json(Json& j, const RunRecord& v) {
  j = Json{{"run_id", v.run_id},     {"timestamp", v.timestamp}, {"status", v.status}, {"query", v.query},
           {"config", v.config},     {"c0", v.c0},               {"verdicts", v.verdicts}, {"c1_ids", v.c1_ids},
           {"j1_ids", v.j1_ids},     {"evidence", v.evidence},   {"errors", v.errors}};
}
void from_json(const Json& j, RunRecord& v) {
  j.at("run_id").get_to(v.run_id);
  j.at("timestamp").get_to(v.timestamp);
  j.at("status").get_to(v.status);
  j.at("query").get_to(v.query);
  j.at("config").get_to(v.config);
  j.at("c0").get_to(v.c0);
  j.at("verdicts").get_to(v.verdicts);
  j.at("c1_ids").get_to(v.c1_ids);
  j.at("j1_ids").get_to(v.j1_ids);
  j.at("evidence").get_to(v.evidence);
  j.at("errors").get_to(v.errors);
}

PipelineServices make_services(const PipelineConfig& config, int expected_dimension) {
  PipelineServices services;
  if (config.embedding.base_url.empty() || config.embedding.base_url == "builtin") {
    services.embedder = std::make_shared<HashEmbedder>(expected_dimension > 0 ? expected_dimension
                                                                              : HashEmbedder::kDefaultDimension);
  } else {
    services.embedder = std::make_shared<RemoteEmbedder>(config.embedding, expected_dimension);
  }
  if (config.judge_mode == JudgeMode::Single && is_mock_endpoint(config.judge)) {
    services.judge = std::make_shared<MockJudge>();
  } else {
    services.judge = std::make_shared<EndpointJudge>(config.judge_mode, config.controller, config.judge);
  }
  return services;
}

RunRecord run_query(const IndexedCorpus& corpus, const QueryStatement& query, const PipelineConfig& config,
                    const EmbeddingProvider& embedder, const Judge& judge) {
  if (trim(query.query).empty()) throw Error(ErrorCode::InvalidParams, "query must not be empty");
  config.validate();

  RunRecord record;
  record.run_id = generate_run_id();
  record.timestamp = utc_timestamp();
  record.query = query;
  record.config = config;

  try {
    record.c0 = hybrid_retrieve(corpus.lexical(), corpus.dense(), embedder, query.query, config.top_k);
  } catch (const Error& e) {
    record.status = RunStatus::Failed;
    record.errors.push_back(StageError{"retrieve", "", e.what()});
    return record;
  }

  const std::size_t n = record.c0.size();
  std::vector<std::optional<JudgeVerdict>> verdicts(n);
  std::vector<std::string> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const Segment& seg = corpus.segment(record.c0[i].segment_id);
        auto verdict = judge.judge(query, seg, metadata_for(seg, corpus.document_title(seg.doc_id)));
        verdict.segment_id = seg.segment_id;
        verdicts[i] = std::move(verdict);
      } catch (const std::exception& e) {
        failures[i] = e.what();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t threads = std::min(config.parallelism, n);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  std::map<std::string, JudgeVerdict> judged;
  std::vector<ScoredCandidate> judged_candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (verdicts[i]) {
      record.verdicts.push_back(*verdicts[i]);
      judged.emplace(record.c0[i].segment_id, *verdicts[i]);
      judged_candidates.push_back(record.c0[i]);
    } else {
      // Fail closed: an unjudged passage never reaches C1.
      record.errors.push_back(StageError{"judge", record.c0[i].segment_id, failures[i]});
    }
  }
  if (n > 0 && judged.empty()) {
    record.status = RunStatus::Failed;
    return record;
  }

  const auto c1 = filter_relevant_supported(make_c0(query, std::move(judged_candidates)), judged);
  const auto j1 = rank_by_utility(c1, config.u_threshold);
  record.c1_ids = c1.ids();
  record.j1_ids = j1.ids();
  for (const auto& entry : j1.entries) {
    const Segment& seg = corpus.segment(entry.candidate.segment_id);
    auto item = extract_evidence(seg, query, corpus.document_title(seg.doc_id));
    item.utility = entry.verdict->utility;
    record.evidence.push_back(std::move(item));
  }
  return record;
}

Json result_document(const RunRecord& record) {
  Json evidence = Json::array();
  for (std::size_t i = 0; i < record.evidence.size(); ++i) {
    Json item = record.evidence[i];
    item["rank"] = i + 1;
    evidence.push_back(std::move(item));
  }
  return Json{{"run_id", record.run_id},
              {"query", record.query},
              {"status", record.status},
              {"stages", {{"c0", record.c0.size()}, {"c1", record.c1_ids.size()}, {"j1", record.j1_ids.size()}}},
              {"evidence", std::move(evidence)},
              {"errors", record.errors}};
}

std::vector<std::string> audit_violations(const RunRecord& record) {
  std::vector<std::string> problems;
  std::set<std::string> c0;
  for (const auto& c : record.c0) c0.insert(c.segment_id);
  const std::set<std::string> c1(record.c1_ids.begin(), record.c1_ids.end());
  for (const auto& id : record.c1_ids) {
    if (!c0.contains(id)) problems.push_back("C1 member " + id + " is not in C0");
  }
  for (const auto& id : record.j1_ids) {
    if (!c1.contains(id)) problems.push_back("J1 member " + id + " is not in C1");
  }
  std::set<std::string> explained;
  for (const auto& v : record.verdicts) explained.insert(v.segment_id);
  for (const auto& e : record.errors) explained.insert(e.segment_id);
  const bool stage_wide_failure = std::any_of(record.errors.begin(), record.errors.end(),
                                              [](const StageError& e) { return e.segment_id.empty(); });
  if (!stage_wide_failure) {
    for (const auto& id : c0) {
      if (!explained.contains(id)) problems.push_back("C0 member " + id + " has neither verdict nor error");
    }
  }
  if (record.evidence.size() != record.j1_ids.size()) {
    problems.push_back("evidence count differs from |J1|");
  } else {
    for (std::size_t i = 0; i < record.evidence.size(); ++i) {
      if (record.evidence[i].segment_id != record.j1_ids[i]) problems.push_back("evidence out of J1 order at " + std::to_string(i));
    }
  }
  return problems;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  const auto millis =
      std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(millis));
  return buf;
}

std::string generate_run_id() {
  thread_local std::mt19937_64 rng{std::random_device{}() ^
                                   static_cast<std::uint64_t>(std::hash<std::thread::id>{}(std::this_thread::get_id()))};
  const auto now = std::chrono::system_clock::now();
  const auto secs = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[96];
  std::snprintf(buf, sizeof buf, "run-%04d%02d%02dT%02d%02d%02dZ-%012llx", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<unsigned long long>(rng() & 0xFFFFFFFFFFFFULL));
  return buf;
}

// ---------------------------------------------------------------------------
// Run store

namespace {

std::mutex& index_mutex() {
  static std::mutex m;
  return m;
}

bool valid_run_id(const std::string& id) {
  return !id.empty() && id.size() <= 128 && id.front() != '.' &&
         std::all_of(id.begin(), id.end(), [](char c) {
           return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
         });
}

}  // namespace

RunStore::RunStore(fs::path root) : root_(std::move(root)) {}

std::string RunStore::persist(const RunRecord& record) const {
  if (!valid_run_id(record.run_id)) throw Error(ErrorCode::StoreUnavailable, "invalid run id '" + record.run_id + "'");
  const fs::path runs = root_ / "runs";
  std::error_code ec;
  fs::create_directories(runs, ec);
  if (ec || !fs::is_directory(runs)) throw Error(ErrorCode::StoreUnavailable, "cannot create " + runs.string());

  const fs::path target = runs / (record.run_id + ".json");
  const fs::path staging = runs / (record.run_id + ".json.tmp");
  if (fs::exists(target)) throw Error(ErrorCode::StoreUnavailable, "run " + record.run_id + " already exists");
  {
    std::ofstream out(staging, std::ios::binary | std::ios::trunc);
    out << Json(record).dump(2) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::StoreUnavailable, "cannot write " + staging.string());
  }
  fs::rename(staging, target, ec);
  if (ec) throw Error(ErrorCode::StoreUnavailable, "cannot finalize " + target.string() + ": " + ec.message());

  const Json entry = {{"run_id", record.run_id},
                      {"timestamp", record.timestamp},
                      {"status", record.status},
                      {"query", record.query.query}};
  std::lock_guard lock(index_mutex());
  std::ofstream index(root_ / "index.jsonl", std::ios::binary | std::ios::app);
  index << entry.dump() << '\n';
  if (!index) throw Error(ErrorCode::StoreUnavailable, "cannot append to run index");
  return record.run_id;
}

RunRecord RunStore::load(const std::string& run_id) const {
  if (!valid_run_id(run_id)) throw Error(ErrorCode::RunNotFound, "no run '" + run_id + "'");
  const fs::path path = root_ / "runs" / (run_id + ".json");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::RunNotFound, "no run '" + run_id + "' in " + root_.string());
  try {
    return Json::parse(in).get<RunRecord>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::CorruptRecord, path.string() + ": " + e.what());
  }
}

std::vector<std::string> RunStore::list() const {
  std::vector<std::string> ids;
  std::lock_guard lock(index_mutex());
  std::ifstream in(root_ / "index.jsonl", std::ios::binary);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto entry = Json::parse(line, nullptr, false);
    if (!entry.is_discarded() && entry.contains("run_id")) ids.push_back(entry["run_id"].get<std::string>());
  }
  return ids;
}

std::string persist_run(const RunRecord& record, const fs::path& store_path) { return RunStore(store_path).persist(record); }

RunRecord load_run(const fs::path& store_path, const std::string& run_id) { return RunStore(store_path).load(run_id); }

}  // namespace utilrank
