#include "utilrank/judge.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "utilrank/error.hpp"
#include "utilrank/text.hpp"

namespace utilrank {
namespace {

constexpr std::string_view kPreamble =
    "You are a credit analysis assistant supporting a corporate credit underwriter.\n"
    "Assess the passage below as evidence for the analyst's query and financial statement.\n"
    "Definitions:\n"
    "- relevant: the passage addresses the subject of the query.\n"
    "- supported: the passage contains evidence that verifies a figure or claim in the financial statement.\n"
    "- utility: a number between 0 and 1 rating how useful the passage is for an underwriting decision "
    "(1 = decisive, verifiable evidence; 0 = no analytical value). Boilerplate, legal notes and generic "
    "disclosures score low even when they mention the query's terms.\n"
    "Respond with a single JSON object and nothing else:\n"
    "{\"relevant\": true|false, \"supported\": true|false, \"utility\": <number between 0 and 1>, "
    "\"reason\": \"<one sentence>\"}\n";

constexpr std::string_view kFormatReminder =
    "\n\nReminder: your previous answer could not be read. Reply with exactly one JSON object of the form "
    "{\"relevant\": true|false, \"supported\": true|false, \"utility\": <number between 0 and 1>, "
    "\"reason\": \"<one sentence>\"} and no other text.";

std::string page_range(int start, int end) {
  return start == end ? std::to_string(start) : std::to_string(start) + "-" + std::to_string(end);
}

// Returns the end (exclusive) of the balanced JSON object starting at
// raw[open], honoring string literals, or npos.
std::size_t matching_brace(std::string_view raw, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = open; i < raw.size(); ++i) {
    const char c = raw[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
    } else if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i + 1;
    }
  }
  return std::string_view::npos;
}

void backoff(int attempt) { std::this_thread::sleep_for(std::chrono::milliseconds(25 * attempt)); }

}  // namespace

PassageMetadata metadata_for(const Segment& segment, std::string_view document_title) {
  return PassageMetadata{std::string(document_title), segment.section_title, segment.page_start, segment.page_end,
                         segment.kind};
}

std::string build_judge_prompt(const QueryStatement& query, const Segment& passage, const PassageMetadata& meta) {
  std::ostringstream out;
  out << kPreamble << "\n### Query\n" << query.query << "\n\n### Financial statement\n"
      << (query.financial_statement.empty() ? "(none provided)" : query.financial_statement)
      << "\n\n### Passage metadata\n"
      << "Document: " << meta.document_title << "\n"
      << "Section: " << (meta.section_title.empty() ? "(untitled)" : meta.section_title) << "\n"
      << "Pages: " << page_range(meta.page_start, meta.page_end) << "\n"
      << "Kind: " << (meta.kind == SegmentKind::Table ? "table" : "narrative") << "\n"
      << "\n### Passage\n";
  const auto text = utf8_prefix(passage.text, kMaxPromptPassageChars);
  out << text << "\n";
  if (text.size() < passage.text.size()) {
    out << "[passage truncated at " << kMaxPromptPassageChars << " characters]\n";
  }
  return out.str();
}

JudgeVerdict parse_verdict(std::string_view raw, std::string_view segment_id) {
  for (auto open = raw.find('{'); open != std::string_view::npos; open = raw.find('{', open + 1)) {
    const auto close = matching_brace(raw, open);
    if (close == std::string_view::npos) continue;
    const auto object = nlohmann::json::parse(raw.substr(open, close - open), nullptr, false);
    if (object.is_discarded() || !object.is_object()) continue;
    const auto rel = object.find("relevant");
    const auto sup = object.find("supported");
    const auto util = object.find("utility");
    if (rel == object.end() || sup == object.end() || util == object.end() || !rel->is_boolean() ||
        !sup->is_boolean() || !util->is_number()) {
      continue;
    }
    JudgeVerdict verdict;
    verdict.segment_id = segment_id;
    verdict.relevant = rel->get<bool>();
    verdict.supported = sup->get<bool>();
    const double utility = util->get<double>();
    verdict.utility = std::isfinite(utility) ? std::clamp(utility, 0.0, 1.0) : 0.0;
    if (const auto reason = object.find("reason"); reason != object.end() && reason->is_string()) {
      verdict.rationale = reason->get<std::string>();
    }
    return verdict;
  }
  throw Error(ErrorCode::MalformedVerdict, "no verdict object in model output for segment " + std::string(segment_id));
}

std::string render_verdict(const JudgeVerdict& verdict) {
  const nlohmann::json object = {{"relevant", verdict.relevant},
                                 {"supported", verdict.supported},
                                 {"utility", verdict.utility},
                                 {"reason", verdict.rationale}};
  return object.dump();
}

JudgeVerdict mock_judge_verdict(const QueryStatement& query, const Segment& passage) {
  const auto passage_tokens = tokenize(passage.text);
  const std::set<std::string> passage_set(passage_tokens.begin(), passage_tokens.end());
  const auto query_tokens = tokenize(query.query);
  const auto statement_tokens = tokenize(query.financial_statement);

  const bool relevant = std::any_of(query_tokens.begin(), query_tokens.end(), [&](const std::string& t) {
    return !is_stopword(t) && passage_set.contains(t);
  });
  const bool statement_overlap = std::any_of(statement_tokens.begin(), statement_tokens.end(),
                                             [&](const std::string& t) { return passage_set.contains(t); });
  const bool supported = relevant && (contains_digit(passage.text) || statement_overlap);

  std::set<std::string> target(query_tokens.begin(), query_tokens.end());
  target.insert(statement_tokens.begin(), statement_tokens.end());
  std::size_t shared = 0;
  for (const auto& t : passage_set) shared += target.contains(t) ? 1 : 0;
  const std::size_t united = passage_set.size() + target.size() - shared;
  const double jaccard = united == 0 ? 0.0 : static_cast<double>(shared) / static_cast<double>(united);

  JudgeVerdict verdict;
  verdict.segment_id = passage.segment_id;
  verdict.relevant = relevant;
  verdict.supported = supported;
  verdict.utility = std::round(jaccard * 10000.0) / 10000.0;
  verdict.rationale = std::string(relevant ? "shares query terms" : "no query-term overlap") +
                      (relevant ? (supported ? "; carries figures or statement terms" : "; no supporting figures")
                                : "");
  verdict.model_id = std::string(kMockModelId);
  return verdict;
}

JudgeVerdict judge_passage(const ModelEndpoint& endpoint, const QueryStatement& query, const Segment& passage,
                           const PassageMetadata& meta) {
  if (is_mock_endpoint(endpoint)) return mock_judge_verdict(query, passage);
  validate_endpoint(endpoint);
  if (endpoint.base_url.empty()) throw Error(ErrorCode::ModelUnavailable, "no model endpoint configured");

  std::string prompt = build_judge_prompt(query, passage, meta);
  ErrorCode last_code = ErrorCode::ModelUnavailable;
  std::string last_message;
  bool reminded = false;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0 && last_code == ErrorCode::ModelUnavailable) backoff(attempt);
    try {
      const auto reply = chat_complete(endpoint, prompt);
      auto verdict = parse_verdict(reply, passage.segment_id);
      verdict.model_id = endpoint.model_name;
      return verdict;
    } catch (const Error& e) {
      if (e.code() == ErrorCode::MalformedVerdict && !reminded) {
        prompt += kFormatReminder;
        reminded = true;
      }
      last_code = e.code();
      last_message = e.detail();
    }
  }
  throw Error(last_code, last_message + " (after " + std::to_string(endpoint.max_retries) + " retries)");
}

JudgeVerdict MockJudge::judge(const QueryStatement& query, const Segment& passage, const PassageMetadata&) const {
  return mock_judge_verdict(query, passage);
}

EndpointJudge::EndpointJudge(JudgeMode mode, ModelEndpoint controller, ModelEndpoint judge)
    : mode_(mode), controller_(std::move(controller)), judge_(std::move(judge)) {
  validate_endpoint(controller_);
  validate_endpoint(judge_);
}

JudgeVerdict EndpointJudge::judge(const QueryStatement& query, const Segment& passage,
                                  const PassageMetadata& meta) const {
  if (mode_ == JudgeMode::Single) return judge_passage(judge_, query, passage, meta);

  auto gate = judge_passage(controller_, query, passage, meta);
  const std::string controller_id = is_mock_endpoint(controller_) ? std::string(kMockModelId) : controller_.model_name;
  if (!(gate.relevant && gate.supported)) {
    gate.utility = 0.0;
    gate.rationale = "controller: " + gate.rationale + "; utility not scored";
    gate.model_id = controller_id;
    return gate;
  }
  const auto scored = judge_passage(judge_, query, passage, meta);
  const std::string judge_id = is_mock_endpoint(judge_) ? std::string(kMockModelId) : judge_.model_name;
  JudgeVerdict verdict = gate;
  verdict.utility = scored.utility;
  verdict.rationale = "controller: " + gate.rationale + "; judge: " + scored.rationale;
  verdict.model_id = controller_id + "+" + judge_id;
  return verdict;
}

}  // namespace utilrank
