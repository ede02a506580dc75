#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "utilrank/endpoint.hpp"
#include "utilrank/ingest.hpp"

namespace utilrank {

/// The analyst query supplemented with its financial statement context.
struct QueryStatement {
  std::string query;
  std::string financial_statement;

  bool operator==(const QueryStatement&) const = default;
};

struct JudgeVerdict {
  std::string segment_id;
  bool relevant = false;
  bool supported = false;
  double utility = 0.0;  // in [0, 1]
  std::string rationale;
  std::string model_id;

  bool operator==(const JudgeVerdict&) const = default;
};

/// Structural metadata shown to the judge next to the passage.
struct PassageMetadata {
  std::string document_title;
  std::string section_title;
  int page_start = 1;
  int page_end = 1;
  SegmentKind kind = SegmentKind::Narrative;
};

enum class JudgeMode { Single, Staged };

inline constexpr std::size_t kMaxPromptPassageChars = 4000;
inline constexpr std::string_view kMockModelId = "mock-judge";

PassageMetadata metadata_for(const Segment& segment, std::string_view document_title);

std::string build_judge_prompt(const QueryStatement& query, const Segment& passage, const PassageMetadata& meta);

/// Extracts the first JSON object carrying boolean "relevant", boolean
/// "supported" and numeric "utility" from free-form model output. Utility is
/// clamped to [0, 1]. Throws MalformedVerdict.
JudgeVerdict parse_verdict(std::string_view raw, std::string_view segment_id);

/// Renders a verdict in the response format the model is asked to produce.
std::string render_verdict(const JudgeVerdict& verdict);

/// Deterministic rule-based stand-in for the judge model.
JudgeVerdict mock_judge_verdict(const QueryStatement& query, const Segment& passage);

/// One verdict from one endpoint, retrying malformed output with a format
/// reminder and transport failures with backoff, up to max_retries. Never
/// returns a default verdict: failures throw ModelUnavailable or
/// MalformedVerdict. A mock endpoint answers with mock_judge_verdict.
JudgeVerdict judge_passage(const ModelEndpoint& endpoint, const QueryStatement& query, const Segment& passage,
                           const PassageMetadata& meta);

class Judge {
 public:
  virtual ~Judge() = default;
  virtual JudgeVerdict judge(const QueryStatement& query, const Segment& passage,
                             const PassageMetadata& meta) const = 0;
};

class MockJudge final : public Judge {
 public:
  JudgeVerdict judge(const QueryStatement& query, const Segment& passage, const PassageMetadata& meta) const override;
};

/// Single mode sends one request to the judge endpoint. Staged mode asks the
/// lightweight controller for (relevant, supported) first and only consults
/// the judge endpoint for utility when both hold.
class EndpointJudge final : public Judge {
 public:
  EndpointJudge(JudgeMode mode, ModelEndpoint controller, ModelEndpoint judge);

  JudgeVerdict judge(const QueryStatement& query, const Segment& passage, const PassageMetadata& meta) const override;

 private:
  JudgeMode mode_;
  ModelEndpoint controller_;
  ModelEndpoint judge_;
};

}  // namespace utilrank
