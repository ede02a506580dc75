#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "utilrank/index.hpp"
#include "utilrank/judge.hpp"

namespace utilrank {

inline constexpr double kDefaultUtilityThreshold = 0.5;

enum class CandidateStage { C0, C1, J1 };

struct CandidateEntry {
  ScoredCandidate candidate;
  std::optional<JudgeVerdict> verdict;

  bool operator==(const CandidateEntry&) const = default;
};

/// One stage of the candidate funnel. Entries at C1 and J1 always carry a
/// verdict; J1 entries are ordered by utility descending, then segment_id.
struct CandidateSet {
  CandidateStage stage = CandidateStage::C0;
  std::vector<CandidateEntry> entries;
  QueryStatement query;
  double u_threshold = kDefaultUtilityThreshold;

  std::vector<std::string> ids() const;
};

CandidateSet make_c0(const QueryStatement& query, std::vector<ScoredCandidate> candidates);

/// Keeps an entry iff its verdict is relevant AND supported. Throws
/// MissingVerdict when any C0 entry lacks a verdict.
CandidateSet filter_relevant_supported(const CandidateSet& c0, const std::map<std::string, JudgeVerdict>& verdicts);

/// Keeps entries with utility >= u_threshold, ranked by utility descending
/// with ascending segment_id on ties. Throws InvalidThreshold outside [0, 1].
CandidateSet rank_by_utility(const CandidateSet& c1, double u_threshold);

void validate_threshold(double u_threshold);

}  // namespace utilrank
