#include "utilrank/controller.hpp"

#include <algorithm>
#include <cmath>

#include "utilrank/error.hpp"

namespace utilrank {

std::vector<std::string> CandidateSet::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.candidate.segment_id);
  return out;
}

CandidateSet make_c0(const QueryStatement& query, std::vector<ScoredCandidate> candidates) {
  CandidateSet set;
  set.stage = CandidateStage::C0;
  set.query = query;
  for (auto& c : candidates) set.entries.push_back(CandidateEntry{std::move(c), std::nullopt});
  return set;
}

void validate_threshold(double u_threshold) {
  if (!(u_threshold >= 0.0 && u_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidThreshold, "utility threshold must be in [0, 1], got " + std::to_string(u_threshold));
  }
}

CandidateSet filter_relevant_supported(const CandidateSet& c0, const std::map<std::string, JudgeVerdict>& verdicts) {
  CandidateSet c1;
  c1.stage = CandidateStage::C1;
  c1.query = c0.query;
  c1.u_threshold = c0.u_threshold;
  for (const auto& entry : c0.entries) {
    const auto it = verdicts.find(entry.candidate.segment_id);
    if (it == verdicts.end()) {
      throw Error(ErrorCode::MissingVerdict, "candidate " + entry.candidate.segment_id + " has no verdict");
    }
    // Support only counts when relevance holds.
    if (it->second.relevant && it->second.supported) c1.entries.push_back(CandidateEntry{entry.candidate, it->second});
  }
  return c1;
}

CandidateSet rank_by_utility(const CandidateSet& c1, double u_threshold) {
  validate_threshold(u_threshold);
  CandidateSet j1;
  j1.stage = CandidateStage::J1;
  j1.query = c1.query;
  j1.u_threshold = u_threshold;
  for (const auto& entry : c1.entries) {
    if (!entry.verdict) {
      throw Error(ErrorCode::MissingVerdict, "candidate " + entry.candidate.segment_id + " reached ranking unjudged");
    }
    if (entry.verdict->utility >= u_threshold) j1.entries.push_back(entry);
  }
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < j1.entries.size(); ++i) order.emplace_back(j1.entries[i].verdict->utility, i);
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return j1.entries[a.second].candidate.segment_id < j1.entries[b.second].candidate.segment_id;
  });
  std::vector<CandidateEntry> ranked;
  for (const auto& [u, i] : order) ranked.push_back(std::move(j1.entries[i]));
  j1.entries = std::move(ranked);
  return j1;
}

}  // namespace utilrank
