#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "doctest.h"
#include "utilrank/controller.hpp"
#include "utilrank/error.hpp"

using namespace utilrank;

namespace {

ScoredCandidate cand(const std::string& id) { return ScoredCandidate{id, 1.0, std::nullopt, Provenance::Keyword}; }

JudgeVerdict verdict(const std::string& id, bool rel, bool sup, double u) { return JudgeVerdict{id, rel, sup, u, "", "t"}; }

CandidateSet c1_of(const std::vector<JudgeVerdict>& vs) {
  std::vector<ScoredCandidate> cands;
  std::map<std::string, JudgeVerdict> map;
  for (const auto& v : vs) {
    cands.push_back(cand(v.segment_id));
    map[v.segment_id] = v;
  }
  return filter_relevant_supported(make_c0(QueryStatement{"q", "s"}, cands), map);
}

}  // namespace

TEST_CASE("gate truth table") {
  const std::vector<JudgeVerdict> vs = {verdict("a", true, true, 0.5), verdict("b", true, false, 0.9),
                                        verdict("c", false, true, 0.9), verdict("d", false, false, 0.9)};
  const auto c1 = c1_of(vs);
  CHECK(c1.stage == CandidateStage::C1);
  CHECK(c1.ids() == std::vector<std::string>{"a"});
  REQUIRE(c1.entries.size() == 1);
  CHECK(c1.entries[0].verdict.has_value());
}

TEST_CASE("missing verdict is an error") {
  const auto c0 = make_c0(QueryStatement{}, {cand("a"), cand("b")});
  const std::map<std::string, JudgeVerdict> partial = {{"a", verdict("a", true, true, 1.0)}};
  try {
    filter_relevant_supported(c0, partial);
    FAIL("expected MissingVerdict");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingVerdict);
  }
}

TEST_CASE("threshold is inclusive and ranking is by utility then id") {
  const auto c1 = c1_of({verdict("b", true, true, 0.5), verdict("a", true, true, 0.5), verdict("c", true, true, 0.9),
                         verdict("d", true, true, 0.49)});
  const auto j1 = rank_by_utility(c1, 0.5);
  CHECK(j1.stage == CandidateStage::J1);
  CHECK(j1.u_threshold == 0.5);
  CHECK(j1.ids() == std::vector<std::string>{"c", "a", "b"});
  CHECK(rank_by_utility(c1, 0.0).ids() == std::vector<std::string>{"c", "a", "b", "d"});
  CHECK(rank_by_utility(c1, 1.0).ids().empty());
  CHECK(rank_by_utility(c1_of({verdict("x", true, true, 1.0), verdict("y", true, true, 0.99)}), 1.0).ids() ==
        std::vector<std::string>{"x"});
}

TEST_CASE("invalid thresholds") {
  const auto c1 = c1_of({verdict("a", true, true, 0.5)});
  for (double t : {-0.01, 1.01, std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::infinity()}) {
    try {
      rank_by_utility(c1, t);
      FAIL("expected InvalidThreshold");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidThreshold);
    }
  }
  CHECK_NOTHROW(validate_threshold(0.0));
  CHECK_NOTHROW(validate_threshold(1.0));
}

TEST_CASE("properties over random verdicts") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<JudgeVerdict> vs;
    const std::size_t n = rng() % 30;
    for (std::size_t i = 0; i < n; ++i) {
      vs.push_back(verdict("s" + std::to_string(i), rng() % 2, rng() % 2, static_cast<double>(rng() % 5) / 4.0));
    }
    const auto c1 = c1_of(vs);
    const auto expected_c1 = std::count_if(vs.begin(), vs.end(), [](const auto& v) { return v.relevant && v.supported; });
    CHECK(c1.entries.size() == static_cast<std::size_t>(expected_c1));

    std::vector<std::string> previous;
    for (double t : {1.0, 0.75, 0.5, 0.25, 0.0}) {
      const auto j1 = rank_by_utility(c1, t);
      const auto ids = j1.ids();
      const std::set<std::string> now(ids.begin(), ids.end());
      for (const auto& id : previous) CHECK(now.contains(id));
      previous = ids;
      for (std::size_t i = 1; i < j1.entries.size(); ++i) {
        const auto& a = *j1.entries[i - 1].verdict;
        const auto& b = *j1.entries[i].verdict;
        CHECK((a.utility > b.utility || (a.utility == b.utility && a.segment_id < b.segment_id)));
      }
      for (const auto& e : j1.entries) CHECK(e.verdict->utility >= t);
    }
    CHECK(rank_by_utility(c1, 0.0).entries.size() == c1.entries.size());

    auto shuffled = c1;
    std::shuffle(shuffled.entries.begin(), shuffled.entries.end(), rng);
    CHECK(rank_by_utility(shuffled, 0.5).ids() == rank_by_utility(c1, 0.5).ids());
  }
}
