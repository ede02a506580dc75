#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "fake_endpoint.hpp"
#include "support.hpp"
#include "utilrank/error.hpp"
#include "utilrank/judge.hpp"

using namespace utilrank;
using testing::make_segment;

namespace {

ModelEndpoint endpoint(const std::string& url, int retries = 2) {
  ModelEndpoint ep{url, "small-judge", EndpointRole::Judge};
  ep.timeout = std::chrono::milliseconds(2000);
  ep.max_retries = retries;
  return ep;
}

const QueryStatement kQuery{"net leverage ratio", "Net debt 200; EBITDA 96; FY2023"};

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidParams;
}

}  // namespace

TEST_CASE("prompt layout") {
  auto seg = make_segment("d#0001", "## Review\n\nNet leverage ratio was 2.1x.");
  seg.section_title = "Review";
  seg.page_start = 3;
  seg.page_end = 4;
  const auto prompt = build_judge_prompt(kQuery, seg, metadata_for(seg, "Annual report"));
  const auto q = prompt.find("### Query\nnet leverage ratio");
  const auto s = prompt.find("### Financial statement\nNet debt 200");
  const auto m = prompt.find("### Passage metadata");
  const auto p = prompt.find("### Passage\n## Review");
  CHECK(q != std::string::npos);
  CHECK(s > q);
  CHECK(m > s);
  CHECK(p > m);
  CHECK(prompt.find("Document: Annual report") != std::string::npos);
  CHECK(prompt.find("Section: Review") != std::string::npos);
  CHECK(prompt.find("Pages: 3-4") != std::string::npos);
  CHECK(prompt.find("truncated") == std::string::npos);
}

TEST_CASE("long passages are truncated with a notice") {
  const auto seg = make_segment("d#0001", std::string(5000, 'x'));
  const auto prompt = build_judge_prompt(kQuery, seg, metadata_for(seg, "Doc"));
  CHECK(prompt.find("[passage truncated at 4000 characters]") != std::string::npos);
  CHECK(prompt.find(std::string(4001, 'x')) == std::string::npos);
  CHECK(prompt.find(std::string(4000, 'x')) != std::string::npos);
}

TEST_CASE("parse_verdict") {
  const auto v = parse_verdict(R"({"relevant": true, "supported": false, "utility": 0.42, "reason": "r"})", "d#1");
  CHECK(v.segment_id == "d#1");
  CHECK(v.relevant);
  CHECK_FALSE(v.supported);
  CHECK(v.utility == 0.42);
  CHECK(v.rationale == "r");

  const auto wrapped = parse_verdict(
      "Sure! {\"note\": {\"x\": 1}} then ```json\n{\"relevant\": false, \"supported\": false, \"utility\": 7}\n```", "d#2");
  CHECK_FALSE(wrapped.relevant);
  CHECK(wrapped.utility == 1.0);
  CHECK(parse_verdict(R"({"relevant":true,"supported":true,"utility":-3})", "x").utility == 0.0);
  CHECK(parse_verdict(R"({"reason":"a } brace","relevant":true,"supported":true,"utility":0.5})", "x").utility == 0.5);

  CHECK(code_of([] { parse_verdict("no json here", "x"); }) == ErrorCode::MalformedVerdict);
  CHECK(code_of([] { parse_verdict(R"({"relevant": "yes", "supported": true, "utility": 0.5})", "x"); }) ==
        ErrorCode::MalformedVerdict);
  CHECK(code_of([] { parse_verdict(R"({"relevant": true, "supported": true})", "x"); }) == ErrorCode::MalformedVerdict);
}

TEST_CASE("render then parse is the identity on the scored fields") {
  JudgeVerdict v{"d#9", true, true, 0.8125, "because", ""};
  const auto back = parse_verdict(render_verdict(v), "d#9");
  CHECK(back.relevant == v.relevant);
  CHECK(back.supported == v.supported);
  CHECK(back.utility == v.utility);
  CHECK(back.rationale == v.rationale);
}

TEST_CASE("mock judge rules") {
  const QueryStatement q{"What is the net leverage ratio?", "FY2023 2.1x"};
  const auto gold = mock_judge_verdict(q, make_segment("d#0", "Net leverage ratio 2.1x in FY2023."));
  CHECK(gold.relevant);
  CHECK(gold.supported);
  CHECK(gold.model_id == "mock-judge");

  const auto decoy = mock_judge_verdict(q, make_segment("d#1", "Leverage is monitored by management."));
  CHECK(decoy.relevant);
  CHECK_FALSE(decoy.supported);

  const auto stop_only = mock_judge_verdict(q, make_segment("d#2", "What is the plan?"));
  CHECK_FALSE(stop_only.relevant);
  CHECK_FALSE(stop_only.supported);

  const auto overlap = mock_judge_verdict(QueryStatement{"leverage", "covenant headroom"},
                                          make_segment("d#3", "Leverage and covenant terms."));
  CHECK(overlap.supported);

  // Jaccard of {net, leverage} with {net, leverage, ratio}: 2/3.
  CHECK(mock_judge_verdict(QueryStatement{"net leverage ratio", ""}, make_segment("d#4", "net leverage")).utility ==
        0.6667);
}

TEST_CASE("mock judge is deterministic") {
  const auto seg = make_segment("d#0", "Net leverage ratio 2.1x.");
  CHECK(mock_judge_verdict(kQuery, seg) == mock_judge_verdict(kQuery, seg));
  CHECK(judge_passage(endpoint("mock"), kQuery, seg, {}) == mock_judge_verdict(kQuery, seg));
}

TEST_CASE("endpoint judge parses a well-formed reply") {
  testing::FakeChatServer server([](const std::string&) {
    return std::pair{200, std::string(R"({"relevant": true, "supported": true, "utility": 0.9, "reason": "ok"})")};
  });
  const auto seg = make_segment("d#0", "text");
  const auto v = judge_passage(endpoint(server.url()), kQuery, seg, metadata_for(seg, "Doc"));
  CHECK(v.utility == 0.9);
  CHECK(v.model_id == "small-judge");
  CHECK(v.segment_id == "d#0");
  CHECK(server.calls() == 1);
}

TEST_CASE("malformed output is retried once with a format reminder") {
  std::atomic<int> n{0};
  testing::FakeChatServer server([&](const std::string&) {
    if (n++ == 0) return std::pair{200, std::string("I think it is relevant.")};
    return std::pair{200, std::string(R"({"relevant": true, "supported": false, "utility": 0.3})")};
  });
  const auto seg = make_segment("d#0", "text");
  const auto v = judge_passage(endpoint(server.url()), kQuery, seg, {});
  CHECK(v.utility == 0.3);
  const auto prompts = server.prompts();
  REQUIRE(prompts.size() == 2);
  CHECK(prompts[0].find("Reminder:") == std::string::npos);
  CHECK(prompts[1].find("Reminder:") != std::string::npos);
}

TEST_CASE("persistent malformed output raises MalformedVerdict") {
  testing::FakeChatServer server([](const std::string&) { return std::pair{200, std::string("nope")}; });
  const auto seg = make_segment("d#0", "text");
  CHECK(code_of([&] { judge_passage(endpoint(server.url(), 2), kQuery, seg, {}); }) == ErrorCode::MalformedVerdict);
  CHECK(server.calls() == 3);
}

TEST_CASE("transport failures raise ModelUnavailable after retries") {
  testing::FakeChatServer server([](const std::string&) { return std::pair{500, std::string("boom")}; });
  const auto seg = make_segment("d#0", "text");
  CHECK(code_of([&] { judge_passage(endpoint(server.url(), 1), kQuery, seg, {}); }) == ErrorCode::ModelUnavailable);
  CHECK(server.calls() == 2);

  auto dead = endpoint(testing::dead_url(), 0);
  dead.timeout = std::chrono::milliseconds(300);
  CHECK(code_of([&] { judge_passage(dead, kQuery, seg, {}); }) == ErrorCode::ModelUnavailable);
  CHECK(code_of([&] { judge_passage(endpoint(""), kQuery, seg, {}); }) == ErrorCode::ModelUnavailable);
}

TEST_CASE("transient failure then success") {
  std::atomic<int> n{0};
  testing::FakeChatServer server([&](const std::string&) {
    if (n++ == 0) return std::pair{503, std::string("busy")};
    return std::pair{200, std::string(R"({"relevant": false, "supported": false, "utility": 0.1})")};
  });
  const auto v = judge_passage(endpoint(server.url()), kQuery, make_segment("d#0", "t"), {});
  CHECK(v.utility == 0.1);
}

TEST_CASE("endpoint validation") {
  auto ep = endpoint("http://127.0.0.1:9", 6);
  CHECK(code_of([&] { validate_endpoint(ep); }) == ErrorCode::InvalidConfig);
  ep.max_retries = 1;
  ep.timeout = std::chrono::milliseconds(0);
  CHECK(code_of([&] { validate_endpoint(ep); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("staged mode consults the judge only past the gate") {
  testing::FakeChatServer controller([](const std::string& prompt) {
    const bool pass = prompt.find("GOLD") != std::string::npos;
    return std::pair{200, std::string(pass ? R"({"relevant": true, "supported": true, "utility": 0.2})"
                                           : R"({"relevant": true, "supported": false, "utility": 0.2})")};
  });
  testing::FakeChatServer judge([](const std::string&) {
    return std::pair{200, std::string(R"({"relevant": true, "supported": true, "utility": 0.95, "reason": "useful"})")};
  });
  auto c = endpoint(controller.url());
  c.model_name = "ctrl";
  c.role = EndpointRole::Controller;
  const EndpointJudge staged(JudgeMode::Staged, c, endpoint(judge.url()));

  const auto passed = staged.judge(kQuery, make_segment("d#0", "GOLD passage"), {});
  CHECK(passed.utility == 0.95);
  CHECK(passed.relevant);
  CHECK(passed.supported);
  CHECK(passed.model_id == "ctrl+small-judge");

  const auto gated = staged.judge(kQuery, make_segment("d#1", "other passage"), {});
  CHECK(gated.utility == 0.0);
  CHECK_FALSE(gated.supported);
  CHECK(gated.model_id == "ctrl");
  CHECK(judge.calls() == 1);
  CHECK(controller.calls() == 2);

  const EndpointJudge single(JudgeMode::Single, c, endpoint(judge.url()));
  CHECK(single.judge(kQuery, make_segment("d#2", "x"), {}).utility == 0.95);
  CHECK(controller.calls() == 2);
}
