#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "utilrank/error.hpp"
#include "utilrank/ingest.hpp"
#include "utilrank/text.hpp"

using namespace utilrank;

namespace {

ParsedDocument parse(std::string_view raw) { return parse_document(raw, DocumentMeta{"d", "Doc", "d.md"}); }

ErrorCode error_of(std::string_view raw) {
  try {
    parse(raw);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidParams;
}

TableBlock grid(std::vector<std::vector<Cell>> rows, int headers, int cols) {
  TableBlock t;
  t.rows = std::move(rows);
  t.header_row_count = headers;
  t.col_count = cols;
  return t;
}

}  // namespace

TEST_CASE("two headings give two narrative segments") {
  const auto doc = parse("# A\n\nalpha text\n\n# B\n\nbeta text\n");
  REQUIRE(doc.segments.size() == 2);
  CHECK(doc.segments[0].section_title == "A");
  CHECK(doc.segments[1].section_title == "B");
  CHECK(doc.segments[0].kind == SegmentKind::Narrative);
  CHECK(doc.segments[0].segment_id == "d#0000");
  CHECK(doc.segments[1].segment_id == "d#0001");
  CHECK(doc.segments[0].text == "# A\n\nalpha text");
}

TEST_CASE("single pipe table without headings") {
  const auto doc = parse("| a | b |\n|---|---|\n| 1 | 2 |\n");
  REQUIRE(doc.segments.size() == 1);
  const auto& s = doc.segments[0];
  CHECK(s.kind == SegmentKind::Table);
  CHECK(s.section_title.empty());
  REQUIRE(s.table.has_value());
  CHECK(s.table->complexity == TableComplexity::NonComplex);
  CHECK(s.table->col_count == 2);
}

TEST_CASE("document errors") {
  CHECK(error_of("  \n\t\n") == ErrorCode::EmptyDocument);
  CHECK(error_of("<!-- page: 2 -->\n\n") == ErrorCode::EmptyDocument);
  CHECK(error_of("a\n<!-- page: 3 -->\nb\n<!-- page: 2 -->\nc") == ErrorCode::MalformedPageMarker);
  CHECK(error_of("a\n<!-- page: x -->\nb") == ErrorCode::MalformedPageMarker);
  CHECK(error_of("a\n<!-- page: 0 -->\nb") == ErrorCode::MalformedPageMarker);
  CHECK(error_of("bad \xC3") == ErrorCode::InvalidUtf8);
  CHECK(error_of("<table><tr><td>x</td></tr>") == ErrorCode::UnclosedTable);
}

TEST_CASE("segment_markdown examples") {
  const auto s = segment_markdown("intro\n# H\nbody");
  REQUIRE(s.size() == 2);
  CHECK(s[0].title.empty());
  CHECK(s[0].body == "intro");
  CHECK(s[1].title == "H");
  CHECK(s[1].body == "body");

  const auto lists = segment_markdown("# H\n- a\n- b");
  REQUIRE(lists.size() == 1);
  CHECK(lists[0].body == "- a\n- b");

  CHECK(segment_markdown("").empty());
}

TEST_CASE("headings inside fenced code do not split") {
  const auto s = segment_markdown("# Real\n\n```\n# not a heading\n```\n");
  REQUIRE(s.size() == 1);
  CHECK(s[0].body.find("# not a heading") != std::string::npos);
}

TEST_CASE("detect_tables examples") {
  const auto one = detect_tables("text\n\n| a | b | c |\n|---|:-:|--:|\n| 1 | 2 | 3 |\n| 4 | 5 | 6 |\n");
  REQUIRE(one.size() == 1);
  CHECK(one[0].table.col_count == 3);
  CHECK(one[0].table.rows.size() == 3);
  CHECK(one[0].table.header_row_count == 1);

  CHECK(detect_tables("no tables here\njust prose").empty());

  const auto two = detect_tables("| a | b |\n|---|---|\n| 1 | 2 |\n\n| c | d |\n|---|---|\n| 3 | 4 |\n");
  CHECK(two.size() == 2);
}

TEST_CASE("pipe cells keep escaped pipes") {
  const auto t = detect_tables("| a | b |\n|---|---|\n| x \\| y | 2 |\n");
  REQUIRE(t.size() == 1);
  CHECK(t[0].table.rows[1][0].text == "x | y");
}

TEST_CASE("html tables carry spans and headers") {
  const auto t = detect_tables(
      "<table><thead><tr><th rowspan=\"2\">M</th><th colspan=\"2\">Year</th></tr>"
      "<tr><th>2023</th><th>2022</th></tr></thead>"
      "<tr><td>Revenue</td><td>1</td><td>2</td></tr></table>");
  REQUIRE(t.size() == 1);
  CHECK(t[0].table.header_row_count == 2);
  CHECK(t[0].table.col_count == 3);
  CHECK(t[0].table.rows[0][0].row_span == 2);
  CHECK(t[0].table.rows[0][1].col_span == 2);
  CHECK(t[0].table.complexity == TableComplexity::Complex);
}

TEST_CASE("html table without header markup uses its first row") {
  const auto t = detect_tables("<table><tr><td>a</td><td>b</td></tr><tr><td>1</td><td>2</td></tr></table>");
  REQUIRE(t.size() == 1);
  CHECK(t[0].table.header_row_count == 1);
  CHECK(t[0].table.complexity == TableComplexity::NonComplex);
}

TEST_CASE("classify_table rules") {
  const Cell c{"x"};
  CHECK(classify_table(grid({{c, c, c, c}, {c, c, c, c}, {c, c, c, c}}, 1, 4)) == TableComplexity::NonComplex);
  CHECK(classify_table(grid({{c, Cell{"m", 1, 2}}, {c, c, c}}, 1, 3)) == TableComplexity::Complex);
  CHECK(classify_table(grid({{c, c}, {c, c}, {c, c}}, 2, 2)) == TableComplexity::Complex);
  CHECK(classify_table(grid({{c, c}, {c}}, 1, 2)) == TableComplexity::Complex);
  CHECK(classify_table(grid({{c, c}, {Cell{"r", 2, 1}, c}, {c}}, 1, 2)) == TableComplexity::Complex);
}

TEST_CASE("page attribution") {
  const auto doc = parse("# A\n\none\n\n<!-- page: 2 -->\n\n# B\n\ntwo\n\n<!-- page: 4 -->\n\n# C\n\nthree\n");
  REQUIRE(doc.segments.size() == 3);
  CHECK(doc.source.page_count == 4);
  CHECK(doc.segments[0].page_start == 1);
  CHECK(doc.segments[1].page_start == 2);
  CHECK(doc.segments[1].page_end == 2);
  CHECK(doc.segments[2].page_start == 4);
  CHECK(doc.segments[1].text == "# B\n\ntwo");
}

TEST_CASE("segment spanning a page marker") {
  const auto doc = parse("# A\n\nfirst\n\n<!-- page: 2 -->\n\nsecond\n");
  REQUIRE(doc.segments.size() == 1);
  CHECK(doc.segments[0].page_start == 1);
  CHECK(doc.segments[0].page_end == 2);
}

TEST_CASE("tables are lifted out of their section") {
  const auto doc = parse("# Figures\n\nLead text.\n\n| a | b |\n|---|---|\n| 1 | 2 |\n\nTrailing text.\n");
  REQUIRE(doc.segments.size() == 3);
  CHECK(doc.segments[0].kind == SegmentKind::Narrative);
  CHECK(doc.segments[1].kind == SegmentKind::Table);
  CHECK(doc.segments[2].kind == SegmentKind::Narrative);
  for (const auto& s : doc.segments) CHECK(s.section_title == "Figures");
  CHECK(doc.segments[2].text == "Trailing text.");
}

TEST_CASE("long narrative is split below the limit") {
  std::string body = "# Long\n\n";
  for (int i = 0; i < 120; ++i) body += "Paragraph " + std::to_string(i) + " " + std::string(60, 'x') + ".\n\n";
  const auto doc = parse(body);
  REQUIRE(doc.segments.size() > 1);
  for (const auto& s : doc.segments) {
    CHECK(utf8_length(s.text) <= kMaxSegmentChars);
    CHECK(s.section_title == "Long");
  }
}

TEST_CASE("an unbroken run is hard cut at a code point boundary") {
  std::string body;
  for (int i = 0; i < 5000; ++i) body += "营";
  const auto doc = parse(body);
  REQUIRE(doc.segments.size() == 2);
  CHECK(utf8_length(doc.segments[0].text) <= kMaxSegmentChars);
  CHECK(is_valid_utf8(doc.segments[0].text));
  CHECK(doc.segments[0].text.size() + doc.segments[1].text.size() == body.size());
}

TEST_CASE("front matter") {
  const auto doc = parse_markdown_file("---\ndoc_id: x1\ntitle: \"Report X\"\nlanguage: de\n---\n# H\n\nbody\n", "x.md");
  CHECK(doc.source.doc_id == "x1");
  CHECK(doc.source.title == "Report X");
  CHECK(doc.source.language == "de");
  CHECK(doc.source.source_path == "x.md");
  REQUIRE(doc.segments.size() == 1);
  CHECK(doc.segments[0].char_span.start == 0);

  CHECK_THROWS_AS(parse_markdown_file("# no front matter\n", "y.md"), Error);
  try {
    parse_markdown_file("---\ntitle: t\n---\nbody\n", "z.md");
    FAIL("expected MalformedFrontMatter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedFrontMatter);
  }
}

TEST_CASE("fixture corpus parses") {
  for (const auto& entry : std::filesystem::directory_iterator(testing::fixture_dir() / "corpus")) {
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto doc = parse_markdown_file(buf.str(), entry.path().filename().string());
    CHECK_FALSE(doc.segments.empty());
  }
}

TEST_CASE("property: segments are ordered, exact slices, and cover all content") {
  std::mt19937_64 rng(20231);
  for (int trial = 0; trial < 300; ++trial) {
    const std::string raw = testing::random_markdown(rng);
    const auto doc = parse(raw);
    std::vector<bool> covered(raw.size(), false);
    for (const auto& m : find_page_markers(raw)) {
      for (auto i = m.span.start; i < m.span.end; ++i) covered[i] = true;
    }
    std::size_t prev_end = 0;
    for (const auto& s : doc.segments) {
      REQUIRE(s.char_span.start < s.char_span.end);
      CHECK(s.char_span.start >= prev_end);
      prev_end = s.char_span.end;
      CHECK(s.text == raw.substr(s.char_span.start, s.char_span.size()));
      CHECK(s.page_start <= s.page_end);
      CHECK(s.page_start >= 1);
      CHECK(s.page_end <= doc.source.page_count);
      CHECK((s.kind == SegmentKind::Table) == s.table.has_value());
      for (auto i = s.char_span.start; i < s.char_span.end; ++i) covered[i] = true;
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (!covered[i] && !is_blank(std::string_view(&raw[i], 1))) {
        FAIL("uncovered byte " << i << " in:\n" << raw);
      }
    }
  }
}

TEST_CASE("property: classification is stable and matches the stored class") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    for (const auto& s : parse(testing::random_markdown(rng)).segments) {
      if (!s.table) continue;
      CHECK(classify_table(*s.table) == s.table->complexity);
      CHECK(classify_table(*s.table) == classify_table(*s.table));
      if (s.table->complexity == TableComplexity::NonComplex) {
        CHECK(s.table->header_row_count == 1);
        for (const auto& row : s.table->rows) {
          int coverage = 0;
          for (const auto& c : row) {
            CHECK(c.row_span == 1);
            CHECK(c.col_span == 1);
            coverage += c.col_span;
          }
          CHECK(coverage == s.table->col_count);
        }
      }
    }
  }
}
