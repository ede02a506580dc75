#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace utilrank {

/// Half-open byte range [start, end) into a document body.
struct CharSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - start; }
  bool operator==(const CharSpan&) const = default;
};

struct DocumentSource {
  std::string doc_id;
  std::string title;
  std::string source_path;
  std::string language;
  int page_count = 1;

  bool operator==(const DocumentSource&) const = default;
};

/// Document-level metadata supplied alongside the raw markdown.
struct DocumentMeta {
  std::string doc_id;
  std::string title;
  std::string source_path;
  std::string language = "und";
};

enum class SegmentKind { Narrative, Table };
enum class TableComplexity { Complex, NonComplex };

struct Cell {
  std::string text;
  int row_span = 1;
  int col_span = 1;

  bool operator==(const Cell&) const = default;
};

struct TableBlock {
  std::vector<std::vector<Cell>> rows;  // header rows first
  int header_row_count = 0;
  int col_count = 0;
  TableComplexity complexity = TableComplexity::Complex;

  bool operator==(const TableBlock&) const = default;
};

struct Segment {
  std::string segment_id;
  std::string doc_id;
  std::string section_title;
  int page_start = 1;
  int page_end = 1;
  SegmentKind kind = SegmentKind::Narrative;
  std::string text;
  std::optional<TableBlock> table;  // present iff kind == Table
  CharSpan char_span;

  bool operator==(const Segment&) const = default;
};

struct ParsedDocument {
  DocumentSource source;
  std::vector<Segment> segments;
};

struct PageMarker {
  CharSpan span;
  int page = 1;
};

struct Section {
  std::string title;  // empty for the preamble
  int level = 0;      // 0 for the preamble
  std::string body;   // text after the heading line, trimmed
  CharSpan span;      // heading line through last non-blank byte of the section
};

struct DetectedTable {
  TableBlock table;
  CharSpan span;
};

/// Narrative segments longer than this many code points are split at the
/// nearest paragraph boundary below the limit.
inline constexpr std::size_t kMaxSegmentChars = 4000;

/// Finds `<!-- page: N -->` markers. Throws MalformedPageMarker on a
/// non-numeric or non-increasing page number.
std::vector<PageMarker> find_page_markers(std::string_view text);

/// Splits at ATX headings of any level, ignoring headings inside fenced code.
std::vector<Section> segment_markdown(std::string_view text);

/// Locates pipe tables and HTML tables. Every returned table is classified.
/// Throws UnclosedTable for an HTML table without `</table>`.
std::vector<DetectedTable> detect_tables(std::string_view text);

/// Complex iff multi-row header, any merged cell, or any row whose column
/// coverage differs from col_count.
TableComplexity classify_table(const TableBlock& table);

/// Segments a markdown body into metadata-tagged passages. char_span offsets
/// index into `raw`.
ParsedDocument parse_document(std::string_view raw, const DocumentMeta& meta);

/// Parses a corpus file: a `---` front-matter block carrying doc_id, title,
/// source and language, followed by the markdown body handed to
/// parse_document.
ParsedDocument parse_markdown_file(std::string_view file_text, const std::string& path);

/// Splits front matter from the body. Returns the metadata and the body
/// offset within file_text.
std::pair<DocumentMeta, std::size_t> parse_front_matter(std::string_view file_text,
                                                        const std::string& path);

}  // namespace utilrank
