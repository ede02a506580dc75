#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "utilrank/ingest.hpp"
#include "utilrank/judge.hpp"

namespace utilrank {

enum class EvidenceMode { NarrativeSpan, TableCells, ComplexTableCitation };

struct Citation {
  std::string document;
  std::string section;
  int page_start = 1;
  int page_end = 1;

  /// "12" or "12–13".
  std::string pages() const;
  bool operator==(const Citation&) const = default;
};

struct EvidenceItem {
  std::string segment_id;
  EvidenceMode mode = EvidenceMode::NarrativeSpan;
  std::string content;
  Citation citation;
  std::optional<std::vector<std::size_t>> matched_rows;  // body-row indices, TableCells only
  bool no_match = false;  // no query term matched; a fallback excerpt was returned
  double utility = 0.0;   // copied from the verdict by the pipeline

  bool operator==(const EvidenceItem&) const = default;
};

/// Dispatches on (kind, complexity).
EvidenceItem extract_evidence(const Segment& segment, const QueryStatement& query, std::string_view document_title);

/// Minimal run of consecutive blocks (paragraphs, whole lists, fenced code)
/// covering every block that mentions a query term, prefixed by the
/// section heading. Falls back to the first block with no_match set.
EvidenceItem extract_narrative_span(const Segment& segment, const QueryStatement& query,
                                    std::string_view document_title);

/// Header row plus each body row sharing a term with the query or the
/// statement, re-rendered as a pipe table. Without any matching row the
/// table text is returned verbatim with no_match set.
EvidenceItem extract_table_cells(const Segment& segment, const QueryStatement& query,
                                 std::string_view document_title);

/// The table markup verbatim, with its citation; no parsing is attempted.
EvidenceItem cite_complex_table(const Segment& segment, std::string_view document_title);

std::string render_markdown_table(const std::vector<std::vector<Cell>>& rows);

/// True when the item's content can be traced to the segment: a verbatim
/// substring (optionally behind the segment's own heading line) or, for
/// extracted table cells, a re-rendering of the header plus the listed rows.
bool is_traceable(const EvidenceItem& item, const Segment& segment);

}  // namespace utilrank
