#include "utilrank/extract.hpp"

#include <algorithm>
#include <set>

#include "utilrank/text.hpp"

namespace utilrank {
namespace {

struct Block {
  std::size_t start = 0;
  std::size_t end = 0;
  bool list = false;
};

bool starts_list_item(std::string_view line) {
  const auto t = line.substr(std::min(line.find_first_not_of(" \t"), line.size()));
  if (t.size() >= 2 && (t[0] == '-' || t[0] == '*' || t[0] == '+') && (t[1] == ' ' || t[1] == '\t')) return true;
  std::size_t digits = 0;
  while (digits < t.size() && digits < 9 && t[digits] >= '0' && t[digits] <= '9') ++digits;
  return digits > 0 && digits + 1 < t.size() && (t[digits] == '.' || t[digits] == ')') &&
         (t[digits + 1] == ' ' || t[digits + 1] == '\t');
}

bool is_fence(std::string_view line) {
  const auto t = trim(line);
  return t.starts_with("```") || t.starts_with("~~~");
}

bool is_heading_line(std::string_view line) {
  std::size_t k = 0;
  while (k < 3 && k < line.size() && line[k] == ' ') ++k;
  std::size_t n = 0;
  while (k + n < line.size() && line[k + n] == '#') ++n;
  return n >= 1 && n <= 6 && (k + n == line.size() || line[k + n] == ' ' || line[k + n] == '\t');
}

// Splits text[from, text.size()) into blank-line separated blocks. Loose
// lists and their indented continuations merge into a single block; blank
// lines inside fenced code do not split.
std::vector<Block> split_blocks(std::string_view text, std::size_t from) {
  std::vector<Block> blocks;
  std::optional<Block> current;
  bool in_fence = false;
  std::size_t pos = from;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    const auto line = text.substr(pos, end - pos);
    if (is_fence(line)) in_fence = !in_fence;
    if (!in_fence && is_blank(line)) {
      if (current) blocks.push_back(*current);
      current.reset();
    } else if (!current) {
      current = Block{pos, end, starts_list_item(line)};
    } else {
      current->end = end;
    }
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
  }
  if (current) blocks.push_back(*current);

  for (auto& b : blocks) {
    while (b.end > b.start && (text[b.end - 1] == '\r' || text[b.end - 1] == ' ' || text[b.end - 1] == '\t')) --b.end;
  }

  std::vector<Block> merged;
  for (const auto& b : blocks) {
    const auto first_line = text.substr(b.start, text.find('\n', b.start) - b.start);
    const bool continuation = !first_line.empty() && (first_line[0] == ' ' || first_line[0] == '\t');
    if (!merged.empty() && merged.back().list && (b.list || continuation)) {
      merged.back().end = b.end;
    } else {
      merged.push_back(b);
    }
  }
  return merged;
}

bool mentions_any(std::string_view text, const std::vector<std::string>& terms) {
  for (const auto& t : tokenize(text)) {
    if (std::binary_search(terms.begin(), terms.end(), t)) return true;
  }
  return false;
}

Citation citation_for(const Segment& segment, std::string_view document_title) {
  return Citation{std::string(document_title.empty() ? std::string_view(segment.doc_id) : document_title),
                  segment.section_title, segment.page_start, segment.page_end};
}

std::string escape_cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out.push_back('\\');
    out.push_back(c == '\n' ? ' ' : c);
  }
  return out;
}

}  // namespace

std::string Citation::pages() const {
  return page_start == page_end ? std::to_string(page_start)
                                : std::to_string(page_start) + "–" + std::to_string(page_end);
}

EvidenceItem extract_evidence(const Segment& segment, const QueryStatement& query, std::string_view document_title) {
  if (segment.kind == SegmentKind::Narrative || !segment.table) {
    return extract_narrative_span(segment, query, document_title);
  }
  if (segment.table->complexity == TableComplexity::NonComplex) {
    return extract_table_cells(segment, query, document_title);
  }
  return cite_complex_table(segment, document_title);
}

EvidenceItem extract_narrative_span(const Segment& segment, const QueryStatement& query,
                                    std::string_view document_title) {
  EvidenceItem item;
  item.segment_id = segment.segment_id;
  item.mode = EvidenceMode::NarrativeSpan;
  item.citation = citation_for(segment, document_title);

  const std::string_view text = segment.text;
  std::string_view header;
  std::size_t body_start = 0;
  const auto first_nl = text.find('\n');
  const auto first_line = text.substr(0, first_nl);
  if (is_heading_line(first_line)) {
    header = trim(first_line);
    body_start = first_nl == std::string_view::npos ? text.size() : first_nl + 1;
  }
  const auto blocks = split_blocks(text, body_start);
  const auto terms = content_terms(query.query);

  std::optional<std::size_t> first;
  std::size_t last = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (mentions_any(text.substr(blocks[i].start, blocks[i].end - blocks[i].start), terms)) {
      if (!first) first = i;
      last = i;
    }
  }
  if (!first) {
    item.no_match = !mentions_any(header, terms);
    if (blocks.empty()) {
      item.content = segment.text;
      return item;
    }
    first = 0;
    last = 0;
  }
  if (*first == 0 && last + 1 == blocks.size()) {
    item.content = segment.text;
    return item;
  }
  const auto run = text.substr(blocks[*first].start, blocks[last].end - blocks[*first].start);
  item.content = header.empty() ? std::string(run) : std::string(header) + "\n\n" + std::string(run);
  return item;
}

EvidenceItem extract_table_cells(const Segment& segment, const QueryStatement& query,
                                 std::string_view document_title) {
  EvidenceItem item;
  item.segment_id = segment.segment_id;
  item.mode = EvidenceMode::TableCells;
  item.citation = citation_for(segment, document_title);
  item.matched_rows = std::vector<std::size_t>{};

  auto terms = content_terms(query.query);
  const auto statement_terms = content_terms(query.financial_statement);
  terms.insert(terms.end(), statement_terms.begin(), statement_terms.end());
  std::sort(terms.begin(), terms.end());
  terms.erase(std::unique(terms.begin(), terms.end()), terms.end());

  const auto& table = *segment.table;
  const auto header_rows = static_cast<std::size_t>(std::max(table.header_row_count, 0));
  std::vector<std::vector<Cell>> kept(table.rows.begin(),
                                      table.rows.begin() + static_cast<std::ptrdiff_t>(std::min(header_rows, table.rows.size())));
  for (std::size_t r = header_rows; r < table.rows.size(); ++r) {
    const bool hit = std::any_of(table.rows[r].begin(), table.rows[r].end(),
                                 [&](const Cell& c) { return mentions_any(c.text, terms); });
    if (hit) {
      item.matched_rows->push_back(r - header_rows);
      kept.push_back(table.rows[r]);
    }
  }
  if (item.matched_rows->empty()) {
    item.no_match = true;
    item.content = segment.text;
    return item;
  }
  item.content = render_markdown_table(kept);
  return item;
}

EvidenceItem cite_complex_table(const Segment& segment, std::string_view document_title) {
  EvidenceItem item;
  item.segment_id = segment.segment_id;
  item.mode = EvidenceMode::ComplexTableCitation;
  item.content = segment.text;
  item.citation = citation_for(segment, document_title);
  return item;
}

std::string render_markdown_table(const std::vector<std::vector<Cell>>& rows) {
  if (rows.empty()) return {};
  std::string out;
  auto render_row = [&](const std::vector<Cell>& row) {
    out += "|";
    for (const auto& c : row) out += " " + escape_cell(c.text) + " |";
    out += "\n";
  };
  render_row(rows.front());
  out += "|";
  for (std::size_t i = 0; i < rows.front().size(); ++i) out += " --- |";
  out += "\n";
  for (std::size_t r = 1; r < rows.size(); ++r) render_row(rows[r]);
  out.pop_back();
  return out;
}

bool is_traceable(const EvidenceItem& item, const Segment& segment) {
  const std::string_view text = segment.text;
  if (item.content.empty()) return false;
  if (item.mode != EvidenceMode::TableCells || item.no_match) {
    if (text.find(item.content) != std::string_view::npos) return true;
    if (item.mode != EvidenceMode::NarrativeSpan) return false;
    const auto first_line = trim(text.substr(0, text.find('\n')));
    const std::string prefix = std::string(first_line) + "\n\n";
    return is_heading_line(first_line) && item.content.starts_with(prefix) &&
           text.find(item.content.substr(prefix.size())) != std::string_view::npos;
  }

  if (!segment.table || !item.matched_rows) return false;
  const auto& table = *segment.table;
  const auto parsed = detect_tables(item.content);
  if (parsed.size() != 1) return false;
  const auto& rows = parsed.front().table.rows;
  if (table.header_row_count != 1 || rows.size() != 1 + item.matched_rows->size()) return false;
  auto same_text = [](const std::vector<Cell>& a, const std::vector<Cell>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](const Cell& x, const Cell& y) {
             return x.text == y.text;
           });
  };
  if (!same_text(rows[0], table.rows[0])) return false;
  for (std::size_t i = 0; i < item.matched_rows->size(); ++i) {
    const std::size_t source_row = 1 + (*item.matched_rows)[i];
    if (source_row >= table.rows.size() || !same_text(rows[1 + i], table.rows[source_row])) return false;
  }
  return true;
}

}  // namespace utilrank
