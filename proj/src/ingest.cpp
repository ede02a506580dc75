#include "utilrank/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "utilrank/error.hpp"
#include "utilrank/text.hpp"

namespace utilrank {
namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

char ascii_lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

bool iequals_prefix(std::string_view text, std::string_view prefix) {
  if (text.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(text[i]) != prefix[i]) return false;
  }
  return true;
}

struct Line {
  std::size_t start = 0;
  std::size_t end = 0;   // excludes the line terminator
  std::size_t next = 0;  // start of the following line
  bool fenced = false;   // inside (or delimiting) a fenced code block

  std::string_view view(std::string_view text) const { return text.substr(start, end - start); }
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    Line line;
    line.start = pos;
    line.next = nl == std::string_view::npos ? text.size() : nl + 1;
    line.end = nl == std::string_view::npos ? text.size() : nl;
    if (line.end > line.start && text[line.end - 1] == '\r') --line.end;
    lines.push_back(line);
    pos = line.next;
  }

  char fence_char = 0;
  std::size_t fence_len = 0;
  for (auto& line : lines) {
    auto view = line.view(text);
    std::size_t indent = 0;
    while (indent < 3 && indent < view.size() && view[indent] == ' ') ++indent;
    view.remove_prefix(indent);
    std::size_t run = 0;
    if (!view.empty() && (view[0] == '`' || view[0] == '~')) {
      while (run < view.size() && view[run] == view[0]) ++run;
    }
    if (fence_char == 0) {
      if (run >= 3) {
        fence_char = view[0];
        fence_len = run;
        line.fenced = true;
      }
    } else {
      line.fenced = true;
      if (run >= fence_len && view[0] == fence_char && is_blank(view.substr(run))) fence_char = 0;
    }
  }
  return lines;
}

struct Heading {
  int level = 0;
  std::string title;
};

std::optional<Heading> parse_atx_heading(std::string_view line) {
  std::size_t k = 0;
  while (k < 3 && k < line.size() && line[k] == ' ') ++k;
  std::size_t n = 0;
  while (k + n < line.size() && line[k + n] == '#') ++n;
  if (n == 0 || n > 6) return std::nullopt;
  const std::size_t after = k + n;
  if (after < line.size() && line[after] != ' ' && line[after] != '\t') return std::nullopt;

  std::string_view title = trim(line.substr(after));
  // Optional closing sequence: trailing #'s preceded by a space.
  std::size_t hashes = 0;
  while (hashes < title.size() && title[title.size() - 1 - hashes] == '#') ++hashes;
  if (hashes == title.size()) {
    title = {};
  } else if (hashes > 0 && (title[title.size() - 1 - hashes] == ' ' || title[title.size() - 1 - hashes] == '\t')) {
    title = trim(title.substr(0, title.size() - hashes));
  }
  return Heading{static_cast<int>(n), std::string(title)};
}

bool within_any(std::size_t pos, const std::vector<CharSpan>& spans) {
  return std::any_of(spans.begin(), spans.end(), [pos](const CharSpan& s) { return pos >= s.start && pos < s.end; });
}

bool overlaps_any(std::size_t a, std::size_t b, const std::vector<CharSpan>& spans) {
  return std::any_of(spans.begin(), spans.end(), [a, b](const CharSpan& s) { return a < s.end && s.start < b; });
}

// ---------------------------------------------------------------------------
// Pipe tables

std::vector<std::string> split_pipe_row(std::string_view line) {
  std::string_view row = trim(line);
  if (!row.empty() && row.front() == '|') row.remove_prefix(1);
  if (!row.empty() && row.back() == '|' && (row.size() < 2 || row[row.size() - 2] != '\\')) row.remove_suffix(1);

  std::vector<std::string> cells;
  std::string current;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (row[i] == '\\' && i + 1 < row.size() && row[i + 1] == '|') {
      current.push_back('|');
      ++i;
    } else if (row[i] == '|') {
      cells.emplace_back(trim(current));
      current.clear();
    } else {
      current.push_back(row[i]);
    }
  }
  cells.emplace_back(trim(current));
  return cells;
}

bool is_delimiter_row(std::string_view line, std::size_t& cell_count) {
  if (line.find('|') == std::string_view::npos) return false;
  const auto cells = split_pipe_row(line);
  for (const auto& cell : cells) {
    std::string_view c = cell;
    if (!c.empty() && c.front() == ':') c.remove_prefix(1);
    if (!c.empty() && c.back() == ':') c.remove_suffix(1);
    if (c.empty() || c.find_first_not_of('-') != std::string_view::npos) return false;
  }
  cell_count = cells.size();
  return true;
}

bool is_page_marker_line(std::string_view line) {
  const auto t = trim(line);
  if (!t.starts_with("<!--") || !t.ends_with("-->")) return false;
  return iequals_prefix(trim(t.substr(4)), "page");
}

std::vector<DetectedTable> find_pipe_tables(std::string_view text, const std::vector<Line>& lines,
                                            const std::vector<CharSpan>& html_spans) {
  std::vector<DetectedTable> tables;
  auto usable = [&](const Line& line) {
    const auto view = line.view(text);
    return !line.fenced && !is_blank(view) && view.find('|') != std::string_view::npos &&
           !overlaps_any(line.start, std::max(line.end, line.start + 1), html_spans) &&
           !parse_atx_heading(view) && !is_page_marker_line(view);
  };

  std::size_t i = 0;
  while (i + 1 < lines.size()) {
    std::size_t delimiter_cells = 0;
    if (!usable(lines[i]) || lines[i + 1].fenced ||
        !is_delimiter_row(lines[i + 1].view(text), delimiter_cells) ||
        overlaps_any(lines[i + 1].start, lines[i + 1].end, html_spans)) {
      ++i;
      continue;
    }
    auto header = split_pipe_row(lines[i].view(text));
    if (header.size() != delimiter_cells) {
      ++i;
      continue;
    }

    TableBlock table;
    table.header_row_count = 1;
    table.col_count = static_cast<int>(delimiter_cells);
    auto to_row = [](std::vector<std::string> texts) {
      std::vector<Cell> row;
      for (auto& t : texts) row.push_back(Cell{std::move(t), 1, 1});
      return row;
    };
    table.rows.push_back(to_row(std::move(header)));

    std::size_t j = i + 2;
    while (j < lines.size() && usable(lines[j])) {
      table.rows.push_back(to_row(split_pipe_row(lines[j].view(text))));
      ++j;
    }
    const Line& last = lines[j - 1];
    const auto header_view = lines[i].view(text);
    const std::size_t start = lines[i].start + header_view.find_first_not_of(" \t");
    std::size_t end = last.end;
    while (end > start && is_space(text[end - 1])) --end;

    table.complexity = classify_table(table);
    tables.push_back(DetectedTable{std::move(table), CharSpan{start, end}});
    i = j;
  }
  return tables;
}

// ---------------------------------------------------------------------------
// HTML tables

std::string decode_entities(std::string_view raw) {
  static constexpr std::pair<std::string_view, std::string_view> kEntities[] = {
      {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&#39;", "'"}, {"&apos;", "'"}, {"&nbsp;", " "},
  };
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    bool replaced = false;
    if (raw[i] == '&') {
      for (const auto& [entity, value] : kEntities) {
        if (raw.substr(i).starts_with(entity)) {
          out.append(value);
          i += entity.size();
          replaced = true;
          break;
        }
      }
    }
    if (!replaced) out.push_back(raw[i++]);
  }
  return out;
}

std::string collapse_whitespace(std::string_view raw) {
  std::string out;
  bool pending_space = false;
  for (char c : raw) {
    if (is_space(c)) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out.push_back(' ');
      pending_space = false;
      out.push_back(c);
    }
  }
  return out;
}

int span_attribute(std::string_view attrs_lower, std::string_view name) {
  const auto pos = attrs_lower.find(name);
  if (pos == std::string_view::npos) return 1;
  std::size_t i = pos + name.size();
  while (i < attrs_lower.size() && is_space(attrs_lower[i])) ++i;
  if (i >= attrs_lower.size() || attrs_lower[i] != '=') return 1;
  ++i;
  while (i < attrs_lower.size() && (is_space(attrs_lower[i]) || attrs_lower[i] == '"' || attrs_lower[i] == '\'')) ++i;
  int value = 0;
  const auto* first = attrs_lower.data() + i;
  const auto [ptr, ec] = std::from_chars(first, attrs_lower.data() + attrs_lower.size(), value);
  if (ec != std::errc{} || ptr == first || value < 1) return 1;
  return value;
}

// Parses the rows of an HTML table occupying [start, end) of text.
TableBlock parse_html_table(std::string_view text, std::size_t start, std::size_t end) {
  struct PendingRow {
    std::vector<Cell> cells;
    bool in_thead = false;
    bool all_th = true;
  };
  std::vector<PendingRow> rows;
  std::optional<PendingRow> row;
  std::optional<Cell> cell;
  std::string cell_raw;
  bool cell_is_th = false;
  bool in_thead = false;
  int depth = 0;

  auto close_cell = [&] {
    if (!cell) return;
    cell->text = collapse_whitespace(decode_entities(cell_raw));
    if (!row) row = PendingRow{{}, in_thead, true};
    row->all_th = row->all_th && cell_is_th;
    row->cells.push_back(std::move(*cell));
    cell.reset();
    cell_raw.clear();
  };
  auto close_row = [&] {
    close_cell();
    if (row && !row->cells.empty()) rows.push_back(std::move(*row));
    row.reset();
  };

  std::size_t p = start;
  while (p < end) {
    if (text[p] != '<') {
      const auto next = std::min(text.find('<', p), end);
      if (cell) cell_raw.append(text.substr(p, next - p));
      p = next;
      continue;
    }
    if (text.substr(p, 4) == "<!--") {
      const auto close = text.find("-->", p + 4);
      p = close == std::string_view::npos || close + 3 > end ? end : close + 3;
      continue;
    }
    const auto gt = text.find('>', p);
    if (gt == std::string_view::npos || gt >= end) {
      if (cell) cell_raw.append(text.substr(p, end - p));
      break;
    }
    std::string_view tag = text.substr(p + 1, gt - p - 1);
    const bool closing = !tag.empty() && tag.front() == '/';
    if (closing) tag.remove_prefix(1);
    std::string name;
    std::size_t k = 0;
    while (k < tag.size() && std::isalnum(static_cast<unsigned char>(tag[k]))) name.push_back(ascii_lower(tag[k++]));
    std::string attrs;
    for (char c : tag.substr(k)) attrs.push_back(ascii_lower(c));
    p = gt + 1;

    if (name == "table") {
      depth += closing ? -1 : 1;
      if (cell) cell_raw.push_back(' ');
      continue;
    }
    if (depth != 1) {
      if (cell) cell_raw.push_back(' ');
      continue;
    }
    if (name == "thead") {
      close_row();
      in_thead = !closing;
    } else if (name == "tbody" || name == "tfoot") {
      close_row();
      in_thead = false;
    } else if (name == "tr") {
      close_row();
      if (!closing) row = PendingRow{{}, in_thead, true};
    } else if (name == "td" || name == "th") {
      close_cell();
      if (!closing) {
        cell = Cell{"", span_attribute(attrs, "rowspan"), span_attribute(attrs, "colspan")};
        cell_is_th = name == "th";
      }
    } else if (cell && (name == "br" || name == "p" || name == "div" || name == "li")) {
      cell_raw.push_back(' ');
    }
  }
  close_row();

  TableBlock table;
  const bool has_thead = std::any_of(rows.begin(), rows.end(), [](const PendingRow& r) { return r.in_thead; });
  int header_rows = 0;
  for (const auto& r : rows) {
    if (has_thead ? r.in_thead : r.all_th) {
      ++header_rows;
    } else {
      break;
    }
  }
  // Without explicit header markup the first row is the header.
  if (header_rows == 0 && !rows.empty()) header_rows = 1;
  table.header_row_count = header_rows;
  for (auto& r : rows) {
    int coverage = 0;
    for (const auto& c : r.cells) coverage += c.col_span;
    table.col_count = std::max(table.col_count, coverage);
    table.rows.push_back(std::move(r.cells));
  }
  return table;
}

std::vector<DetectedTable> find_html_tables(std::string_view text, const std::vector<Line>& lines) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), ascii_lower);
  auto is_tag_at = [&](std::size_t pos, std::string_view tag) {
    if (lower.compare(pos, tag.size(), tag) != 0) return false;
    const std::size_t after = pos + tag.size();
    return after >= lower.size() || is_space(lower[after]) || lower[after] == '>' || lower[after] == '/';
  };
  auto line_of = [&](std::size_t pos) {
    const auto it = std::upper_bound(lines.begin(), lines.end(), pos,
                                     [](std::size_t p, const Line& l) { return p < l.start; });
    return std::prev(it);
  };

  std::vector<DetectedTable> tables;
  std::size_t cursor = 0;
  while (true) {
    std::size_t open = lower.find("<table", cursor);
    while (open != std::string::npos && (!is_tag_at(open, "<table") || line_of(open)->fenced)) {
      open = lower.find("<table", open + 1);
    }
    if (open == std::string::npos) break;

    int depth = 0;
    std::size_t p = open;
    std::size_t close_end = std::string::npos;
    while (p < lower.size()) {
      const auto next_open = lower.find("<table", p);
      const auto next_close = lower.find("</table", p);
      if (next_close == std::string::npos) break;
      if (next_open != std::string::npos && next_open < next_close) {
        if (is_tag_at(next_open, "<table")) ++depth;
        p = next_open + 6;
        continue;
      }
      const auto gt = lower.find('>', next_close);
      if (gt == std::string::npos) break;
      if (--depth == 0) {
        close_end = gt + 1;
        break;
      }
      p = gt + 1;
    }
    if (close_end == std::string::npos) {
      throw Error(ErrorCode::UnclosedTable, "HTML table opened at byte " + std::to_string(open) + " has no </table>");
    }

    TableBlock table = parse_html_table(text, open, close_end);
    if (!table.rows.empty()) {
      table.complexity = classify_table(table);
      tables.push_back(DetectedTable{std::move(table), CharSpan{open, close_end}});
    }
    cursor = close_end;
  }
  return tables;
}

std::vector<DetectedTable> detect_tables_in(std::string_view text, const std::vector<Line>& lines) {
  auto tables = find_html_tables(text, lines);
  std::vector<CharSpan> html_spans;
  for (const auto& t : tables) html_spans.push_back(t.span);
  auto pipes = find_pipe_tables(text, lines, html_spans);
  tables.insert(tables.end(), std::make_move_iterator(pipes.begin()), std::make_move_iterator(pipes.end()));
  std::sort(tables.begin(), tables.end(),
            [](const DetectedTable& a, const DetectedTable& b) { return a.span.start < b.span.start; });
  return tables;
}

// ---------------------------------------------------------------------------
// Sections

struct SectionRegion {
  std::string title;
  int level = 0;
  std::size_t heading_end = 0;  // end of the heading line; equals start for the preamble
  CharSpan region;
};

std::vector<SectionRegion> split_sections(std::string_view text, const std::vector<Line>& lines,
                                          const std::vector<CharSpan>& excluded) {
  std::vector<SectionRegion> regions;
  SectionRegion current;
  current.region.start = 0;
  for (const auto& line : lines) {
    if (line.fenced || within_any(line.start, excluded)) continue;
    const auto heading = parse_atx_heading(line.view(text));
    if (!heading) continue;
    current.region.end = line.start;
    regions.push_back(std::move(current));
    current = SectionRegion{heading->title, heading->level, line.end, CharSpan{line.start, 0}};
  }
  current.region.end = text.size();
  regions.push_back(std::move(current));
  return regions;
}

// ---------------------------------------------------------------------------
// Page attribution and span trimming

class PageMap {
 public:
  explicit PageMap(std::vector<PageMarker> markers) : markers_(std::move(markers)) {}

  int page_at(std::size_t pos) const {
    int page = 1;
    for (const auto& m : markers_) {
      if (m.span.start > pos) break;
      page = m.page;
    }
    return page;
  }

  int page_count() const { return markers_.empty() ? 1 : std::max(1, markers_.back().page); }

  const PageMarker* starting_at(std::size_t pos) const {
    for (const auto& m : markers_) {
      if (m.span.start == pos) return &m;
    }
    return nullptr;
  }
  const PageMarker* ending_at(std::size_t pos) const {
    for (const auto& m : markers_) {
      if (m.span.end == pos) return &m;
    }
    return nullptr;
  }
  const PageMarker* containing(std::size_t pos) const {
    for (const auto& m : markers_) {
      if (pos > m.span.start && pos < m.span.end) return &m;
    }
    return nullptr;
  }

 private:
  std::vector<PageMarker> markers_;
};

// Shrinks [a, b) past whitespace and page markers on both ends.
CharSpan trim_span(std::string_view text, std::size_t a, std::size_t b, const PageMap& pages) {
  while (a < b) {
    if (is_space(text[a])) {
      ++a;
    } else if (const auto* m = pages.starting_at(a); m && m->span.end <= b) {
      a = m->span.end;
    } else {
      break;
    }
  }
  while (b > a) {
    if (is_space(text[b - 1])) {
      --b;
    } else if (const auto* m = pages.ending_at(b); m && m->span.start >= a) {
      b = m->span.start;
    } else {
      break;
    }
  }
  return CharSpan{a, b};
}

// Splits an over-long narrative span into pieces of at most kMaxSegmentChars
// code points, preferring paragraph boundaries, then line boundaries.
std::vector<CharSpan> split_long(std::string_view text, CharSpan span, const std::vector<Line>& lines,
                                 const PageMap& pages) {
  std::vector<CharSpan> pieces;
  std::size_t a = span.start;
  const std::size_t b = span.end;
  while (a < b) {
    const auto rest = text.substr(a, b - a);
    if (utf8_length(rest) <= kMaxSegmentChars) {
      pieces.push_back(CharSpan{a, b});
      break;
    }
    const std::size_t limit = a + utf8_prefix(rest, kMaxSegmentChars).size();
    std::size_t paragraph_cut = 0;
    std::size_t line_cut = 0;
    for (const auto& line : lines) {
      if (line.start <= a) continue;
      if (line.start > limit) break;
      line_cut = line.start;
      if (is_blank(line.view(text))) paragraph_cut = line.start;
    }
    std::size_t cut = paragraph_cut ? paragraph_cut : line_cut;
    if (cut == 0) {
      cut = limit;
      if (const auto* m = pages.containing(cut); m && m->span.start > a) cut = m->span.start;
    }
    const CharSpan piece = trim_span(text, a, cut, pages);
    if (piece.start < piece.end) pieces.push_back(piece);
    a = trim_span(text, cut, b, pages).start;
  }
  return pieces;
}

std::string make_segment_id(const std::string& doc_id, std::size_t ordinal) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", ordinal);
  return doc_id + "#" + buf;
}

}  // namespace

std::vector<PageMarker> find_page_markers(std::string_view text) {
  std::vector<PageMarker> markers;
  std::size_t pos = 0;
  while ((pos = text.find("<!--", pos)) != std::string_view::npos) {
    const auto close = text.find("-->", pos + 4);
    if (close == std::string_view::npos) break;
    const auto inner = trim(text.substr(pos + 4, close - pos - 4));
    if (iequals_prefix(inner, "page")) {
      const auto rest = trim(inner.substr(4));
      if (!rest.empty() && rest.front() == ':') {
        const auto value = trim(rest.substr(1));
        int page = 0;
        const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), page);
        if (value.empty() || ec != std::errc{} || ptr != value.data() + value.size() || page < 1) {
          throw Error(ErrorCode::MalformedPageMarker, "page marker with invalid number '" + std::string(value) + "'");
        }
        if (!markers.empty() && page <= markers.back().page) {
          throw Error(ErrorCode::MalformedPageMarker, "page " + std::to_string(page) + " follows page " +
                                                          std::to_string(markers.back().page));
        }
        markers.push_back(PageMarker{CharSpan{pos, close + 3}, page});
      }
    }
    pos = close + 3;
  }
  return markers;
}

std::vector<Section> segment_markdown(std::string_view text) {
  const auto lines = split_lines(text);
  std::vector<Section> sections;
  for (const auto& region : split_sections(text, lines, {})) {
    const auto body = trim(text.substr(region.heading_end, region.region.end - region.heading_end));
    const bool has_heading = region.level > 0;
    if (!has_heading && body.empty()) continue;
    std::size_t end = region.region.end;
    while (end > region.region.start && is_space(text[end - 1])) --end;
    std::size_t start = region.region.start;
    if (!has_heading) {
      while (start < end && is_space(text[start])) ++start;
    }
    sections.push_back(Section{region.title, region.level, std::string(body), CharSpan{start, end}});
  }
  return sections;
}

std::vector<DetectedTable> detect_tables(std::string_view text) { return detect_tables_in(text, split_lines(text)); }

TableComplexity classify_table(const TableBlock& table) {
  if (table.header_row_count > 1) return TableComplexity::Complex;
  for (const auto& row : table.rows) {
    int coverage = 0;
    for (const auto& cell : row) {
      if (cell.row_span > 1 || cell.col_span > 1) return TableComplexity::Complex;
      coverage += cell.col_span;
    }
    if (coverage != table.col_count) return TableComplexity::Complex;
  }
  return TableComplexity::NonComplex;
}

ParsedDocument parse_document(std::string_view raw, const DocumentMeta& meta) {
  if (!is_valid_utf8(raw)) throw Error(ErrorCode::InvalidUtf8, "document '" + meta.doc_id + "' is not valid UTF-8");

  const auto markers = find_page_markers(raw);
  {
    std::size_t pos = 0;
    bool has_content = false;
    for (const auto& m : markers) {
      if (!is_blank(raw.substr(pos, m.span.start - pos))) has_content = true;
      pos = m.span.end;
    }
    if (!is_blank(raw.substr(pos))) has_content = true;
    if (!has_content) throw Error(ErrorCode::EmptyDocument, "document '" + meta.doc_id + "' has no content");
  }
  const PageMap pages(markers);
  const auto lines = split_lines(raw);
  const auto tables = detect_tables_in(raw, lines);
  std::vector<CharSpan> table_spans;
  for (const auto& t : tables) table_spans.push_back(t.span);

  ParsedDocument doc;
  doc.source = DocumentSource{meta.doc_id, meta.title.empty() ? meta.doc_id : meta.title, meta.source_path,
                              meta.language.empty() ? "und" : meta.language, pages.page_count()};

  auto emit = [&](CharSpan span, const std::string& title, const DetectedTable* table) {
    Segment seg;
    seg.segment_id = make_segment_id(meta.doc_id, doc.segments.size());
    seg.doc_id = meta.doc_id;
    seg.section_title = title;
    seg.page_start = pages.page_at(span.start);
    seg.page_end = pages.page_at(span.end - 1);
    seg.kind = table ? SegmentKind::Table : SegmentKind::Narrative;
    seg.text = std::string(raw.substr(span.start, span.size()));
    if (table) seg.table = table->table;
    seg.char_span = span;
    doc.segments.push_back(std::move(seg));
  };
  auto emit_narrative = [&](std::size_t a, std::size_t b, const std::string& title) {
    const CharSpan span = trim_span(raw, a, b, pages);
    if (span.start >= span.end) return;
    for (const auto& piece : split_long(raw, span, lines, pages)) emit(piece, title, nullptr);
  };

  std::size_t next_table = 0;
  for (const auto& region : split_sections(raw, lines, table_spans)) {
    std::size_t cursor = region.region.start;
    while (next_table < tables.size() && tables[next_table].span.start < region.region.end) {
      const auto& table = tables[next_table++];
      emit_narrative(cursor, table.span.start, region.title);
      emit(table.span, region.title, &table);
      cursor = table.span.end;
    }
    emit_narrative(cursor, region.region.end, region.title);
  }
  return doc;
}

std::pair<DocumentMeta, std::size_t> parse_front_matter(std::string_view file_text, const std::string& path) {
  std::size_t pos = 0;
  if (file_text.starts_with("\xEF\xBB\xBF")) pos = 3;
  auto next_line = [&](std::string_view& line) {
    if (pos >= file_text.size()) return false;
    const auto nl = file_text.find('\n', pos);
    const auto end = nl == std::string_view::npos ? file_text.size() : nl;
    line = file_text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = nl == std::string_view::npos ? file_text.size() : nl + 1;
    return true;
  };

  std::string_view line;
  if (!next_line(line) || trim(line) != "---") {
    throw Error(ErrorCode::MalformedFrontMatter, path + ": missing front-matter block");
  }
  DocumentMeta meta;
  meta.source_path = path;
  bool closed = false;
  while (next_line(line)) {
    if (trim(line) == "---") {
      closed = true;
      break;
    }
    if (is_blank(line) || trim(line).starts_with("#")) continue;
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::MalformedFrontMatter, path + ": expected 'key: value', got '" + std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, colon));
    auto value = trim(line.substr(colon + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (key == "doc_id") {
      meta.doc_id = value;
    } else if (key == "title") {
      meta.title = value;
    } else if (key == "source") {
      meta.source_path = value;
    } else if (key == "language") {
      meta.language = value;
    }
  }
  if (!closed) throw Error(ErrorCode::MalformedFrontMatter, path + ": front-matter block is not closed");
  if (meta.doc_id.empty()) throw Error(ErrorCode::MalformedFrontMatter, path + ": front matter lacks doc_id");
  if (meta.language.empty()) meta.language = "und";
  return {meta, pos};
}

ParsedDocument parse_markdown_file(std::string_view file_text, const std::string& path) {
  const auto [meta, offset] = parse_front_matter(file_text, path);
  return parse_document(file_text.substr(offset), meta);
}

}  // namespace utilrank
